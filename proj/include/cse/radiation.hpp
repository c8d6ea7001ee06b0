#pragma once

// Far-field emission of the ensemble sampled on a plane z = z_obs.
//
// The plane's transverse coordinates are used directly as image-plane
// coordinates (unit-magnification ideal imaging). Field units take
// k^3 |p| / (4 pi eps0) = 1; the optical carrier and retardation are dropped.

#include <complex>
#include <cstddef>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "cse/ensemble.hpp"
#include "cse/evolution.hpp"

namespace cse {

using CVec3 = Eigen::Vector3cd;

struct ObservationGrid {
    double z_obs = 100.0;
    double x_span = 20.0;  // half-width
    double y_span = 20.0;  // half-width
    double spacing = 0.25;

    std::size_t nx() const;
    std::size_t ny() const;
    double x(std::size_t i) const { return -x_span + static_cast<double>(i) * spacing; }
    double y(std::size_t j) const { return -y_span + static_cast<double>(j) * spacing; }

    void validate() const;
    // Also requires the plane to sit at least 10 wavelengths beyond the box.
    void validate(const CloudSpec& cloud) const;
};

inline constexpr double kMinFarFieldGap = 10.0;

struct FieldMap {
    ObservationGrid grid;
    double t = 0.0;
    std::vector<CVec3> E;  // row-major: E[j * nx + i] at (x(i), y(j))

    const CVec3& at(std::size_t i, std::size_t j) const { return E[j * grid.nx() + i]; }
    CVec3& at(std::size_t i, std::size_t j) { return E[j * grid.nx() + i]; }
};

// Field radiated by one atom with amplitude c_q at time t:
//   exp(i k r) / (k r) * [(r_hat x p) x r_hat] * exp(-t/2) * c_q
CVec3 dipole_field(const Vec3& atom, std::complex<double> c_q, const Vec3& dipole_axis,
                   const Vec3& obs_point, double t);

// Coherent sum over all atoms on every grid point. amplitudes.t is the
// observation time.
FieldMap field_map(const AtomPositions& atoms, const Amplitudes& amplitudes,
                   const Vec3& dipole_axis, const ObservationGrid& grid);

// CSV x,y,Re_Ex,Im_Ex,Re_Ey,Im_Ey,Re_Ez,Im_Ez in grid order.
void write_field_csv(const FieldMap& map, const std::filesystem::path& path);
FieldMap read_field_csv(const std::filesystem::path& path);

// Plain (ASCII, P2) graymap of |E| scaled to 0..255; top row is max y.
void write_graymap(const FieldMap& map, const std::filesystem::path& path);

}  // namespace cse
