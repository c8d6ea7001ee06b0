#pragma once

// Random disordered atomic clouds in a rectangular box centred at the origin.
// All lengths are in units of the transition wavelength.

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace cse {

using Vec3 = Eigen::Vector3d;

struct CloudSpec {
    double Lx = 40.0;
    double Ly = 40.0;
    double Lz = 40.0;
    std::size_t N = 1500;
    std::uint64_t seed = 0;
    Vec3 dipole_axis = Vec3::UnitY();
    Vec3 laser_axis = Vec3::UnitX();

    // Throws ConfigError on non-positive edges, N == 0, or non-unit axes.
    void validate() const;
};

struct AtomPositions {
    std::vector<Vec3> positions;
    // Number of draws discarded because they landed within
    // kMinSeparation of an earlier atom.
    std::size_t resampled = 0;

    std::size_t size() const { return positions.size(); }
    const Vec3& operator[](std::size_t i) const { return positions[i]; }
};

// Pairs closer than this are redrawn; the coupling kernel loses precision
// long before it overflows, but exact coincidences are a hard domain error.
inline constexpr double kMinSeparation = 1e-6;

// Seedable uniform generator with a fixed, documented algorithm:
// std::mt19937_64 (fully specified by the C++ standard) with doubles formed
// from the top 53 bits of each draw, so sequences match across platforms.
class UniformSource {
public:
    explicit UniformSource(std::uint64_t seed);
    // Uniform on [0, 1).
    double next();
    // Uniform on [lo, hi).
    double next(double lo, double hi) { return lo + (hi - lo) * next(); }

private:
    std::mt19937_64 engine_;
};

AtomPositions sample_cloud(const CloudSpec& spec);

// Atoms per cubic wavelength.
double density(const CloudSpec& spec);

// n * sigma * Lx with the resonant cross section sigma = lambda^2 / (2 pi).
double optical_depth(const CloudSpec& spec);

// CSV with header atom_index,x,y,z.
void write_positions_csv(const AtomPositions& atoms, const std::filesystem::path& path);

}  // namespace cse
