#pragma once

// Pairwise dipole-dipole exchange couplings in the single-excitation sector.
//
// With Gamma = 1 and k = 2 pi (lengths in wavelengths) every coupling is
// F_jk = -i (Gamma / 2) b_jk with b_jk real, so the whole exchange
// Hamiltonian factors as H_exc = -i (Gamma / 2) B with B real symmetric and
// zero on the diagonal. Everything downstream works with B.

#include <cstddef>
#include <filesystem>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "cse/ensemble.hpp"

namespace cse {

inline constexpr double kWaveNumber = 2.0 * std::numbers::pi;

// b_jk for separation r (in wavelengths) between two dipoles along
// dipole_axis:
//   b = (3/2) [ (1 - cos^2) sin(kr)/(kr)
//             + (1 - 3 cos^2) (cos(kr)/(kr)^2 - sin(kr)/(kr)^3) ]
// Tends to 1 as r -> 0. Throws DomainError for r == 0.
double coupling_kernel(const Vec3& separation, const Vec3& dipole_axis);

struct ExchangeMatrix {
    Eigen::MatrixXd B;

    Eigen::Index dim() const { return B.rows(); }
};

ExchangeMatrix assemble_exchange(const AtomPositions& atoms, const Vec3& dipole_axis);

// B = V diag(betas) V^T with V orthogonal, betas ascending.
struct Eigensystem {
    Eigen::VectorXd betas;
    Eigen::MatrixXd vectors;
};

// Backed by LAPACK dsyevd. Verifies max|B V - V diag(betas)| <= 1e-8 max|B|
// and throws NumericalError (writing the matrix next to the working
// directory as exchange_failure_<N>.csv) when the solver fails.
Eigensystem decompose(const ExchangeMatrix& exchange);

struct SpectrumStats {
    std::vector<double> betas;  // ascending
    std::vector<double> rates;  // Gamma (1 + beta), in units of Gamma
    double sample_sigma = 0.0;  // population std of betas
    double closed_form_sigma = 0.0;
};

// box_length feeds closed_form_sigma; callers use the cube root of the box
// volume for non-cubic clouds.
SpectrumStats spectrum(const Eigensystem& eig, double box_length);
SpectrumStats spectrum(const ExchangeMatrix& exchange, double box_length);

// Large-N width of the exchange eigenvalue distribution:
// (1 / 4 pi) sqrt(pi + 29/12) N / L.
double sigma_h_closed_form(double N, double L);

// CSV mode_index,beta,rate_over_gamma.
void write_spectrum_csv(const SpectrumStats& stats, const std::filesystem::path& path);

}  // namespace cse
