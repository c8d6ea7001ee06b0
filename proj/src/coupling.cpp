#include "cse/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <lapacke.h>

#include "cse/errors.hpp"
#include "cse/io.hpp"

namespace cse {

namespace {

// sin(x)/x and cos(x)/x^2 - sin(x)/x^3, switching to Taylor series where the
// closed forms cancel catastrophically.
double sinc(double x)
{
    if (x < 1e-2) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0;
    }
    return std::sin(x) / x;
}

double near_field_term(double x)
{
    if (x < 1e-2) {
        const double x2 = x * x;
        return -1.0 / 3.0 + x2 / 30.0 - x2 * x2 / 840.0 + x2 * x2 * x2 / 45360.0;
    }
    const double s = std::sin(x);
    const double c = std::cos(x);
    return c / (x * x) - s / (x * x * x);
}

void dump_matrix(const Eigen::MatrixXd& B, const std::string& name)
{
    std::ofstream out(name);
    for (Eigen::Index i = 0; i < B.rows(); ++i) {
        for (Eigen::Index j = 0; j < B.cols(); ++j)
            out << (j ? "," : "") << format_number(B(i, j));
        out << '\n';
    }
}

double residual(const Eigen::MatrixXd& B, const Eigensystem& eig)
{
    return (B * eig.vectors - eig.vectors * eig.betas.asDiagonal()).cwiseAbs().maxCoeff();
}

}  // namespace

double coupling_kernel(const Vec3& separation, const Vec3& dipole_axis)
{
    const double r = separation.norm();
    if (!(r > 0.0))
        throw DomainError("coupling_kernel: zero separation");
    const double cos_t = dipole_axis.dot(separation) / r;
    const double cos2 = cos_t * cos_t;
    const double kr = kWaveNumber * r;
    return 1.5 * ((1.0 - cos2) * sinc(kr) + (1.0 - 3.0 * cos2) * near_field_term(kr));
}

ExchangeMatrix assemble_exchange(const AtomPositions& atoms, const Vec3& dipole_axis)
{
    const auto n = static_cast<Eigen::Index>(atoms.size());
    ExchangeMatrix ex{Eigen::MatrixXd::Zero(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index j = k + 1; j < n; ++j) {
            const Vec3 d = atoms[j] - atoms[k];
            if (!(d.squaredNorm() > 0.0)) {
                std::ostringstream msg;
                msg << "atoms " << k << " and " << j << " coincide";
                throw DomainError(msg.str());
            }
            const double b = coupling_kernel(d, dipole_axis);
            ex.B(j, k) = b;
            ex.B(k, j) = b;
        }
    }
    return ex;
}

Eigensystem decompose(const ExchangeMatrix& exchange)
{
    const Eigen::Index n = exchange.dim();
    Eigensystem eig{Eigen::VectorXd(n), exchange.B};
    if (n == 0)
        return eig;

    const double tol = 1e-8 * std::max(exchange.B.cwiseAbs().maxCoeff(), 1e-300);
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n),
                                           eig.vectors.data(), static_cast<lapack_int>(n),
                                           eig.betas.data());
    double worst = info == 0 ? residual(exchange.B, eig) : 0.0;
    if (info == 0 && worst <= tol)
        return eig;

    // Some OpenBLAS builds select broken kernels on newer CPUs; retry with
    // Eigen's own solver before giving up.
    std::clog << "[coupling] dsyevd failed for N = " << n << " (info " << info << ", residual "
              << format_number(worst) << "), retrying with Eigen\n";
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(exchange.B);
    if (solver.info() == Eigen::Success) {
        eig.betas = solver.eigenvalues();
        eig.vectors = solver.eigenvectors();
        worst = residual(exchange.B, eig);
        if (worst <= tol)
            return eig;
    }
    const std::string name = "exchange_failure_" + std::to_string(n) + ".csv";
    dump_matrix(exchange.B, name);
    throw NumericalError("eigendecomposition failed, residual " + format_number(worst) +
                         " (matrix written to " + name + ")");
}

SpectrumStats spectrum(const Eigensystem& eig, double box_length)
{
    SpectrumStats s;
    const auto n = static_cast<std::size_t>(eig.betas.size());
    s.betas.assign(eig.betas.data(), eig.betas.data() + n);
    std::sort(s.betas.begin(), s.betas.end());
    s.rates.reserve(n);
    for (double b : s.betas)
        s.rates.push_back(1.0 + b);

    if (n > 0) {
        double mean = 0.0;
        for (double b : s.betas)
            mean += b;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double b : s.betas)
            var += (b - mean) * (b - mean);
        s.sample_sigma = std::sqrt(var / static_cast<double>(n));
    }
    s.closed_form_sigma = sigma_h_closed_form(static_cast<double>(n), box_length);
    return s;
}

SpectrumStats spectrum(const ExchangeMatrix& exchange, double box_length)
{
    return spectrum(decompose(exchange), box_length);
}

double sigma_h_closed_form(double N, double L)
{
    if (!(L > 0.0))
        throw DomainError("sigma_h_closed_form: L must be positive");
    return std::sqrt(std::numbers::pi + 29.0 / 12.0) / (4.0 * std::numbers::pi) * N / L;
}

void write_spectrum_csv(const SpectrumStats& stats, const std::filesystem::path& path)
{
    CsvWriter csv(path, {"mode_index", "beta", "rate_over_gamma"});
    for (std::size_t i = 0; i < stats.betas.size(); ++i)
        csv.row(i, stats.betas[i], stats.rates[i]);
}

}  // namespace cse
