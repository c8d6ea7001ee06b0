#include "cse/evolution.hpp"

#include <cmath>
#include <complex>

#include "cse/errors.hpp"
#include "cse/io.hpp"

namespace cse {

Amplitudes initial_amplitudes(const AtomPositions& atoms, const Vec3& laser_axis)
{
    const auto n = static_cast<Eigen::Index>(atoms.size());
    if (n == 0)
        throw ConfigError("initial_amplitudes: empty cloud");
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    Amplitudes a{Eigen::VectorXcd(n), 0.0};
    for (Eigen::Index q = 0; q < n; ++q)
        a.c[q] = std::polar(amp, kWaveNumber * laser_axis.dot(atoms[q]));
    return a;
}

Propagator::Propagator(std::shared_ptr<const Eigensystem> eig, const Amplitudes& c0)
    : eig_(std::move(eig)), t0_(c0.t)
{
    if (eig_->vectors.rows() != c0.c.size())
        throw ConfigError("propagator: amplitude dimension does not match exchange matrix");
    const Eigen::MatrixXd& V = eig_->vectors;
    modal_.resize(c0.c.size());
    modal_.real() = V.transpose() * c0.c.real();
    modal_.imag() = V.transpose() * c0.c.imag();
}

Amplitudes Propagator::at(double t) const
{
    const double dt = t - t0_;
    const Eigen::VectorXcd scaled =
        modal_.cwiseProduct((-0.5 * dt * eig_->betas.array()).exp().matrix().cast<std::complex<double>>());
    Amplitudes out{Eigen::VectorXcd(scaled.size()), t};
    out.c.real() = eig_->vectors * scaled.real();
    out.c.imag() = eig_->vectors * scaled.imag();
    return out;
}

double Propagator::norm(double t) const
{
    const double dt = t - t0_;
    double sum = 0.0;
    for (Eigen::Index n = 0; n < modal_.size(); ++n)
        sum += std::norm(modal_[n]) * std::exp(-(1.0 + eig_->betas[n]) * dt);
    return sum * std::exp(-t0_);
}

double Propagator::decay_rate(double t, double h) const
{
    return -(std::log(norm(t + h)) - std::log(norm(t - h))) / (2.0 * h);
}

std::vector<Amplitudes> propagate(const Eigensystem& eig, const Amplitudes& c0,
                                  const std::vector<double>& times)
{
    // Non-owning alias; the Propagator does not outlive this call.
    Propagator prop(std::shared_ptr<const Eigensystem>(&eig, [](const Eigensystem*) {}), c0);
    std::vector<Amplitudes> out;
    out.reserve(times.size());
    for (double t : times) {
        if (t < c0.t)
            throw ConfigError("propagate: times must not precede the initial state");
        out.push_back(prop.at(t));
    }
    return out;
}

std::vector<Amplitudes> propagate(const ExchangeMatrix& exchange, const Amplitudes& c0,
                                  const std::vector<double>& times)
{
    return propagate(decompose(exchange), c0, times);
}

NormTrace norm_trace(const std::vector<Amplitudes>& trajectory)
{
    if (trajectory.empty() || trajectory.front().t != 0.0)
        throw ConfigError("norm_trace: trajectory must start at t = 0");
    NormTrace trace;
    for (const Amplitudes& a : trajectory) {
        trace.times.push_back(a.t);
        trace.norms.push_back(std::exp(-a.t) * a.c.squaredNorm());
    }
    return trace;
}

void write_norm_csv(const NormTrace& trace, const std::filesystem::path& path)
{
    CsvWriter csv(path, {"t_over_tau", "norm"});
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        csv.row(trace.times[i], trace.norms[i]);
}

}  // namespace cse
