#pragma once

// Single-excitation dynamics after the drive is switched off.
//
// Stored amplitudes c(t) exclude the global factor exp(-i(w_a - i Gamma/2)t):
// the carrier never reaches an observable here and the exp(-Gamma t / 2)
// envelope is applied by norm_trace and the radiation module.

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "cse/coupling.hpp"
#include "cse/ensemble.hpp"

namespace cse {

struct Amplitudes {
    Eigen::VectorXcd c;
    double t = 0.0;
};

struct NormTrace {
    std::vector<double> times;
    std::vector<double> norms;  // exp(-Gamma t) |c(t)|^2
};

// c_q(0) = exp(i k (laser_axis . r_q)) / sqrt(N).
Amplitudes initial_amplitudes(const AtomPositions& atoms, const Vec3& laser_axis);

// Exact propagator exp(-t (Gamma/2) B) built from one eigendecomposition.
// The modal projection of c(0) is done once; each evaluation is O(N^2) for
// amplitudes and O(N) for the norm.
class Propagator {
public:
    Propagator(std::shared_ptr<const Eigensystem> eig, const Amplitudes& c0);

    Amplitudes at(double t) const;

    // <psi(t)|psi(t)> without forming c(t).
    double norm(double t) const;

    // -d ln<psi|psi>/dt by a centred difference of half-width h.
    double decay_rate(double t, double h = 1.0) const;

    const Eigensystem& eigensystem() const { return *eig_; }

private:
    std::shared_ptr<const Eigensystem> eig_;
    Eigen::VectorXcd modal_;  // V^T c(t0)
    double t0_;
};

// Amplitudes at each requested time (t >= 0), sharing one decomposition.
std::vector<Amplitudes> propagate(const Eigensystem& eig, const Amplitudes& c0,
                                  const std::vector<double>& times);
std::vector<Amplitudes> propagate(const ExchangeMatrix& exchange, const Amplitudes& c0,
                                  const std::vector<double>& times);

// trajectory must be non-empty and start at t = 0.
NormTrace norm_trace(const std::vector<Amplitudes>& trajectory);

// CSV t_over_tau,norm.
void write_norm_csv(const NormTrace& trace, const std::filesystem::path& path);

}  // namespace cse
