#pragma once

// Spatial coherence of a field map: equal-time cross-correlation along one
// image axis, its 1/e^2 radius, and the single-parameter fit
//   w = w_u (1 + xi * sigma_H(N, L)).

#include <complex>
#include <filesystem>
#include <vector>

#include "cse/radiation.hpp"

namespace cse {

enum class Axis { X, Y };

struct CorrelationProfile {
    Axis axis = Axis::X;
    double spacing = 0.0;
    std::vector<double> lags;  // symmetric, lags[zero_index()] == 0
    std::vector<std::complex<double>> H;

    std::size_t zero_index() const { return lags.size() / 2; }
};

// H(x) = < sum_x' E(x', y) . conj(E(x' - x, y)) dx' >_y  (and the y analogue)
//
// Only grid points with |x|, |y| <= window contribute; samples outside are
// treated as zero, and the sum is not normalised by the overlap length.
// Lags run over the full window width in both directions.
CorrelationProfile cross_correlation(const FieldMap& map, Axis axis, double window = 10.0);

struct CoherenceWidth {
    double w = 0.0;
    Axis axis = Axis::X;
    double t = 0.0;
    // |H| never dropped to e^-2 H(0) inside the window; w is then the
    // largest lag and must not enter fits.
    bool saturated = false;
};

// Smallest positive lag where |H(x)| / |H(0)| reaches e^-2, linearly
// interpolated between the bracketing samples.
CoherenceWidth coherence_width(const CorrelationProfile& profile, double t = 0.0);

struct FomPoint {
    double N = 0.0;
    double L = 0.0;
    double w = 0.0;
};

struct FomFit {
    double xi = 0.0;
    double w_u = 0.0;
    std::vector<double> residuals;  // w - w_u (1 + xi sigma_H), per point
};

// Least squares over xi alone with w_u held at the supplied measured value.
// Needs at least three points whose sigma_H values are not all equal.
FomFit fit_fom(const std::vector<FomPoint>& points, double w_u);

// CSV lag,abs_H,log10_abs_H.
void write_correlation_csv(const std::vector<double>& lags, const std::vector<double>& abs_h,
                           const std::filesystem::path& path);

}  // namespace cse
