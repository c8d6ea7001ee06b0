#include "cse/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cse/coupling.hpp"
#include "cse/errors.hpp"
#include "cse/io.hpp"

namespace cse {

namespace {

// Indices of grid samples whose coordinate lies within [-window, window].
std::vector<std::size_t> window_indices(std::size_t count, double span, double spacing,
                                        double window)
{
    const double tol = 1e-9 * spacing;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < count; ++i) {
        const double c = -span + static_cast<double>(i) * spacing;
        if (std::abs(c) <= window + tol)
            idx.push_back(i);
    }
    return idx;
}

std::complex<double> dot_conj(const CVec3& a, const CVec3& b)
{
    return a.x() * std::conj(b.x()) + a.y() * std::conj(b.y()) + a.z() * std::conj(b.z());
}

}  // namespace

CorrelationProfile cross_correlation(const FieldMap& map, Axis axis, double window)
{
    const ObservationGrid& g = map.grid;
    if (!(window > 0.0))
        throw ConfigError("analysis window must be positive");
    const double tol = 1e-9 * g.spacing;
    if (g.x_span + tol < window || g.y_span + tol < window)
        throw ConfigError("analysis window +-" + format_number(window) +
                          " exceeds the computed field map");

    const auto xs = window_indices(g.nx(), g.x_span, g.spacing, window);
    const auto ys = window_indices(g.ny(), g.y_span, g.spacing, window);
    const auto& along = axis == Axis::X ? xs : ys;
    const auto& across = axis == Axis::X ? ys : xs;
    const auto m = static_cast<std::ptrdiff_t>(along.size());

    CorrelationProfile prof;
    prof.axis = axis;
    prof.spacing = g.spacing;
    prof.lags.resize(2 * m - 1);
    prof.H.assign(2 * m - 1, 0.0);
    for (std::ptrdiff_t k = -(m - 1); k <= m - 1; ++k)
        prof.lags[k + m - 1] = static_cast<double>(k) * g.spacing;

    std::vector<CVec3> line(static_cast<std::size_t>(m));
    for (std::size_t c : across) {
        for (std::ptrdiff_t a = 0; a < m; ++a)
            line[a] = axis == Axis::X ? map.at(along[a], c) : map.at(c, along[a]);
        for (std::ptrdiff_t k = -(m - 1); k <= m - 1; ++k) {
            std::complex<double> acc = 0.0;
            const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, k);
            const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(m, m + k);
            for (std::ptrdiff_t a = lo; a < hi; ++a)
                acc += dot_conj(line[a], line[a - k]);
            prof.H[k + m - 1] += acc * g.spacing;
        }
    }
    const double rows = static_cast<double>(across.size());
    for (auto& h : prof.H)
        h /= rows;
    return prof;
}

CoherenceWidth coherence_width(const CorrelationProfile& profile, double t)
{
    const std::size_t z = profile.zero_index();
    const double h0 = std::abs(profile.H.at(z));
    if (!(h0 > 0.0))
        throw DomainError("coherence_width: H(0) must be positive");
    const double target = std::exp(-2.0);

    CoherenceWidth out;
    out.axis = profile.axis;
    out.t = t;
    double prev = 1.0;
    for (std::size_t k = z + 1; k < profile.H.size(); ++k) {
        const double r = std::abs(profile.H[k]) / h0;
        if (r <= target) {
            const double frac = (prev - target) / (prev - r);
            out.w = profile.lags[k - 1] + frac * (profile.lags[k] - profile.lags[k - 1]);
            return out;
        }
        prev = r;
    }
    out.w = profile.lags.back();
    out.saturated = true;
    return out;
}

FomFit fit_fom(const std::vector<FomPoint>& points, double w_u)
{
    if (points.size() < 3)
        throw ConfigError("fit_fom: need at least three points");
    if (!(w_u > 0.0))
        throw ConfigError("fit_fom: w_u must be positive");

    std::vector<double> sigma;
    for (const auto& p : points)
        sigma.push_back(sigma_h_closed_form(p.N, p.L));
    const auto [lo, hi] = std::minmax_element(sigma.begin(), sigma.end());
    if (*hi - *lo <= 1e-12 * std::max(std::abs(*hi), 1.0))
        throw NumericalError("fit_fom: degenerate design, all sigma_H values are equal");

    // minimise sum (w_i - w_u - w_u xi s_i)^2 over xi
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        num += sigma[i] * (points[i].w - w_u);
        den += sigma[i] * sigma[i];
    }
    FomFit fit;
    fit.w_u = w_u;
    fit.xi = num / (w_u * den);
    for (std::size_t i = 0; i < points.size(); ++i)
        fit.residuals.push_back(points[i].w - w_u * (1.0 + fit.xi * sigma[i]));
    return fit;
}

void write_correlation_csv(const std::vector<double>& lags, const std::vector<double>& abs_h,
                           const std::filesystem::path& path)
{
    CsvWriter csv(path, {"lag", "abs_H", "log10_abs_H"});
    for (std::size_t i = 0; i < lags.size(); ++i) {
        const double lg = abs_h[i] > 0.0 ? std::log10(abs_h[i])
                                         : -std::numeric_limits<double>::infinity();
        csv.row(lags[i], abs_h[i], lg);
    }
}

}  // namespace cse
