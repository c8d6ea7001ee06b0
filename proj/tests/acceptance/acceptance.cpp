// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
//
//   cse_acceptance            all criteria
//   cse_acceptance 1 2 10     a subset

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "cse/coherence.hpp"
#include "cse/config.hpp"
#include "cse/coupling.hpp"
#include "cse/ensemble.hpp"
#include "cse/evolution.hpp"
#include "cse/experiment.hpp"
#include "cse/radiation.hpp"
#include "support/ode_oracle.hpp"

using namespace cse;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int prec = 4)
{
    std::ostringstream o;
    o.precision(prec);
    o << v;
    return o.str();
}

// Reference configuration shared by the ensemble criteria. The grid spans
// only the +-10 analysis window: samples outside it never enter H.
RunConfig reference(std::size_t N, double Lx, double Ly, double Lz, std::vector<double> times)
{
    RunConfig c;
    c.scenario = Scenario::CoherenceVsTime;
    c.cloud.N = N;
    c.cloud.Lx = Lx;
    c.cloud.Ly = Ly;
    c.cloud.Lz = Lz;
    c.times = std::move(times);
    c.grid.z_obs = 100.0;
    c.grid.x_span = c.grid.y_span = 10.0;
    c.grid.spacing = 0.25;
    c.window = 10.0;
    c.t_fit = 40.0;
    c.instances = 20;
    c.base_seed = 1;
    c.threads = 1;
    return c;
}

ExperimentResult timed_run(const RunConfig& c, const std::string& label)
{
    const auto start = Clock::now();
    ExperimentResult r = run_experiment(c);
    std::clog << "[acceptance] " << label << ": " << r.completed << "/" << r.records.size()
              << " instances in "
              << fmt(std::chrono::duration<double>(Clock::now() - start).count(), 3) << " s\n";
    return r;
}

double mean_w(const ExperimentResult& r, double t)
{
    return r.width_at(t).mean;
}

std::string width_note(const ExperimentResult& r, double t)
{
    const WidthStats& w = r.width_at(t);
    std::string s = fmt(w.mean) + "+-" + fmt(w.std, 2);
    if (w.saturated)
        s += " (" + std::to_string(w.saturated) + " saturated)";
    return s;
}

// The symmetric 40^3, N = 1500 experiment feeds several criteria.
class Shared {
public:
    const ExperimentResult& symmetric()
    {
        if (!symmetric_)
            symmetric_ = timed_run(reference(1500, 40, 40, 40, {0, 10, 20, 30, 40, 50}),
                                   "40^3 N=1500");
        return *symmetric_;
    }

private:
    std::optional<ExperimentResult> symmetric_;
};

// 1. Dicke pair.
Outcome dicke_pair()
{
    AtomPositions atoms{{Vec3(0, 0, 0), Vec3(1e-4, 0, 0)}};
    const auto ex = assemble_exchange(atoms, Vec3::UnitY());
    auto eig = std::make_shared<const Eigensystem>(decompose(ex));
    const double s = 1.0 / std::sqrt(2.0);
    const Propagator sym(eig, Amplitudes{Eigen::VectorXcd{{s, s}}, 0.0});
    const Propagator anti(eig, Amplitudes{Eigen::VectorXcd{{s, -s}}, 0.0});
    const auto stats = spectrum(*eig, 1e-4);

    const double d_sym = std::abs(sym.norm(1.0) - std::exp(-2.0));
    const double d_anti = std::abs(anti.norm(1.0) - 1.0);
    const double d_rates = std::max(std::abs(stats.rates[0]), std::abs(stats.rates[1] - 2.0));
    const double worst = std::max({d_sym, d_anti, d_rates});
    return {worst <= 1e-6, "max deviation " + fmt(worst, 3) + " (sym " + fmt(d_sym, 3) +
                               ", anti " + fmt(d_anti, 3) + ", rates " + fmt(d_rates, 3) + ")"};
}

// 2. Spectral propagator against the step integrator.
Outcome propagator_equivalence()
{
    CloudSpec spec;
    spec.N = 50;
    spec.Lx = spec.Ly = spec.Lz = 12.8;
    double worst = 0.0;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        spec.seed = seed;
        const auto atoms = sample_cloud(spec);
        const auto ex = assemble_exchange(atoms, spec.dipole_axis);
        const auto c0 = initial_amplitudes(atoms, spec.laser_axis);
        const auto spectral = propagate(ex, c0, {40.0})[0];
        const auto ode = testing::propagate_ode_oracle(ex, c0, 40.0, 0.002);
        worst = std::max(worst, (spectral.c - ode.c).cwiseAbs().maxCoeff());
    }
    return {worst <= 1e-6, "max |c_spectral - c_ode| at 40 tau = " + fmt(worst, 3) + " (3 clouds)"};
}

// 3. Rates non-negative and summing to N.
Outcome physicality(Shared& shared)
{
    const auto& r = shared.symmetric();
    const double N = 1500.0;
    double min_rate = INFINITY, worst_sum = 0.0;
    for (const auto& rec : r.records) {
        if (!rec.ok)
            return {false, "instance " + std::to_string(rec.index) + " failed: " + rec.error};
        min_rate = std::min(min_rate, rec.spectrum.rates.front());
        const double sum = std::accumulate(rec.spectrum.rates.begin(), rec.spectrum.rates.end(), 0.0);
        worst_sum = std::max(worst_sum, std::abs(sum - N));
    }
    const bool ok = r.completed == 20 && min_rate >= -1e-8 * N && worst_sum <= 1e-8 * N;
    return {ok, "min rate " + fmt(min_rate, 3) + ", max |sum - N| " + fmt(worst_sum, 3) +
                    " over " + std::to_string(r.completed) + " instances"};
}

// 4. Subradiant slowdown.
Outcome subradiant_slowdown(Shared& shared)
{
    const auto& r = shared.symmetric();
    int above = 0, slow = 0;
    for (const auto& rec : r.records) {
        if (!rec.ok)
            continue;
        const auto& tt = rec.norms.times;
        const auto& nn = rec.norms.norms;
        bool all_above = true;
        double n39 = 0, n41 = 0;
        for (std::size_t i = 0; i < tt.size(); ++i) {
            if (tt[i] >= 10.0 - 1e-9 && tt[i] <= 40.0 + 1e-9 && nn[i] < std::exp(-tt[i]))
                all_above = false;
            if (std::abs(tt[i] - 39.0) < 1e-9)
                n39 = nn[i];
            if (std::abs(tt[i] - 41.0) < 1e-9)
                n41 = nn[i];
        }
        const double rate40 = -(std::log(n41) - std::log(n39)) / 2.0;
        above += all_above;
        slow += rate40 < 1.0;
    }
    return {above >= 18 && slow >= 18, "norm >= e^-t on [10,40]: " + std::to_string(above) +
                                           "/20, rate(40) < Gamma: " + std::to_string(slow) + "/20"};
}

// 5. Coherence growth and plateau.
Outcome coherence_growth(Shared& shared)
{
    const auto& r = shared.symmetric();
    const double w0 = mean_w(r, 0), w10 = mean_w(r, 10), w40 = mean_w(r, 40), w50 = mean_w(r, 50);
    const bool a = w10 < 1.3 * w0;
    const bool b = w40 > 2.0 * w0;
    const bool c = std::abs(w50 - w40) < 0.15 * w40;
    std::string d = "w(0)=" + width_note(r, 0) + " w(10)=" + width_note(r, 10) + " w(20)=" +
                    width_note(r, 20) + " w(30)=" + width_note(r, 30) + " w(40)=" +
                    width_note(r, 40) + " w(50)=" + width_note(r, 50) + "; w10/w0=" +
                    fmt(w10 / w0, 3) + " w40/w0=" + fmt(w40 / w0, 3) +
                    " |w50-w40|/w40=" + fmt(std::abs(w50 - w40) / w40, 3);
    return {a && b && c, d};
}

// 6. Non-monotone w(N) in a fixed box.
Outcome nonmonotone_n(Shared& shared)
{
    const auto r200 = timed_run(reference(200, 40, 40, 40, {0, 40}), "40^3 N=200");
    const auto r3000 = timed_run(reference(3000, 40, 40, 40, {0, 40}), "40^3 N=3000");
    const double w200 = mean_w(r200, 40), w1500 = mean_w(shared.symmetric(), 40),
                 w3000 = mean_w(r3000, 40);
    return {w1500 > w200 && w1500 >= w3000,
            "w(40): N=200 " + width_note(r200, 40) + ", N=1500 " +
                width_note(shared.symmetric(), 40) + ", N=3000 " + width_note(r3000, 40)};
}

// 7. Figure-of-merit fit at fixed density.
Outcome fom_fit()
{
    RunConfig base = reference(1500, 40, 40, 40, {0, 40});
    base.scenario = Scenario::FomSweep;
    // sweep_density keeps the 40^3, N = 1500 reference density (0.0234).
    const std::vector<double> Ns{50, 100, 200, 500, 1000, 1500, 2000, 3000, 4000};
    base.sweep_values = Ns;
    const auto start = Clock::now();
    const SweepResult s = sweep(base, Ns);
    std::clog << "[acceptance] fom sweep in "
              << fmt(std::chrono::duration<double>(Clock::now() - start).count(), 3) << " s\n";
    if (!s.fit)
        return {false, "fit not available (fewer than three usable points)"};

    // Residuals grow at high N: the mean |residual| of the two largest
    // usable N exceeds the mean |residual| of the others.
    std::vector<double> res = s.fit->residuals;
    std::string table;
    std::size_t u = 0;
    for (std::size_t i = 0; i < s.fom_points.size(); ++i) {
        table += " N=" + fmt(s.fom_points[i].N) + ":w0=" +
                 fmt(s.points[i].result.width_at(0).mean, 3) + ",w=" + fmt(s.fom_points[i].w, 3);
        if (s.fom_used[i])
            table += ",r=" + fmt(res[u++], 2);
        else
            table += ",unused";
    }
    bool grows = false;
    if (res.size() >= 4) {
        const std::size_t m = res.size();
        const double hi = (std::abs(res[m - 1]) + std::abs(res[m - 2])) / 2.0;
        double lo = 0.0;
        for (std::size_t i = 0; i + 2 < m; ++i)
            lo += std::abs(res[i]);
        lo /= static_cast<double>(m - 2);
        grows = hi > lo;
        table += "; mean|r| top two " + fmt(hi, 3) + " vs rest " + fmt(lo, 3);
    }
    const double xi = s.fit->xi;
    return {xi >= 0.30 && xi <= 0.60 && grows,
            "xi=" + fmt(xi, 4) + " w_u=" + fmt(s.fit->w_u, 4) + ";" + table};
}

// 8. Elongated clouds against the symmetric one.
Outcome asymmetric(Shared& shared)
{
    const auto rx = timed_run(reference(1500, 80, 40, 20, {0, 40}), "80x40x20 N=1500");
    const auto rz = timed_run(reference(1500, 20, 40, 80, {0, 40}), "20x40x80 N=1500");
    const double ws = mean_w(shared.symmetric(), 40);
    const double lower = 1.0 - mean_w(rx, 40) / ws;
    const double higher = mean_w(rz, 40) / ws - 1.0;
    const bool ok = lower >= 0.10 && lower <= 0.40 && higher >= 0.25 && higher <= 0.75;
    return {ok, "w(40): sym " + width_note(shared.symmetric(), 40) + ", x-long " +
                    width_note(rx, 40) + " (change " + fmt(-100 * lower, 3) + "%), z-long " +
                    width_note(rz, 40) + " (change " + fmt(100 * higher, 3) + "%); w(0): sym " +
                    width_note(shared.symmetric(), 0) + ", x-long " + width_note(rx, 0) +
                    ", z-long " + width_note(rz, 0)};
}

// 9. Sample eigenvalue std doubles with N at fixed L.
Outcome spectral_scaling(Shared& shared)
{
    auto sample_std = [](const std::vector<double>& b) {
        const double m = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(b.size());
        double ss = 0.0;
        for (double x : b)
            ss += (x - m) * (x - m);
        return std::sqrt(ss / static_cast<double>(b.size() - 1));
    };
    double s750 = 0.0, s1500 = 0.0;
    CloudSpec spec;
    spec.N = 750;
    for (std::uint64_t i = 0; i < 10; ++i) {
        spec.seed = 1 + i;
        s750 += sample_std(spectrum(assemble_exchange(sample_cloud(spec), spec.dipole_axis), 40).betas);
        s1500 += sample_std(shared.symmetric().records[i].spectrum.betas);
    }
    s750 /= 10;
    s1500 /= 10;
    const double ratio = s1500 / s750;
    return {std::abs(ratio - 2.0) <= 0.2 * 2.0,
            "std(750)=" + fmt(s750) + " std(1500)=" + fmt(s1500) + " ratio=" + fmt(ratio) +
                " (closed form " + fmt(sigma_h_closed_form(1500, 40)) + ")"};
}

// 10. Correlation analytics.
Outcome correlation_suite()
{
    const double s = 0.25;
    std::vector<std::string> notes;
    bool ok = true;

    auto uniform_map = [&](double span, const std::function<std::complex<double>(double, double)>& f) {
        FieldMap m;
        m.grid.x_span = m.grid.y_span = span;
        m.grid.spacing = s;
        m.E.assign(m.grid.nx() * m.grid.ny(), CVec3::Zero());
        for (std::size_t j = 0; j < m.grid.ny(); ++j)
            for (std::size_t i = 0; i < m.grid.nx(); ++i)
                m.at(i, j) = CVec3(0, f(m.grid.x(i), m.grid.y(j)), 0);
        return m;
    };

    // Triangle: constant field over the window of width X.
    const auto flat = uniform_map(10.0, [](double, double) { return 1.0; });
    const double X = static_cast<double>(flat.grid.nx()) * s;
    const double wt = coherence_width(cross_correlation(flat, Axis::X, 10.0)).w;
    ok = ok && std::abs(wt - 0.8647 * X) <= s;
    notes.push_back("triangle w=" + fmt(wt, 5) + " vs 0.8647X=" + fmt(0.8647 * X, 5));

    // Gaussian |H| = exp(-2 x^2 / w0^2), sampled directly and produced by a field.
    for (double w0 : {1.0, 2.5, 4.0}) {
        CorrelationProfile p;
        p.spacing = s;
        for (int k = -80; k <= 80; ++k) {
            p.lags.push_back(k * s);
            p.H.emplace_back(std::exp(-2.0 * (k * s) * (k * s) / (w0 * w0)), 0.0);
        }
        const double wp = coherence_width(p).w;
        const auto g = uniform_map(10.0, [&](double x, double) { return std::exp(-4.0 * x * x / (w0 * w0)); });
        const double wf = coherence_width(cross_correlation(g, Axis::X, 10.0)).w;
        ok = ok && std::abs(wp - w0) <= s && std::abs(wf - w0) <= s;
        notes.push_back("gauss w0=" + fmt(w0) + ": profile " + fmt(wp, 5) + ", field " + fmt(wf, 5));
    }

    // Invariances on a speckle-like field from a real cloud.
    CloudSpec spec;
    spec.N = 300;
    spec.seed = 5;
    const auto atoms = sample_cloud(spec);
    ObservationGrid grid;
    grid.x_span = grid.y_span = 10.0;
    const auto base = field_map(atoms, initial_amplitudes(atoms, spec.laser_axis), spec.dipole_axis, grid);
    const double w_base = coherence_width(cross_correlation(base, Axis::X, 10.0)).w;
    bool inv = true;
    for (std::complex<double> factor : {std::complex<double>(2.0, 0.0), std::complex<double>(0.0, 1.0),
                                        std::complex<double>(-1.0, 0.0), std::complex<double>(0.5, 0.0)}) {
        FieldMap m = base;
        for (auto& e : m.E)
            e *= factor;
        inv = inv && coherence_width(cross_correlation(m, Axis::X, 10.0)).w == w_base;
    }
    double generic_dev = 0.0;
    for (double phi : {0.3, 1.1, 2.7}) {
        FieldMap m = base;
        for (auto& e : m.E)
            e *= 3.7 * std::polar(1.0, phi);
        generic_dev = std::max(generic_dev,
                               std::abs(coherence_width(cross_correlation(m, Axis::X, 10.0)).w - w_base));
    }
    inv = inv && generic_dev <= 1e-12 * w_base;
    ok = ok && inv;
    notes.push_back("invariance: exact for x2, xi, x-1, x0.5; generic phase/scale dev " +
                    fmt(generic_dev, 3));

    std::string d;
    for (const auto& n : notes)
        d += (d.empty() ? "" : "; ") + n;
    return {ok, d};
}

}  // namespace

int main(int argc, char** argv)
{
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i)
        wanted.insert(std::atoi(argv[i]));
    auto want = [&](int k) { return wanted.empty() || wanted.count(k); };

    Shared shared;
    const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria{
        {1, {"Dicke pair", dicke_pair}},
        {2, {"propagator vs integrator", propagator_equivalence}},
        {3, {"physicality", [&] { return physicality(shared); }}},
        {4, {"subradiant slowdown", [&] { return subradiant_slowdown(shared); }}},
        {5, {"coherence growth and plateau", [&] { return coherence_growth(shared); }}},
        {6, {"non-monotone w(N)", [&] { return nonmonotone_n(shared); }}},
        {7, {"figure-of-merit fit", fom_fit}},
        {8, {"asymmetric clouds", [&] { return asymmetric(shared); }}},
        {9, {"spectral-width scaling", [&] { return spectral_scaling(shared); }}},
        {10, {"correlation analytics", correlation_suite}},
    };

    int failures = 0;
    for (const auto& [k, entry] : criteria) {
        if (!want(k))
            continue;
        const auto start = Clock::now();
        Outcome o;
        try {
            o = entry.second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(Clock::now() - start).count();
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << k << " (" << entry.first
                  << ", " << fmt(secs, 3) << " s): " << o.detail << std::endl;
    }
    return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
