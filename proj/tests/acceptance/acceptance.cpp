// End-to-end acceptance run on the committed benchmark configs. Prints one
// PASS/FAIL line per criterion and exits nonzero if any fails.

#include "rydbist/analysis.hpp"
#include "rydbist/cli.hpp"
#include "rydbist/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace rydbist;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = std::string(RYDBIST_SOURCE_DIR) + "/configs/";

struct Outcome {
    bool passed = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            passed = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double mhz(double angular) { return angular_to_mhz(angular); }

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cli(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    if (code != 0)
        std::cerr << "cli failed (" << code << "): " << err.str();
    return code;
}

ModelConfig bare()
{
    ModelConfig c;
    c.drive = {};
    return c;
}

// Full width at half of (max - min) around the global maximum.
double half_width(const Spectrum& s)
{
    const auto& t = s.transmission;
    const std::size_t k = std::max_element(t.begin(), t.end()) - t.begin();
    const double half = 0.5 * (t[k] + *std::min_element(t.begin(), t.end()));
    std::size_t l = k, r = k;
    while (l > 0 && t[l] > half)
        --l;
    while (r + 1 < t.size() && t[r] > half)
        ++r;
    auto cross = [&](std::size_t a, std::size_t b) {
        return s.delta_c[a] + (half - t[a]) * (s.delta_c[b] - s.delta_c[a]) / (t[b] - t[a]);
    };
    return cross(r - 1, r) - cross(l, l + 1);
}

// ---------------------------------------------------------------------------

void analytic_oracles(Outcome& o)
{
    {
        ModelConfig c = bare();
        c.decay.dephasing_gi = 0.0;
        c.drive.omega_p = c.decay.gamma_i;
        const double r = std::abs(Medium(c).averaged_state(0.0, 0.0).population(kI) - 1.0 / 3.0);
        o.detail << "two-level |rho_ii - 1/3| = " << r;
        o.require(r < 1e-10, "two-level steady state");
    }
    {
        ModelConfig c = bare();
        c.decay.gamma_r1 = 0.0;
        c.decay.dephasing_gr1 = 0.0;
        c.drive.omega_p = mhz_to_angular(2.0);
        c.drive.omega_c = mhz_to_angular(8.0);
        const double im = std::abs(Medium(c).observe(0.0, 0.0).probe_coherence.imag());
        o.detail << "; ideal EIT |Im rho_ig| = " << im;
        o.require(im < 1e-6, "ideal EIT transparency");
    }
    {
        ModelConfig c = bare();
        c.drive.omega_p = mhz_to_angular(0.5);
        c.drive.omega_c = mhz_to_angular(2.0);
        const auto grid = make_grid(mhz_to_angular(-30.0), mhz_to_angular(30.0), 1201);
        const double width = mhz(half_width(sweep_spectrum(c, grid, ScanDirection::forward)));
        std::vector<double> om, sep;
        double worst = 0.0;
        for (double w = 5.0; w <= 40.0; w += 5.0) {
            c.drive.omega_mw = mhz_to_angular(w);
            const PeakSet p = find_peaks(sweep_spectrum(c, grid, ScanDirection::forward), 0.01);
            if (p.size() != 2) {
                o.require(false, "two AT peaks at omega_mw = " + std::to_string(w));
                continue;
            }
            const double s = mhz(p.peaks[1].position - p.peaks[0].position);
            om.push_back(w);
            sep.push_back(s);
            worst = std::max(worst, std::abs(s / w - 1.0));
        }
        o.detail << "; AT separation max rel err = " << worst;
        o.require(worst < 0.05, "AT separation within 5%");
        if (om.size() >= 3) {
            const LinearFit f = fit_linear(om, sep);
            o.detail << ", law slope " << f.slope << " intercept " << f.intercept << " MHz (EIT FWHM " << width
                     << " MHz)";
            o.require(std::abs(f.slope - 1.0) <= 0.05, "AT law slope 1 +- 0.05");
            o.require(std::abs(f.intercept) < width, "AT law intercept below linewidth");
        }
    }
}

void no_feedback_identity(Outcome& o)
{
    RunConfig rc = load_config(kConfigs + "benchmark.conf");
    rc.model.mean_field.shift = 0.0;
    rc.model.mean_field.broadening = 0.0;
    const auto grid = make_grid(rc.scan);
    const HysteresisPair pair = hysteresis_pair(rc.model, grid, rc.solver);
    double worst = 0.0;
    for (double d : pair.difference())
        worst = std::max(worst, std::abs(d));
    o.detail << grid.size() << "-point scan, max |T_fwd - T_bwd| = " << worst;
    o.require(grid.size() == 401, "401-point scan");
    o.require(worst < 1e-9, "identity within 1e-9");
}

// Fold positions from the parametric fixed-point curve
// delta_c(delta) = delta - V F0(delta), F0 = interaction-free response.
std::pair<double, double> parametric_folds(const ModelConfig& benchmark)
{
    ModelConfig c0 = benchmark;
    const double V = c0.mean_field.shift;
    c0.mean_field.shift = 0.0;
    const Medium m0(c0);
    const auto deltas = make_grid(mhz_to_angular(-15.0), mhz_to_angular(10.0), 25001);
    std::vector<double> dc(deltas.size());
    for (std::size_t k = 0; k < deltas.size(); ++k)
        dc[k] = deltas[k] - V * m0.response(deltas[k], 0.0);
    double fold_hi = NAN, fold_lo = NAN;
    for (std::size_t k = 1; k + 1 < dc.size(); ++k) {
        if (dc[k] > dc[k - 1] && dc[k] >= dc[k + 1] && std::isnan(fold_hi))
            fold_hi = dc[k];
        if (dc[k] < dc[k - 1] && dc[k] <= dc[k + 1] && std::isnan(fold_lo))
            fold_lo = dc[k];
    }
    return {fold_lo, fold_hi};
}

void bistability_oracles(Outcome& o)
{
    const RunConfig rc = load_config(kConfigs + "benchmark.conf");
    const Medium medium(rc.model, rc.solver);
    const auto grid = make_grid(rc.scan);
    const double h = grid[1] - grid[0];

    const auto [fold_lo, fold_hi] = parametric_folds(rc.model);
    o.detail << "parametric folds [" << mhz(fold_lo) << ", " << mhz(fold_hi) << "] MHz";
    o.require(fold_lo < fold_hi, "two folds on the fixed-point curve");

    // Root counts on the scan grid: 3 (stable/unstable/stable) inside the
    // fold window, 1 outside.
    int three = 0, mismatched = 0;
    double scan_lo = NAN, scan_hi = NAN;
    for (double dc : grid) {
        const FixedPointSet s = self_consistent_roots(medium, dc);
        const bool inside = dc > fold_lo && dc < fold_hi;
        if (s.size() == 3) {
            ++three;
            if (std::isnan(scan_lo))
                scan_lo = dc;
            scan_hi = dc;
            const bool pattern = s.points[0].stability == Stability::stable &&
                                 s.points[1].stability == Stability::unstable &&
                                 s.points[2].stability == Stability::stable;
            if (!pattern)
                ++mismatched;
        }
        if (inside != (s.size() == 3) || (s.size() != 1 && s.size() != 3))
            ++mismatched;
    }
    o.detail << "; " << three << " grid points with 3 roots [" << mhz(scan_lo) << ", " << mhz(scan_hi) << "]";
    o.require(three > 0, "nonempty 3-root window");
    o.require(mismatched == 0, "root count and stability pattern match the fold window");

    // Fine root-scan fold oracle near each parametric fold.
    auto root_scan_fold = [&](double guess, bool lower) {
        const auto fine = make_grid(guess - 2 * h, guess + 2 * h, 201);
        double last = NAN;
        for (double dc : fine) {
            std::size_t n = 0;
            try {
                n = self_consistent_roots(medium, dc).size();
            } catch (const RootScanInconclusive&) {
                continue;
            }
            if (lower && n == 3 && std::isnan(last))
                last = dc;
            if (!lower && n == 3)
                last = dc;
        }
        return last;
    };
    const double rs_lo = root_scan_fold(fold_lo, true);
    const double rs_hi = root_scan_fold(fold_hi, false);
    o.detail << "; root-scan folds [" << mhz(rs_lo) << ", " << mhz(rs_hi) << "]";
    o.require(std::abs(rs_lo - fold_lo) < 0.1 * h && std::abs(rs_hi - fold_hi) < 0.1 * h,
              "root-scan folds agree with the parametric curve");

    // Time evolution from two seeds inside the window.
    ModelConfig c = rc.model;
    c.drive.delta_c = 0.5 * (fold_lo + fold_hi);
    const FixedPointSet roots = self_consistent_roots(medium, c.drive.delta_c);
    if (roots.size() == 3) {
        TimeEvolveOptions opts;
        opts.record_every = 100000;
        const double x_low = time_evolve(c, DensityMatrix::pure(kG), 40.0, 5e-4, opts).final_fraction();
        const double x_high = time_evolve(c, DensityMatrix::pure(kR1), 40.0, 5e-4, opts).final_fraction();
        const double e_low = std::abs(x_low - roots.points[0].x);
        const double e_high = std::abs(x_high - roots.points[2].x);
        o.detail << "; time evolution |dx| = " << e_low << ", " << e_high;
        o.require(e_low < 1e-5 && e_high < 1e-5, "time evolution reaches both stable roots");
    } else {
        o.require(false, "3 roots at the window center");
    }

    const BistableRegion region = bistable_region(hysteresis_pair(medium, grid), rc.analysis.region_threshold);
    if (region.intervals.size() == 1) {
        const Interval iv = region.intervals.front();
        o.detail << "; hysteresis [" << mhz(iv.lo) << ", " << mhz(iv.hi) << "]";
        o.require(std::abs(iv.lo - rs_lo) <= h && std::abs(iv.hi - rs_hi) <= h,
                  "hysteresis endpoints within one grid step of the folds");
    } else {
        o.require(false, "single hysteresis interval");
    }
}

void threshold_broadening(Outcome& o)
{
    const RunConfig rc = load_config(kConfigs + "benchmark.conf");
    const auto grid = make_grid(rc.scan);
    const ControlAxis axis = ControlAxis::parse("omega_p:1:8:40");
    const PhaseDiagram d = phase_diagram(rc.model, axis, grid, rc.solver);

    std::vector<bool> nonempty;
    std::vector<double> width;
    double quiet = 0.0;
    for (std::size_t r = 0; r < axis.values.size(); ++r) {
        o.require(d.row_valid(r), "row " + std::to_string(r) + " valid");
        if (!d.row_valid(r))
            return;
        const BistableRegion b = bistable_region(d.delta_c, d.difference[r], rc.analysis.region_threshold);
        nonempty.push_back(!b.empty());
        double w = 0.0;
        for (const auto& iv : b.intervals)
            w += iv.hi - iv.lo;
        width.push_back(w);
        if (b.empty())
            for (double v : d.difference[r])
                quiet = std::max(quiet, std::abs(v));
    }
    const auto first = std::find(nonempty.begin(), nonempty.end(), true);
    const std::size_t t = first - nonempty.begin();
    const bool contiguous = first != nonempty.end() && std::all_of(first, nonempty.end(), [](bool b) { return b; }) &&
                            t > 0;
    o.detail << "threshold omega_p = " << (t < nonempty.size() ? mhz(axis.values[t]) : NAN) << " MHz ("
             << nonempty.size() - t << "/" << nonempty.size() << " rows bistable)";
    o.detail << "; max |dT| below threshold " << quiet;
    o.require(contiguous, "single contiguous band above a unique threshold");
    o.require(quiet < 1e-6, "rows below threshold have no hysteresis");
    bool widening = true;
    for (std::size_t r = t + 1; r < width.size(); ++r)
        widening = widening && width[r] >= width[r - 1];
    o.require(widening, "band width nondecreasing in omega_p");

    // Backward-scan peak against the interaction-free line at the same probe.
    std::vector<double> x, y;
    for (std::size_t r = t; r < axis.values.size(); ++r) {
        ModelConfig ref = axis.apply(rc.model, axis.values[r]);
        ref.mean_field.shift = 0.0;
        const Spectrum reference = sweep_spectrum(ref, grid, ScanDirection::forward, rc.solver);
        x.push_back(std::pow(mhz(axis.values[r]), 2));
        y.push_back(mhz(peak_shift(d.pairs[r]->backward, reference)));
    }
    if (x.size() >= 3) {
        const LinearFit f = fit_linear(x, y);
        o.detail << "; shift vs omega_p^2: slope " << f.slope << " MHz/MHz^2, R^2 = " << f.r2;
        o.require(f.r2 > 0.95, "R^2 > 0.95");
    } else {
        o.require(false, "at least 3 rows above threshold");
    }
}

struct MwSeries {
    std::vector<double> powers;
    Calibration blue, red;
};

MwSeries& mw_series()
{
    static MwSeries s = [] {
        MwSeries m;
        for (double r : {2.0, 2.5, 3.0, 3.5, 4.0})
            m.powers.push_back(r * r);
        return m;
    }();
    return s;
}

void microwave_scaling(Outcome& o)
{
    MwSeries& s = mw_series();
    for (auto [file, cal] : {std::pair{"mw_blue_300.conf", &s.blue}, std::pair{"mw_red_300.conf", &s.red}}) {
        const RunConfig rc = load_config(kConfigs + file);
        const auto t0 = std::chrono::steady_clock::now();
        *cal = calibrate_electrometer(rc.model, s.powers, make_grid(rc.scan), rc.solver,
                                      rc.analysis.region_threshold);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.detail << file << ": slope " << cal->fit.slope << " MHz/sqrt(mW), R^2 = " << cal->fit.r2 << " (" << secs
                 << " s); ";
        o.require(cal->fit.r2 > 0.9, std::string(file) + " R^2 > 0.9");
        o.require(secs < 300.0, std::string(file) + " under 5 min");
        o.require(cal->detuning_sign * cal->fit.slope > 0, std::string(file) + " slope follows detuning sign");
    }
    o.require(s.blue.fit.slope * s.red.fit.slope < 0, "opposite slope signs");
}

void far_detuned_robustness(Outcome& o)
{
    const RunConfig far = load_config(kConfigs + "far_detuned_1500.conf");
    const auto grid = make_grid(far.scan);
    const double h = grid[1] - grid[0];
    const std::vector<double> powers{0.001, 0.002, 0.003, 0.004, 0.005};

    for (double sign : {+1.0, -1.0}) {
        ModelConfig base = far.model;
        base.drive.delta_mw = sign * std::abs(far.model.drive.delta_mw);
        const double dmw = base.drive.delta_mw;

        // bistable-region center at zero and finite power
        ModelConfig zero = base;
        zero.drive.omega_mw = 0.0;
        const auto c0 = bistable_region(hysteresis_pair(zero, grid, far.solver), far.analysis.region_threshold);
        double drift = 0.0;
        for (double p : powers) {
            ModelConfig c = base;
            c.drive.omega_mw = rabi_from_power(p, c.microwave.kappa);
            const auto b = bistable_region(hysteresis_pair(c, grid, far.solver), far.analysis.region_threshold);
            if (!b.red_center || !c0.red_center) {
                o.require(false, "bistable region present");
                return;
            }
            drift = std::max(drift, std::abs(*b.red_center - *c0.red_center));
        }

        // EIT line of the same medium with the probe below threshold, on a
        // fine local grid around its maximum.
        ModelConfig line = zero;
        line.drive.omega_p = mhz_to_angular(3.24);
        const double p0 = peak_position(sweep_spectrum(line, grid, ScanDirection::forward, far.solver));
        const auto fine = make_grid(p0 - mhz_to_angular(2.0), p0 + mhz_to_angular(2.0), 801);
        const Spectrum ref = sweep_spectrum(line, fine, ScanDirection::forward, far.solver);
        std::vector<double> shifts, worst_rel;
        double worst = 0.0;
        for (double p : powers) {
            ModelConfig c = line;
            c.drive.omega_mw = rabi_from_power(p, c.microwave.kappa);
            const double shift = peak_shift(sweep_spectrum(c, fine, ScanDirection::forward, far.solver), ref);
            const double predicted = ac_stark_prediction(c.drive.omega_mw, dmw);
            shifts.push_back(mhz(shift));
            worst = std::max(worst, std::abs(shift / predicted - 1.0));
        }
        const LinearFit f = fit_linear(powers, shifts);
        const double rigid = ac_stark_prediction(rabi_from_power(powers.back(), base.microwave.kappa), dmw);
        o.detail << "delta_mw " << mhz(dmw) << " MHz: center drift " << mhz(drift) << " MHz (grid " << mhz(h)
                 << ", light shift " << mhz(rigid) << "), peak shift at " << powers.back() << " mW = " << shifts.back() << " MHz, max rel dev "
                 << worst << ", shift-vs-P R^2 = " << f.r2 << "; ";
        o.require(drift < h, "center drift below one grid step");
        o.require(worst < 0.10, "peak shift within 10% of omega^2/(4 delta)");
        o.require(f.r2 > 0.99, "shift vs P R^2 > 0.99");
    }
}

void gradient_trend(Outcome& o)
{
    const RunConfig rc = load_config(kConfigs + "mw_blue_300.conf");
    const auto grid = make_grid(rc.scan);
    std::vector<double> root_p, grad;
    for (double p : mw_series().powers) {
        ModelConfig c = rc.model;
        c.drive.omega_mw = rabi_from_power(p, c.microwave.kappa);
        root_p.push_back(std::sqrt(p));
        grad.push_back(max_gradient(sweep_spectrum(c, grid, ScanDirection::forward, rc.solver)).gradient);
    }
    bool decreasing = true;
    for (std::size_t k = 1; k < grad.size(); ++k)
        decreasing = decreasing && grad[k] < grad[k - 1];
    const LinearFit f = fit_linear(root_p, grad);
    o.detail << "max forward gradient";
    for (double g : grad)
        o.detail << ' ' << g;
    o.detail << " per MHz; slope " << f.slope << ", R^2 = " << f.r2;
    o.require(decreasing, "monotonically decreasing");
    o.require(f.r2 > 0.8, "R^2 > 0.8");
}

void electrometry_roundtrip(Outcome& o)
{
    MwSeries& s = mw_series();
    for (auto [file, cal] : {std::pair{"mw_blue_300.conf", &s.blue}, std::pair{"mw_red_300.conf", &s.red}}) {
        if (cal->fit.n < 3) {
            o.require(false, std::string(file) + " calibration available");
            continue;
        }
        const RunConfig rc = load_config(kConfigs + file);
        const auto grid = make_grid(rc.scan);
        double worst = 0.0;
        for (double p : s.powers) {
            ModelConfig c = rc.model;
            c.drive.omega_mw = rabi_from_power(p, c.microwave.kappa);
            const auto center = region_center_mhz(c, grid, rc.solver, rc.analysis.region_threshold);
            if (!center) {
                o.require(false, "bistable region at " + std::to_string(p) + " mW");
                continue;
            }
            const PowerEstimate e = estimate_mw_power(cal->fit, *center);
            worst = std::max(worst, std::abs(e.power_mw - p) / p);
        }
        o.detail << file << ": max |P_est - P|/P = " << worst << "; ";
        o.require(worst < 0.05, std::string(file) + " round trip within 5%");
    }
}

void determinism_replay(Outcome& o)
{
    const fs::path dir = fs::temp_directory_path() / ("rydbist-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string bench = kConfigs + "benchmark.conf";
    auto p = [&](const char* name) { return (dir / name).string(); };

    bool ok = true;
    ok &= cli({"spectrum", "-c", bench, "--direction", "backward", "-o", p("b1.csv")}) == 0;
    ok &= cli({"spectrum", "-c", bench, "--direction", "backward", "-o", p("b2.csv")}) == 0;
    const bool spectra_same = ok && slurp(p("b1.csv")) == slurp(p("b2.csv"));

    ok &= cli({"phasemap", "-c", bench, "--axis", "omega_p:3:7:5", "--points", "101", "-o", p("m1.csv")}) == 0;
    ok &= cli({"phasemap", "-c", bench, "--axis", "omega_p:3:7:5", "--points", "101", "-j", "3", "-o",
               p("m2.csv")}) == 0;
    const bool maps_same = ok && slurp(p("m1.csv")) == slurp(p("m2.csv"));

    ok &= cli({"spectrum", "-c", bench, "--direction", "forward", "-o", p("f.csv"), "--svg", p("f.svg"),
               "--manifest", p("f.json")}) == 0;
    const int replay_spectrum = cli({"replay", p("f.json"), "--output-dir", p("replay_f")});
    ok &= cli({"phasemap", "-c", bench, "--axis", "omega_p:3:7:5", "--points", "101", "-o", p("m.csv"),
               "--manifest", p("m.json")}) == 0;
    const int replay_map = cli({"replay", p("m.json"), "--output-dir", p("replay_m")});

    o.detail << "repeated spectrum " << (spectra_same ? "identical" : "DIFFERS") << ", phasemap jobs 1 vs 3 "
             << (maps_same ? "identical" : "DIFFERS") << ", replay spectrum exit " << replay_spectrum
             << ", replay phasemap exit " << replay_map;
    o.require(ok, "CLI runs succeed");
    o.require(spectra_same && maps_same, "byte-identical repeated outputs");
    o.require(replay_spectrum == 0 && replay_map == 0, "manifest replay reproduces outputs");
    fs::remove_all(dir);
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::string> only(argv + 1, argv + argc);
    struct Criterion {
        const char* name;
        double limit_s;
        std::function<void(Outcome&)> run;
    };
    const std::vector<Criterion> criteria{
        {"analytic_oracles", 10, analytic_oracles},
        {"no_feedback_identity", 5, no_feedback_identity},
        {"bistability_oracles", 60, bistability_oracles},
        {"threshold_broadening", 300, threshold_broadening},
        {"microwave_scaling", 600, microwave_scaling},
        {"far_detuned_robustness", 300, far_detuned_robustness},
        {"gradient_trend", 300, gradient_trend},
        {"electrometry_roundtrip", 600, electrometry_roundtrip},
        {"determinism_replay", 60, determinism_replay},
    };
    int failed = 0;
    int ran = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end())
            continue;
        ++ran;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.passed = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.limit_s) {
            o.passed = false;
            o.detail << " [over time budget " << c.limit_s << " s]";
        }
        std::printf("%s %-24s %7.2f s  %s\n", o.passed ? "PASS" : "FAIL", c.name, secs, o.detail.str().c_str());
        std::fflush(stdout);
        failed += o.passed ? 0 : 1;
    }
    std::printf("%d/%d criteria passed\n", ran - failed, ran);
    return failed == 0 ? 0 : 1;
}
