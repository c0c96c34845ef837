#include "rydbist/selfcheck.hpp"

#include "rydbist/analysis.hpp"
#include "rydbist/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rydbist {

namespace {

double parse_tolerance(const std::string& text)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("RYDBIST_TOL: '" + text + "' is not a number");
    }
    if (used != text.size() || !(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("RYDBIST_TOL: '" + text + "' is not a non-negative number");
    return v;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

ModelConfig bare_config()
{
    ModelConfig c;
    c.drive = {};
    c.mean_field = {};
    c.doppler.enabled = false;
    return c;
}

double two_level_residual()
{
    ModelConfig c = bare_config();
    c.decay.dephasing_gi = 0.0;
    c.drive.omega_p = c.decay.gamma_i;
    const DensityMatrix rho = Medium(c).averaged_state(0.0, 0.0);
    return std::abs(rho.population(kI) - 1.0 / 3.0);
}

double eit_residual()
{
    ModelConfig c = bare_config();
    c.decay.gamma_r1 = 0.0;
    c.decay.dephasing_gr1 = 0.0;
    c.drive.omega_p = mhz_to_angular(1.0);
    c.drive.omega_c = mhz_to_angular(5.0);
    return std::abs(Medium(c).observe(0.0, 0.0).probe_coherence.imag());
}

double at_separation_residual(std::string& detail)
{
    ModelConfig c = bare_config();
    c.drive.omega_p = mhz_to_angular(0.5);
    c.drive.omega_c = mhz_to_angular(2.0);
    const auto grid = make_grid(mhz_to_angular(-30.0), mhz_to_angular(30.0), 1201);
    double worst = 0.0;
    std::ostringstream os;
    for (double om : {5.0, 10.0, 20.0, 40.0}) {
        c.drive.omega_mw = mhz_to_angular(om);
        const PeakSet peaks = find_peaks(sweep_spectrum(c, grid, ScanDirection::forward), 0.01);
        if (peaks.size() != 2) {
            os << "omega_mw=" << om << " MHz: " << peaks.size() << " peaks; ";
            worst = std::numeric_limits<double>::infinity();
            continue;
        }
        const double sep = angular_to_mhz(peaks.peaks[1].position - peaks.peaks[0].position);
        worst = std::max(worst, std::abs(sep / om - 1.0));
    }
    detail = os.str();
    return worst;
}

double trace_residual()
{
    ModelConfig c = bare_config();
    c.drive.omega_p = mhz_to_angular(6.0);
    c.drive.omega_c = mhz_to_angular(10.0);
    c.drive.omega_mw = mhz_to_angular(5.0);
    c.drive.delta_c = mhz_to_angular(-5.0);
    c.mean_field.shift = mhz_to_angular(50.0);
    TimeEvolveOptions opts;
    opts.record_every = 10;
    const Trajectory t = time_evolve(c, DensityMatrix::pure(kG), 2.0, 1e-3, opts);
    double worst = 0.0;
    for (const auto& rho : t.states)
        worst = std::max(worst, rho.trace_error());
    return worst;
}

double no_hysteresis_residual()
{
    ModelConfig c = bare_config();
    c.drive.omega_p = mhz_to_angular(6.48);
    c.drive.omega_c = mhz_to_angular(10.0);
    const HysteresisPair pair = hysteresis_pair(c, make_grid(ScanWindow{}));
    double worst = 0.0;
    for (double d : pair.difference())
        worst = std::max(worst, std::abs(d));
    return worst;
}

} // namespace

std::map<std::string, double> default_selfcheck_tolerances()
{
    return {
        {"two_level_steady_state", 1e-10},
        {"eit_transparency", 1e-6},
        {"at_separation", 0.05},
        {"trace_conservation", 1e-9},
        {"no_feedback_hysteresis", 1e-9},
    };
}

std::map<std::string, double> apply_tolerance_override(std::map<std::string, double> tolerances,
                                                       const std::string& spec)
{
    const std::string s = trim(spec);
    if (s.empty())
        return tolerances;
    if (s.find('=') == std::string::npos) {
        const double v = parse_tolerance(s);
        for (auto& [name, tol] : tolerances)
            tol = v;
        return tolerances;
    }
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("RYDBIST_TOL: expected name=value, got '" + item + "'");
        const std::string name = trim(item.substr(0, eq));
        auto it = tolerances.find(name);
        if (it == tolerances.end())
            throw std::invalid_argument("RYDBIST_TOL: unknown check '" + name + "'");
        it->second = parse_tolerance(trim(item.substr(eq + 1)));
    }
    return tolerances;
}

std::vector<CheckResult> run_selfcheck(const std::optional<std::string>& tol_override)
{
    auto tol = default_selfcheck_tolerances();
    if (tol_override)
        tol = apply_tolerance_override(std::move(tol), *tol_override);

    std::vector<CheckResult> results;
    auto run = [&](const std::string& name, auto&& fn) {
        CheckResult r;
        r.name = name;
        r.tolerance = tol.at(name);
        try {
            r.residual = fn(r.detail);
            r.passed = r.residual <= r.tolerance;
        } catch (const std::exception& e) {
            r.residual = std::numeric_limits<double>::infinity();
            r.detail = e.what();
            r.passed = false;
        }
        results.push_back(std::move(r));
    };

    run("two_level_steady_state", [](std::string&) { return two_level_residual(); });
    run("eit_transparency", [](std::string&) { return eit_residual(); });
    run("at_separation", [](std::string& d) { return at_separation_residual(d); });
    run("trace_conservation", [](std::string&) { return trace_residual(); });
    run("no_feedback_hysteresis", [](std::string&) { return no_hysteresis_residual(); });
    return results;
}

} // namespace rydbist
