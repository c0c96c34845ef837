#include "rydbist/cli.hpp"

#include "rydbist/analysis.hpp"
#include "rydbist/errors.hpp"
#include "rydbist/output.hpp"
#include "rydbist/selfcheck.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#ifndef RYDBIST_VERSION
#define RYDBIST_VERSION "0.0.0"
#endif

namespace rydbist {

namespace {

namespace fs = std::filesystem;

// Thrown for file-level failures (exit code 1).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string fmt12(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Output target: a file, or `out` for "-".
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : path_(path)
    {
        if (path == "-") {
            os_ = &fallback;
            return;
        }
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*file_)
            throw IoError("cannot open '" + path + "' for writing");
        os_ = file_.get();
    }
    std::ostream& stream() { return *os_; }
    void close()
    {
        os_->flush();
        if (file_) {
            file_->close();
            if (!*file_)
                throw IoError("failed writing '" + path_ + "'");
        }
    }

private:
    std::string path_;
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_ = nullptr;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct ScanOverride {
    std::optional<double> start_mhz;
    std::optional<double> stop_mhz;
    std::optional<int> points;

    void add_options(CLI::App* cmd)
    {
        cmd->add_option("--start", start_mhz, "Scan start, MHz (overrides scan.start_mhz)");
        cmd->add_option("--stop", stop_mhz, "Scan stop, MHz (overrides scan.stop_mhz)");
        cmd->add_option("--points", points, "Scan points (overrides scan.points)");
    }
    void apply(RunConfig& rc) const
    {
        if (start_mhz)
            rc.scan.start = mhz_to_angular(*start_mhz);
        if (stop_mhz)
            rc.scan.stop = mhz_to_angular(*stop_mhz);
        if (points)
            rc.scan.points = *points;
        rc.validate();
    }
};

RunConfig load_run_config(const std::string& path, const ScanOverride& scan)
{
    if (!fs::exists(path))
        throw IoError("config file '" + path + "' does not exist");
    RunConfig rc = load_config(path);
    scan.apply(rc);
    return rc;
}

struct ManifestTarget {
    std::string path;
    RunManifest manifest;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    void add_output(const std::string& flag, const std::string& file)
    {
        if (!file.empty() && file != "-")
            manifest.outputs.push_back({flag, file});
    }
    void write()
    {
        if (path.empty())
            return;
        manifest.tool_version = RYDBIST_VERSION;
        manifest.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw IoError("cannot open manifest '" + path + "' for writing");
        write_manifest(os, manifest);
    }
};

// ---------------------------------------------------------------------------
// subcommands

struct SpectrumArgs {
    std::string config;
    std::string direction = "forward";
    std::string output = "-";
    std::string svg;
    std::string manifest;
    ScanOverride scan;
};

int cmd_spectrum(const SpectrumArgs& a, std::ostream& out)
{
    ManifestTarget mt;
    mt.path = a.manifest;
    const RunConfig rc = load_run_config(a.config, a.scan);
    const ScanDirection dir = a.direction == "backward" ? ScanDirection::backward : ScanDirection::forward;
    const Spectrum s = sweep_spectrum(rc.model, make_grid(rc.scan), dir, rc.solver);

    Sink sink(a.output, out);
    write_spectrum_csv(sink.stream(), s);
    sink.close();

    if (!a.svg.empty()) {
        const Spectrum asc = s.ascending();
        SvgSeries series{std::string(to_string(dir)) + " scan", dir == ScanDirection::forward ? "#c0392b" : "#2471a3",
                         {}, asc.transmission};
        for (double dc : asc.delta_c)
            series.x.push_back(angular_to_mhz(dc));
        Sink svg(a.svg, out);
        write_line_plot_svg(svg.stream(), {series}, "delta_c (MHz)", "transmission", "probe transmission");
        svg.close();
    }

    mt.manifest.subcommand = "spectrum";
    mt.manifest.config_text = format_config(rc);
    mt.manifest.arguments = {"--direction", a.direction};
    mt.add_output("--output", a.output);
    mt.add_output("--svg", a.svg);
    mt.write();
    return kExitOk;
}

struct PhasemapArgs {
    std::string config;
    std::string axis;
    int jobs = 1;
    std::string output = "-";
    std::string svg;
    std::string manifest;
    ScanOverride scan;
};

int cmd_phasemap(const PhasemapArgs& a, std::ostream& out, std::ostream& err)
{
    ManifestTarget mt;
    mt.path = a.manifest;
    ControlAxis axis;
    try {
        axis = ControlAxis::parse(a.axis);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("--axis", e.what());
    }
    const RunConfig rc = load_run_config(a.config, a.scan);

    Sink sink(a.output, out);
    bool header = false;
    const PhaseDiagram d =
        phase_diagram(rc.model, axis, make_grid(rc.scan), rc.solver, a.jobs, [&](std::size_t row, const PhaseDiagram& p) {
            if (!header) {
                write_phase_diagram_header(sink.stream(), p);
                header = true;
            }
            write_phase_diagram_row(sink.stream(), p, row);
            sink.stream().flush();
            if (!p.row_valid(row))
                err << "warning: row " << row << " (" << p.axis.label() << " = " << fmt12(p.axis.display(p.axis.values[row]))
                    << ") invalid: " << p.row_error[row] << '\n';
        });
    if (!header)
        write_phase_diagram_header(sink.stream(), d);
    sink.close();

    if (!a.svg.empty()) {
        Sink svg(a.svg, out);
        write_heatmap_svg(svg.stream(), d);
        svg.close();
    }

    mt.manifest.subcommand = "phasemap";
    mt.manifest.config_text = format_config(rc);
    mt.manifest.arguments = {"--axis", a.axis, "--jobs", std::to_string(a.jobs)};
    mt.add_output("--output", a.output);
    mt.add_output("--svg", a.svg);
    mt.write();
    return kExitOk;
}

struct RootsArgs {
    std::string config;
    double delta_c_mhz = 0.0;
};

int cmd_roots(const RootsArgs& a, std::ostream& out)
{
    const RunConfig rc = load_run_config(a.config, {});
    const FixedPointSet set = self_consistent_roots(rc.model, mhz_to_angular(a.delta_c_mhz), rc.solver);
    out << "x,stability,slope\n";
    for (const auto& p : set.points)
        out << fmt12(p.x) << ',' << (p.stability == Stability::stable ? "stable" : "unstable") << ','
            << fmt12(p.slope) << '\n';
    return kExitOk;
}

// CSV column by header name or zero-based index.
std::vector<double> read_column(const std::vector<std::vector<std::string>>& rows, const std::string& column,
                                const std::string& flag)
{
    const auto& head = rows.front();
    std::size_t idx = head.size();
    for (std::size_t i = 0; i < head.size(); ++i)
        if (head[i] == column)
            idx = i;
    if (idx == head.size()) {
        char* end = nullptr;
        const long v = std::strtol(column.c_str(), &end, 10);
        if (column.empty() || *end != '\0' || v < 0 || static_cast<std::size_t>(v) >= head.size())
            throw ConfigError(flag, "no column '" + column + "' in the input header");
        idx = static_cast<std::size_t>(v);
    }
    std::vector<double> col;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (idx >= rows[r].size())
            throw ConfigError(flag, "row " + std::to_string(r + 1) + " has no column " + std::to_string(idx));
        const std::string& cell = rows[r][idx];
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (cell.empty() || *end != '\0')
            throw ConfigError(flag, "row " + std::to_string(r + 1) + ": '" + cell + "' is not a number");
        col.push_back(v);
    }
    return col;
}

std::vector<std::vector<std::string>> read_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        if (line.back() == ',')
            cells.emplace_back();
        rows.push_back(std::move(cells));
    }
    if (rows.empty())
        throw ConfigError("--input", "CSV has no header row");
    return rows;
}

struct FitArgs {
    std::string input;
    std::string x = "0";
    std::string y = "1";
    std::string transform = "identity";
    std::string output = "-";
};

int cmd_fit(const FitArgs& a, std::ostream& out)
{
    const auto rows = read_csv(read_file(a.input));
    const auto xs_raw = read_column(rows, a.x, "--x");
    const auto ys_raw = read_column(rows, a.y, "--y");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < xs_raw.size(); ++i) {
        double x = xs_raw[i];
        if (a.transform == "square")
            x = x * x;
        else if (a.transform == "sqrt")
            x = x >= 0 ? std::sqrt(x) : std::nan("");
        if (std::isfinite(x) && std::isfinite(ys_raw[i])) {
            xs.push_back(x);
            ys.push_back(ys_raw[i]);
        }
    }
    if (xs.size() < 3)
        throw InsufficientCalibration("fit needs at least 3 finite points, got " + std::to_string(xs.size()));
    Sink sink(a.output, out);
    write_fit_record(sink.stream(), fit_linear(xs, ys));
    sink.close();
    return kExitOk;
}

std::vector<double> parse_list(const std::string& text, const std::string& flag)
{
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (item.empty() || *end != '\0' || !std::isfinite(v))
            throw ConfigError(flag, "'" + item + "' is not a number");
        values.push_back(v);
    }
    return values;
}

struct CalibrateArgs {
    std::string config;
    std::string powers_mw;
    std::string powers_dbm;
    int jobs = 1;
    std::string output = "-";
    std::string table;
    ScanOverride scan;
};

int cmd_calibrate(const CalibrateArgs& a, std::ostream& out)
{
    const RunConfig rc = load_run_config(a.config, a.scan);
    std::vector<double> powers;
    if (!a.powers_mw.empty())
        powers = parse_list(a.powers_mw, "--powers");
    else
        for (double dbm : parse_list(a.powers_dbm, "--powers-dbm"))
            powers.push_back(dbm_to_mw(dbm));
    for (double p : powers)
        if (p < 0)
            throw ConfigError("--powers", "powers must be >= 0 mW");

    const Calibration cal =
        calibrate_electrometer(rc.model, powers, make_grid(rc.scan), rc.solver, rc.analysis.region_threshold, a.jobs);
    Sink sink(a.output, out);
    write_fit_record(sink.stream(), cal.fit);
    sink.close();
    if (!a.table.empty()) {
        Sink table(a.table, out);
        table.stream() << "power_mw,sqrt_power,center_mhz\n";
        for (const auto& p : cal.points)
            table.stream() << fmt12(p.power_mw) << ',' << fmt12(std::sqrt(p.power_mw)) << ','
                           << (p.center_mhz ? fmt12(*p.center_mhz) : "nan") << '\n';
        table.close();
    }
    return kExitOk;
}

struct EstimateArgs {
    std::string calibration;
    std::optional<double> center_mhz;
    std::string observe;
};

int cmd_estimate(const EstimateArgs& a, std::ostream& out, std::ostream& err)
{
    std::istringstream rec(read_file(a.calibration));
    LinearFit fit;
    try {
        fit = read_fit_record(rec);
    } catch (const std::runtime_error& e) {
        throw ConfigError("--calibration", e.what());
    }
    double center = 0.0;
    if (a.center_mhz) {
        center = *a.center_mhz;
    } else {
        const RunConfig rc = load_run_config(a.observe, {});
        const auto c = region_center_mhz(rc.model, make_grid(rc.scan), rc.solver, rc.analysis.region_threshold);
        if (!c)
            throw NumericalError("no bistable region in the observed configuration");
        center = *c;
    }
    const PowerEstimate e = estimate_mw_power(fit, center);
    if (e.out_of_range)
        err << "warning: center " << fmt12(center) << " MHz lies outside the calibrated span\n";
    out << "center_mhz,power_mw,uncertainty_mw,power_dbm,out_of_range\n"
        << fmt12(center) << ',' << fmt12(e.power_mw) << ',' << fmt12(e.uncertainty_mw) << ','
        << (e.power_mw > 0 ? fmt12(mw_to_dbm(e.power_mw)) : "-inf") << ',' << (e.out_of_range ? 1 : 0) << '\n';
    return kExitOk;
}

struct ZeroPointArgs {
    std::string config;
    double lo_mhz = -20.0;
    double hi_mhz = 20.0;
    double tol_mhz = 0.01;
    ScanOverride scan;
};

int cmd_zeropoint(const ZeroPointArgs& a, std::ostream& out)
{
    const RunConfig rc = load_run_config(a.config, a.scan);
    const double z = locate_zero_point(rc.model, make_grid(rc.scan), mhz_to_angular(a.lo_mhz),
                                       mhz_to_angular(a.hi_mhz), rc.solver, mhz_to_angular(a.tol_mhz));
    out << "delta_mw_mhz\n" << fmt12(angular_to_mhz(z)) << '\n';
    return kExitOk;
}

int cmd_selfcheck(std::ostream& out)
{
    std::optional<std::string> tol;
    if (const char* env = std::getenv("RYDBIST_TOL"))
        tol = env;
    std::vector<CheckResult> results;
    try {
        results = run_selfcheck(tol);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("RYDBIST_TOL", e.what());
    }
    bool ok = true;
    for (const auto& r : results) {
        char line[256];
        std::snprintf(line, sizeof(line), "%-4s %-24s residual=%-12.4g tolerance=%-10.3g", r.passed ? "PASS" : "FAIL",
                      r.name.c_str(), r.residual, r.tolerance);
        out << line;
        if (!r.detail.empty())
            out << ' ' << r.detail;
        out << '\n';
        ok = ok && r.passed;
    }
    out << (ok ? "selfcheck: all checks passed\n" : "selfcheck: FAILED\n");
    return ok ? kExitOk : kExitNumerical;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct ReplayArgs {
    std::string manifest;
    std::string output_dir;
};

int cmd_replay(const ReplayArgs& a, std::ostream& out, std::ostream& err)
{
    std::istringstream in(read_file(a.manifest));
    const RunManifest m = read_manifest(in);
    if (m.subcommand != "spectrum" && m.subcommand != "phasemap")
        throw ConfigError("subcommand", "cannot replay '" + m.subcommand + "'");

    fs::path dir = a.output_dir;
    if (dir.empty())
        dir = fs::temp_directory_path() / ("rydbist-replay-" + std::to_string(std::chrono::steady_clock::now()
                                                                                 .time_since_epoch()
                                                                                 .count()));
    fs::create_directories(dir);
    const fs::path config = dir / "config.conf";
    {
        std::ofstream os(config, std::ios::binary);
        os << m.config_text;
        if (!os)
            throw IoError("cannot write '" + config.string() + "'");
    }

    std::vector<std::string> args{m.subcommand, "--config", config.string()};
    args.insert(args.end(), m.arguments.begin(), m.arguments.end());
    std::vector<std::pair<std::string, fs::path>> compare;
    for (const auto& o : m.outputs) {
        const fs::path fresh = dir / (o.role.substr(2) + "-" + fs::path(o.path).filename().string());
        args.push_back(o.role);
        args.push_back(fresh.string());
        compare.emplace_back(o.path, fresh);
    }
    std::ostringstream sub_out;
    const int code = dispatch(args, sub_out, err);
    if (code != kExitOk)
        return code;

    bool identical = true;
    for (const auto& [recorded, fresh] : compare) {
        const bool same = fs::exists(recorded) && read_file(recorded) == read_file(fresh.string());
        out << (same ? "identical " : "DIFFERS   ") << recorded << " <-> " << fresh.string() << '\n';
        identical = identical && same;
    }
    out << (identical ? "replay: outputs reproduced\n" : "replay: outputs differ\n");
    return identical ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Mean-field Rydberg EIT bistability simulator.\n"
                 "Frequencies are plain MHz (converted to 2*pi*MHz internally); microwave powers are mW, or dBm "
                 "where a flag says so, with P[mW] = 10^(P[dBm]/10)."};
    app.set_version_flag("--version", RYDBIST_VERSION);
    app.require_subcommand(1);

    SpectrumArgs sp;
    auto* c_spec = app.add_subcommand("spectrum", "Quasi-static transmission scan over delta_c");
    c_spec->add_option("-c,--config", sp.config, "Config file")->required();
    c_spec->add_option("--direction", sp.direction, "forward (delta_c ascending) or backward")
        ->check(CLI::IsMember({"forward", "backward"}));
    c_spec->add_option("-o,--output", sp.output, "CSV output path, '-' for stdout");
    c_spec->add_option("--svg", sp.svg, "Also write an SVG line plot");
    c_spec->add_option("--manifest", sp.manifest, "Write a run manifest (JSON)");
    sp.scan.add_options(c_spec);

    PhasemapArgs pm;
    auto* c_pm = app.add_subcommand("phasemap", "Phase diagram of T_fwd - T_bwd over a control axis");
    c_pm->add_option("-c,--config", pm.config, "Config file")->required();
    c_pm->add_option("--axis", pm.axis,
                     "kind:start:stop:count with kind omega_p, omega_mw, delta_mw (MHz), "
                     "mw_power_mw (mW) or mw_power_dbm (dBm)")
        ->required();
    c_pm->add_option("-j,--jobs", pm.jobs, "Worker threads")->check(CLI::Range(1, 256));
    c_pm->add_option("-o,--output", pm.output, "CSV output path, '-' for stdout");
    c_pm->add_option("--svg", pm.svg, "Also write an SVG heatmap");
    c_pm->add_option("--manifest", pm.manifest, "Write a run manifest (JSON)");
    pm.scan.add_options(c_pm);

    RootsArgs rt;
    auto* c_roots = app.add_subcommand("roots", "Self-consistent fixed points at one delta_c");
    c_roots->add_option("-c,--config", rt.config, "Config file")->required();
    c_roots->add_option("--delta-c", rt.delta_c_mhz, "Coupling detuning, MHz")->required();

    FitArgs ft;
    auto* c_fit = app.add_subcommand("fit", "Least-squares line through two CSV columns");
    c_fit->add_option("-i,--input", ft.input, "CSV with a header row")->required();
    c_fit->add_option("--x", ft.x, "x column (name or zero-based index)");
    c_fit->add_option("--y", ft.y, "y column (name or zero-based index)");
    c_fit->add_option("--transform", ft.transform, "Applied to x: identity, square or sqrt")
        ->check(CLI::IsMember({"identity", "square", "sqrt"}));
    c_fit->add_option("-o,--output", ft.output, "Fit record path, '-' for stdout");

    CalibrateArgs cb;
    auto* c_cal = app.add_subcommand("calibrate", "Fit the bistable-region center against sqrt(P)");
    c_cal->add_option("-c,--config", cb.config, "Config file (microwave detuning and coupling)")->required();
    auto* o_mw = c_cal->add_option("--powers", cb.powers_mw, "Comma-separated powers, mW");
    auto* o_dbm = c_cal->add_option("--powers-dbm", cb.powers_dbm, "Comma-separated powers, dBm");
    o_mw->excludes(o_dbm);
    c_cal->add_option("-j,--jobs", cb.jobs, "Worker threads")->check(CLI::Range(1, 256));
    c_cal->add_option("-o,--output", cb.output, "Fit record path, '-' for stdout");
    c_cal->add_option("--table", cb.table, "Also write the per-power centers as CSV");
    cb.scan.add_options(c_cal);

    EstimateArgs es;
    auto* c_est = app.add_subcommand("estimate", "Invert a calibration to a microwave power");
    c_est->add_option("--calibration", es.calibration, "Fit record from `calibrate`")->required();
    auto* o_center = c_est->add_option("--center", es.center_mhz, "Observed region center, MHz");
    auto* o_obs = c_est->add_option("--observe", es.observe, "Config to simulate and read the center from");
    o_center->excludes(o_obs);

    ZeroPointArgs zp;
    auto* c_zp = app.add_subcommand("zeropoint", "Microwave detuning giving equal-height Autler-Townes peaks");
    c_zp->add_option("-c,--config", zp.config, "Config file (use a probe below the bistability threshold)")
        ->required();
    c_zp->add_option("--lo", zp.lo_mhz, "Lower bracket for delta_mw, MHz");
    c_zp->add_option("--hi", zp.hi_mhz, "Upper bracket for delta_mw, MHz");
    c_zp->add_option("--tol", zp.tol_mhz, "Bracket width at which to stop, MHz")->check(CLI::PositiveNumber);
    zp.scan.add_options(c_zp);

    auto* c_self = app.add_subcommand(
        "selfcheck", "Analytic-oracle suite. RYDBIST_TOL=<number> or name=value[,...] overrides tolerances");

    ReplayArgs rp;
    auto* c_replay = app.add_subcommand("replay", "Re-run a manifest and compare its outputs byte for byte");
    c_replay->add_option("manifest", rp.manifest, "Manifest written by --manifest")->required();
    c_replay->add_option("--output-dir", rp.output_dir, "Directory for the regenerated outputs");

    std::vector<const char*> argv{"rydbist"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }
    if (c_cal->parsed() && cb.powers_mw.empty() && cb.powers_dbm.empty()) {
        err << "calibrate: one of --powers or --powers-dbm is required\n" << app.help();
        return kExitConfig;
    }
    if (c_est->parsed() && !es.center_mhz && es.observe.empty()) {
        err << "estimate: one of --center or --observe is required\n";
        return kExitConfig;
    }

    if (c_spec->parsed())
        return cmd_spectrum(sp, out);
    if (c_pm->parsed())
        return cmd_phasemap(pm, out, err);
    if (c_roots->parsed())
        return cmd_roots(rt, out);
    if (c_fit->parsed())
        return cmd_fit(ft, out);
    if (c_cal->parsed())
        return cmd_calibrate(cb, out);
    if (c_est->parsed())
        return cmd_estimate(es, out, err);
    if (c_zp->parsed())
        return cmd_zeropoint(zp, out);
    if (c_self->parsed())
        return cmd_selfcheck(out);
    if (c_replay->parsed())
        return cmd_replay(rp, out, err);
    return kExitConfig;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    try {
        return dispatch(args, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const BranchTrackingFailed& e) {
        err << "numerical error at delta_c = " << fmt12(angular_to_mhz(e.delta_c())) << " MHz: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

} // namespace rydbist
