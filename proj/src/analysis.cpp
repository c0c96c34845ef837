#include "rydbist/analysis.hpp"

#include "rydbist/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rydbist {

namespace {

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, sep))
        parts.push_back(part);
    if (!text.empty() && text.back() == sep)
        parts.emplace_back();
    return parts;
}

double parse_number(const std::string& text, const std::string& what)
{
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("axis spec: " + what + " '" + text + "' is not a number");
    }
    if (used != text.size() || !std::isfinite(value))
        throw std::invalid_argument("axis spec: " + what + " '" + text + "' is not a number");
    return value;
}

std::string fmt12(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Vertex of the parabola through (x[k-1..k+1], y[k-1..k+1]), kept inside
// [x[k-1], x[k+1]].
std::pair<double, double> parabola_vertex(const std::vector<double>& x, const std::vector<double>& y, std::size_t k)
{
    const double x0 = x[k - 1], x1 = x[k], x2 = x[k + 1];
    const double y0 = y[k - 1], y1 = y[k], y2 = y[k + 1];
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double a = (d12 - d01) / (x2 - x0);
    if (!(a < 0.0))
        return {x1, y1};
    const double b = d01 - a * (x0 + x1);
    const double xv = std::clamp(-b / (2.0 * a), x0, x2);
    const double yv = y1 + (xv - x1) * (d01 + a * (xv - x0));
    return {xv, yv};
}

std::size_t interior_argmax(const Spectrum& s)
{
    const auto& t = s.transmission;
    if (t.size() < 3)
        throw FlatSpectrum("spectrum needs at least 3 points for a peak");
    const auto it = std::max_element(t.begin(), t.end());
    const auto lo = std::min_element(t.begin(), t.end());
    const std::size_t k = static_cast<std::size_t>(it - t.begin());
    if (*it == *lo)
        throw FlatSpectrum("spectrum is flat");
    if (k == 0 || k + 1 == t.size())
        throw FlatSpectrum("spectrum maximum lies on the scan boundary");
    return k;
}

} // namespace

// ---------------------------------------------------------------------------

ControlAxis ControlAxis::parse(const std::string& spec)
{
    const auto parts = split(spec, ':');
    if (parts.size() != 4)
        throw std::invalid_argument("axis spec '" + spec + "' is not <kind>:<start>:<stop>:<count>");
    ControlAxis axis;
    const std::string& kind = parts[0];
    const double start = parse_number(parts[1], "start");
    const double stop = parse_number(parts[2], "stop");
    const double count_d = parse_number(parts[3], "count");
    if (count_d < 1 || count_d != std::floor(count_d) || count_d > 100000)
        throw std::invalid_argument("axis spec: count must be a positive integer");
    const int count = static_cast<int>(count_d);
    if (count == 1 && start != stop)
        throw std::invalid_argument("axis spec: a single-row axis needs start == stop");

    std::vector<double> raw = count == 1 ? std::vector<double>{start} : make_grid(start, stop, count);
    if (count > 1 && start > stop) {
        raw = make_grid(stop, start, count);
        std::reverse(raw.begin(), raw.end());
    }

    if (kind == "omega_p" || kind == "omega_mw" || kind == "delta_mw") {
        axis.kind = kind == "omega_p" ? Kind::omega_p : kind == "omega_mw" ? Kind::omega_mw : Kind::delta_mw;
        for (double v : raw)
            axis.values.push_back(mhz_to_angular(v));
    } else if (kind == "mw_power_mw") {
        axis.kind = Kind::mw_power;
        axis.values = raw;
    } else if (kind == "mw_power_dbm") {
        axis.kind = Kind::mw_power;
        for (double v : raw)
            axis.values.push_back(dbm_to_mw(v));
    } else {
        throw std::invalid_argument("axis spec: unknown kind '" + kind +
                                    "' (omega_p, omega_mw, delta_mw, mw_power_mw, mw_power_dbm)");
    }
    for (double v : axis.values) {
        if (axis.kind == Kind::mw_power && v < 0.0)
            throw std::invalid_argument("axis spec: microwave power must be >= 0 mW");
        if ((axis.kind == Kind::omega_p || axis.kind == Kind::omega_mw) && v < 0.0)
            throw std::invalid_argument("axis spec: Rabi frequencies must be >= 0");
    }
    return axis;
}

std::string ControlAxis::label() const
{
    switch (kind) {
    case Kind::omega_p: return "omega_p_mhz";
    case Kind::omega_mw: return "omega_mw_mhz";
    case Kind::delta_mw: return "delta_mw_mhz";
    case Kind::mw_power: return "mw_power_mw";
    }
    return "control";
}

double ControlAxis::display(double value) const
{
    return kind == Kind::mw_power ? value : angular_to_mhz(value);
}

ModelConfig ControlAxis::apply(const ModelConfig& base, double value) const
{
    ModelConfig c = base;
    switch (kind) {
    case Kind::omega_p: c.drive.omega_p = value; break;
    case Kind::omega_mw: c.drive.omega_mw = value; break;
    case Kind::delta_mw: c.drive.delta_mw = value; break;
    case Kind::mw_power: c.drive.omega_mw = rabi_from_power(value, c.microwave.kappa); break;
    }
    return c;
}

PhaseDiagram phase_diagram(const ModelConfig& base, const ControlAxis& axis, const std::vector<double>& grid,
                           const SolverOptions& options, int jobs, const RowCallback& on_row)
{
    const std::size_t rows = axis.values.size();
    PhaseDiagram d;
    d.axis = axis;
    d.delta_c = grid;
    d.difference.assign(rows, {});
    d.row_error.assign(rows, {});
    d.pairs.assign(rows, std::nullopt);

    std::vector<char> done(rows, 0);
    std::size_t emitted = 0;
    std::mutex mutex;
    std::atomic<std::size_t> next{0};

    auto run_row = [&](std::size_t r) {
        std::optional<HysteresisPair> pair;
        std::vector<double> diff;
        std::string error;
        try {
            const ModelConfig cfg = axis.apply(base, axis.values[r]);
            cfg.validate();
            pair = hysteresis_pair(cfg, grid, options);
            diff = pair->difference();
        } catch (const std::exception& e) {
            error = e.what();
            if (error.empty())
                error = "row failed";
            pair.reset();
            diff.clear();
        }
        std::lock_guard lock(mutex);
        d.pairs[r] = std::move(pair);
        d.difference[r] = std::move(diff);
        d.row_error[r] = std::move(error);
        done[r] = 1;
        while (emitted < rows && done[emitted]) {
            if (on_row)
                on_row(emitted, d);
            ++emitted;
        }
    };

    auto worker = [&] {
        for (std::size_t r = next++; r < rows; r = next++)
            run_row(r);
    };

    const int n = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(rows, 1)));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n);
        for (int i = 0; i < n; ++i)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    return d;
}

void write_phase_diagram_header(std::ostream& os, const PhaseDiagram& diagram)
{
    os << diagram.axis.label() << "\\delta_c_mhz";
    for (double dc : diagram.delta_c)
        os << ',' << fmt12(angular_to_mhz(dc));
    os << '\n';
}

void write_phase_diagram_row(std::ostream& os, const PhaseDiagram& diagram, std::size_t row)
{
    os << fmt12(diagram.axis.display(diagram.axis.values[row]));
    const bool valid = diagram.row_valid(row);
    for (std::size_t k = 0; k < diagram.delta_c.size(); ++k)
        os << ',' << (valid ? fmt12(diagram.difference[row][k]) : std::string("nan"));
    os << '\n';
}

void write_phase_diagram_csv(std::ostream& os, const PhaseDiagram& diagram)
{
    write_phase_diagram_header(os, diagram);
    for (std::size_t r = 0; r < diagram.axis.values.size(); ++r)
        write_phase_diagram_row(os, diagram, r);
}

// ---------------------------------------------------------------------------

BistableRegion bistable_region(const std::vector<double>& grid, const std::vector<double>& difference, double eps)
{
    if (!(eps > 0.0))
        throw std::invalid_argument("bistable_region: eps must be > 0");
    if (grid.size() != difference.size())
        throw std::invalid_argument("bistable_region: grid and difference differ in length");
    BistableRegion region;
    region.threshold = eps;
    std::size_t k = 0;
    while (k < grid.size()) {
        if (!(std::abs(difference[k]) > eps)) {
            ++k;
            continue;
        }
        const std::size_t start = k;
        while (k + 1 < grid.size() && std::abs(difference[k + 1]) > eps)
            ++k;
        region.intervals.push_back({grid[start], grid[k]});
        ++k;
    }
    if (!region.intervals.empty())
        region.red_center = region.intervals.front().center();
    return region;
}

BistableRegion bistable_region(const HysteresisPair& pair, double eps)
{
    return bistable_region(pair.grid(), pair.difference(), eps);
}

// ---------------------------------------------------------------------------

double peak_position(const Spectrum& spectrum)
{
    const Spectrum s = spectrum.ascending();
    return parabola_vertex(s.delta_c, s.transmission, interior_argmax(s)).first;
}

double peak_shift(const Spectrum& spectrum, const Spectrum& reference)
{
    if (spectrum.ascending().delta_c != reference.ascending().delta_c)
        throw std::invalid_argument("peak_shift: spectra are on different grids");
    return peak_position(spectrum) - peak_position(reference);
}

PeakSet find_peaks(const Spectrum& spectrum, double prominence)
{
    if (!(prominence > 0.0))
        throw std::invalid_argument("find_peaks: prominence must be > 0");
    const Spectrum s = spectrum.ascending();
    const auto& y = s.transmission;
    const std::size_t n = y.size();
    PeakSet out;
    std::size_t k = 1;
    while (k + 1 < n) {
        if (!(y[k] > y[k - 1])) {
            ++k;
            continue;
        }
        std::size_t right = k;
        while (right + 1 < n && y[right + 1] == y[k])
            ++right;
        if (right + 1 >= n || !(y[right + 1] < y[k])) {
            k = right + 1;
            continue;
        }
        const std::size_t peak = (k + right) / 2;
        const double h = y[k];

        double left_min = h;
        for (std::size_t j = k; j-- > 0;) {
            if (y[j] > h)
                break;
            left_min = std::min(left_min, y[j]);
        }
        double right_min = h;
        for (std::size_t j = right + 1; j < n; ++j) {
            if (y[j] > h)
                break;
            right_min = std::min(right_min, y[j]);
        }
        if (h - std::max(left_min, right_min) >= prominence) {
            const auto [xv, yv] = k == right ? parabola_vertex(s.delta_c, y, peak)
                                             : std::pair{s.delta_c[peak], h};
            out.peaks.push_back({xv, std::clamp(yv, 0.0, 1.0)});
        }
        k = right + 1;
    }
    return out;
}

GradientMax max_gradient(const Spectrum& spectrum)
{
    const Spectrum s = spectrum.ascending();
    if (s.size() < 3)
        throw std::invalid_argument("max_gradient needs at least 3 points");
    GradientMax best{s.delta_c[1], -std::numeric_limits<double>::infinity()};
    for (std::size_t k = 1; k + 1 < s.size(); ++k) {
        const double g = (s.transmission[k + 1] - s.transmission[k - 1]) / (s.delta_c[k + 1] - s.delta_c[k - 1]);
        if (g > best.gradient)
            best = {s.delta_c[k], g};
    }
    best.gradient *= kTwoPi;
    return best;
}

// ---------------------------------------------------------------------------

LinearFit fit_linear(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw std::invalid_argument("fit_linear: x and y differ in length");
    const std::size_t n = x.size();
    if (n < 3)
        throw std::invalid_argument("fit_linear needs at least 3 points");
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0))
        throw DegenerateAbscissa("fit_linear: all x values are equal");

    LinearFit f;
    f.n = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - f(x[i]);
        ssr += r * r;
    }
    f.r2 = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 0.0;
    f.rse = std::sqrt(ssr / static_cast<double>(n - 2));
    f.x_min = *std::min_element(x.begin(), x.end());
    f.x_max = *std::max_element(x.begin(), x.end());
    return f;
}

void write_fit_record(std::ostream& os, const LinearFit& fit)
{
    os << "{\"slope\": " << fmt12(fit.slope) << ", \"intercept\": " << fmt12(fit.intercept)
       << ", \"r2\": " << fmt12(fit.r2) << ", \"rse\": " << fmt12(fit.rse) << ", \"n\": " << fit.n
       << ", \"x_min\": " << fmt12(fit.x_min) << ", \"x_max\": " << fmt12(fit.x_max) << "}\n";
}

LinearFit read_fit_record(std::istream& is)
{
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("fit record: ") + e.what());
    }
    LinearFit f;
    try {
        f.slope = j.at("slope").get<double>();
        f.intercept = j.at("intercept").get<double>();
        f.r2 = j.value("r2", 0.0);
        f.rse = j.value("rse", 0.0);
        f.n = j.value("n", std::size_t{0});
        f.x_min = j.value("x_min", -std::numeric_limits<double>::infinity());
        f.x_max = j.value("x_max", std::numeric_limits<double>::infinity());
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("fit record: ") + e.what());
    }
    return f;
}

double ac_stark_prediction(double omega_mw, double delta_mw)
{
    if (!(std::abs(delta_mw) > 5.0 * std::abs(omega_mw)))
        throw NotFarDetuned("|delta_mw| must exceed 5 omega_mw for the second-order shift");
    return omega_mw * omega_mw / (4.0 * delta_mw);
}

std::optional<double> region_center_mhz(const ModelConfig& config, const std::vector<double>& grid,
                                        const SolverOptions& options, double eps)
{
    const BistableRegion region = bistable_region(hysteresis_pair(config, grid, options), eps);
    if (!region.red_center)
        return std::nullopt;
    return angular_to_mhz(*region.red_center);
}

Calibration calibrate_electrometer(const ModelConfig& base, std::span<const double> powers_mw,
                                   const std::vector<double>& grid, const SolverOptions& options, double eps,
                                   int jobs)
{
    ControlAxis axis;
    axis.kind = ControlAxis::Kind::mw_power;
    axis.values.assign(powers_mw.begin(), powers_mw.end());
    const PhaseDiagram d = phase_diagram(base, axis, grid, options, jobs);

    Calibration cal;
    cal.detuning_sign = base.drive.delta_mw > 0 ? 1 : base.drive.delta_mw < 0 ? -1 : 0;
    std::vector<double> xs, ys;
    for (std::size_t r = 0; r < axis.values.size(); ++r) {
        CalibrationPoint p{axis.values[r], std::nullopt};
        if (d.row_valid(r)) {
            const BistableRegion region = bistable_region(d.delta_c, d.difference[r], eps);
            if (region.red_center) {
                p.center_mhz = angular_to_mhz(*region.red_center);
                xs.push_back(std::sqrt(p.power_mw));
                ys.push_back(*p.center_mhz);
            }
        }
        cal.points.push_back(p);
    }
    if (xs.size() < 3)
        throw InsufficientCalibration("calibration needs at least 3 powers with a bistable region, got " +
                                      std::to_string(xs.size()));
    cal.fit = fit_linear(xs, ys);
    return cal;
}

PowerEstimate estimate_mw_power(const LinearFit& calibration, double observed_center_mhz)
{
    if (calibration.slope == 0.0 || !std::isfinite(calibration.slope))
        throw std::invalid_argument("estimate_mw_power: calibration slope must be nonzero");
    const double s = (observed_center_mhz - calibration.intercept) / calibration.slope;
    const double sigma_s = calibration.rse / std::abs(calibration.slope);
    PowerEstimate e;
    e.power_mw = s * s;
    e.uncertainty_mw = s != 0.0 ? 2.0 * std::abs(s) * sigma_s : sigma_s * sigma_s;
    e.out_of_range = s < calibration.x_min || s > calibration.x_max;
    return e;
}

double locate_zero_point(const ModelConfig& config, const std::vector<double>& grid, double lo, double hi,
                         const SolverOptions& options, double tol)
{
    if (!(hi > lo))
        throw std::invalid_argument("locate_zero_point: need lo < hi");
    auto imbalance = [&](double delta_mw) {
        ModelConfig c = config;
        c.drive.delta_mw = delta_mw;
        const PeakSet peaks = find_peaks(sweep_spectrum(c, grid, ScanDirection::forward, options), 1e-3);
        if (peaks.size() < 2)
            throw NumericalError("locate_zero_point: fewer than two Autler-Townes peaks at delta_mw = " +
                                 fmt12(angular_to_mhz(delta_mw)) + " MHz");
        // the two tallest peaks, in position order
        std::vector<Peak> p = peaks.peaks;
        std::sort(p.begin(), p.end(), [](const Peak& a, const Peak& b) { return a.height > b.height; });
        if (p[0].position > p[1].position)
            std::swap(p[0], p[1]);
        return p[0].height - p[1].height;
    };
    double f_lo = imbalance(lo);
    const double f_hi = imbalance(hi);
    if (f_lo == 0.0)
        return lo;
    if (f_hi == 0.0)
        return hi;
    if ((f_lo > 0) == (f_hi > 0))
        throw NumericalError("locate_zero_point: peak-height imbalance does not change sign on the bracket");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = imbalance(mid);
        if (f_mid == 0.0)
            return mid;
        if ((f_mid > 0) == (f_lo > 0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace rydbist
