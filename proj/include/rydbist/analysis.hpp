// Derived observables: hysteresis phase diagrams, bistable-region geometry,
// peak and gradient detectors, least-squares fits, light shifts and the
// microwave-power estimator built on the bistable-region center.
#pragma once

#include "rydbist/sweep.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rydbist {

// ---------------------------------------------------------------------------
// phase diagrams

/// Row axis of a phase diagram. Frequencies are rad/us, powers mW.
struct ControlAxis {
    enum class Kind { omega_p, mw_power, omega_mw, delta_mw };

    Kind kind = Kind::omega_p;
    std::vector<double> values;

    /// "omega_p:<start>:<stop>:<count>" (MHz), "omega_mw:..." (MHz),
    /// "delta_mw:..." (MHz), "mw_power_mw:..." (mW) or "mw_power_dbm:..."
    /// (dBm, converted to mW). Throws std::invalid_argument.
    static ControlAxis parse(const std::string& spec);

    /// CSV label including the unit, e.g. "omega_p_mhz".
    std::string label() const;
    /// Value in the label's unit.
    double display(double value) const;
    ModelConfig apply(const ModelConfig& base, double value) const;
};

struct PhaseDiagram {
    ControlAxis axis;
    std::vector<double> delta_c;                 // ascending, rad/us
    std::vector<std::vector<double>> difference; // [row][col] T_fwd - T_bwd
    std::vector<std::string> row_error;          // empty when the row is valid
    std::vector<std::optional<HysteresisPair>> pairs;

    bool row_valid(std::size_t row) const { return row_error[row].empty(); }
};

/// Called once per row, in row order, as soon as every earlier row is done.
using RowCallback = std::function<void(std::size_t row, const PhaseDiagram& partial)>;

/// One hysteresis pair per row. Rows run on `jobs` worker threads; a row
/// whose solve fails is recorded as invalid and the run continues.
PhaseDiagram phase_diagram(const ModelConfig& base, const ControlAxis& axis, const std::vector<double>& grid,
                           const SolverOptions& options = {}, int jobs = 1, const RowCallback& on_row = {});

/// First row = delta_c axis (MHz) behind the axis label, first column =
/// control values; invalid rows are written as nan. 12 significant digits.
void write_phase_diagram_header(std::ostream& os, const PhaseDiagram& diagram);
void write_phase_diagram_row(std::ostream& os, const PhaseDiagram& diagram, std::size_t row);
void write_phase_diagram_csv(std::ostream& os, const PhaseDiagram& diagram);

// ---------------------------------------------------------------------------
// bistable region

struct Interval {
    double lo;
    double hi;
    double center() const { return 0.5 * (lo + hi); }
};

struct BistableRegion {
    std::vector<Interval> intervals; // disjoint, ascending
    std::optional<double> red_center; // center of the most red-detuned interval
    double threshold = 0.0;

    bool empty() const { return intervals.empty(); }
};

/// Maximal runs of grid points with |T_fwd - T_bwd| > eps.
BistableRegion bistable_region(const std::vector<double>& grid, const std::vector<double>& difference, double eps);
BistableRegion bistable_region(const HysteresisPair& pair, double eps);

// ---------------------------------------------------------------------------
// peaks, shifts, gradients

struct Peak {
    double position; // rad/us
    double height;
};

struct PeakSet {
    std::vector<Peak> peaks; // ascending position
    std::size_t size() const { return peaks.size(); }
};

/// Difference of the sub-grid maxima of `spectrum` and `reference`.
/// Both must share the same grid. Throws FlatSpectrum when either has no
/// interior maximum.
double peak_shift(const Spectrum& spectrum, const Spectrum& reference);

/// Position of the interior maximum, refined by the parabola through the
/// maximum and its two neighbours.
double peak_position(const Spectrum& spectrum);

/// Interior local maxima whose topographic prominence is at least
/// `prominence`, quadratic-refined.
PeakSet find_peaks(const Spectrum& spectrum, double prominence);

struct GradientMax {
    double delta_c;  // rad/us
    double gradient; // transmission per (2 pi MHz), i.e. per MHz of ordinary frequency
};

/// Largest centered-difference slope dT/d(delta_c) over interior points.
GradientMax max_gradient(const Spectrum& spectrum);

// ---------------------------------------------------------------------------
// fits and the electrometer

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;  // 0 by convention when y is constant
    double rse = 0.0; // residual standard error, n - 2 degrees of freedom
    std::size_t n = 0;
    double x_min = 0.0;
    double x_max = 0.0;

    double operator()(double x) const { return intercept + slope * x; }
};

/// Ordinary least squares. Needs >= 3 points; throws DegenerateAbscissa when
/// all x are equal.
LinearFit fit_linear(std::span<const double> x, std::span<const double> y);

void write_fit_record(std::ostream& os, const LinearFit& fit);
LinearFit read_fit_record(std::istream& is);

/// Second-order light shift Omega^2 / (4 Delta) of r1 from a far-detuned
/// microwave. Throws NotFarDetuned unless |Delta| > 5 Omega.
double ac_stark_prediction(double omega_mw, double delta_mw);

struct CalibrationPoint {
    double power_mw;
    std::optional<double> center_mhz; // empty when no bistable region was found
};

struct Calibration {
    LinearFit fit; // region center (MHz) against sqrt(P / mW)
    int detuning_sign = 0;
    std::vector<CalibrationPoint> points;
};

/// Bistable-region center of one configuration, in MHz (empty if none).
std::optional<double> region_center_mhz(const ModelConfig& config, const std::vector<double>& grid,
                                        const SolverOptions& options, double eps);

/// Fits the red-side bistable-region center against sqrt(P). Powers without
/// a bistable region are dropped; at least 3 must remain.
Calibration calibrate_electrometer(const ModelConfig& base, std::span<const double> powers_mw,
                                   const std::vector<double>& grid, const SolverOptions& options = {},
                                   double eps = 0.01, int jobs = 1);

struct PowerEstimate {
    double power_mw;
    double uncertainty_mw;
    bool out_of_range; // observed center outside the calibrated span
};

/// P = ((center - intercept) / slope)^2 with the residual standard error
/// propagated to P.
PowerEstimate estimate_mw_power(const LinearFit& calibration, double observed_center_mhz);

/// Microwave detuning in [lo, hi] (rad/us) at which the two Autler-Townes
/// peaks of the forward spectrum have equal height. Bisection on the height
/// difference; throws NumericalError when [lo, hi] does not bracket it.
double locate_zero_point(const ModelConfig& config, const std::vector<double>& grid, double lo, double hi,
                         const SolverOptions& options = {}, double tol = 1e-3);

} // namespace rydbist
