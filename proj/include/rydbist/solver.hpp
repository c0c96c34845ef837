// Steady states of the Lindblad generator and the scalar mean-field
// self-consistency x = F(x).
//
// F(x) is the (velocity-averaged) Rydberg fraction of the steady state
// computed with the mean-field shift -V x and dephasing beta x. Fixed points
// are the roots of g(x) = F(x) - x on [0, 1]; their stability under the
// relaxation dynamics dx/dt = F(x) - x is decided by F'(x*) < 1.
#pragma once

#include "rydbist/config.hpp"
#include "rydbist/doppler.hpp"
#include "rydbist/model.hpp"

#include <vector>

namespace rydbist {

class DensityMatrix {
public:
    /// Validates Hermiticity, unit trace and eigenvalues >= -eigen_tol.
    static DensityMatrix from_matrix(const Matrix4c& m, double tol = 1e-10, double eigen_tol = 1e-8);
    /// |level><level|
    static DensityMatrix pure(int level);

    const Matrix4c& matrix() const { return m_; }
    Complex operator()(int row, int col) const { return m_(row, col); }
    double population(int level) const { return m_(level, level).real(); }

    double hermiticity_error() const;
    double trace_error() const;
    double min_eigenvalue() const;

private:
    explicit DensityMatrix(const Matrix4c& m) : m_(m) {}
    friend DensityMatrix steady_state(const Superoperator&, double);
    friend class Medium;
    friend DensityMatrix trusted_density(const Matrix4c&);

    Matrix4c m_;
};

/// Null vector of L with unit trace, from the bordered system where the
/// rho_gg row of L is replaced by the trace functional. Throws
/// DegenerateSteadyState when the second-smallest singular value of L is
/// below `degeneracy_threshold` relative to the largest.
DensityMatrix steady_state(const Superoperator& L, double degeneracy_threshold = 1e-8);

double rydberg_fraction(const DensityMatrix& rho, RydbergMeasure measure = RydbergMeasure::r1_and_r2);

/// The driven vapor at fixed configuration: velocity classes, dissipator and
/// the transmission reference are computed once and shared by every
/// (delta_c, x) evaluation. Immutable after construction.
class Medium {
public:
    explicit Medium(ModelConfig config, SolverOptions options = {});

    struct Observables {
        Complex probe_coherence; // weighted average of rho(i, g)
        double rydberg_fraction; // F(x)
    };

    Observables observe(double delta_c, double x) const;
    DensityMatrix averaged_state(double delta_c, double x) const;
    double response(double delta_c, double x) const { return observe(delta_c, x).rydberg_fraction; }

    /// Im rho(i, g) of the bare two-level medium on resonance at the same
    /// probe Rabi frequency and Doppler settings.
    double reference_absorption() const { return reference_absorption_; }
    /// exp(-OD Im(rho_ig) / A_ref), clamped to [0, 1].
    double transmission(Complex probe_coherence) const;

    Superoperator liouvillian(double delta_c, double x, double velocity) const;

    const ModelConfig& config() const { return config_; }
    const SolverOptions& options() const { return options_; }
    const std::vector<VelocityClass>& velocity_classes() const { return classes_; }

private:
    ModelConfig config_;
    SolverOptions options_;
    std::vector<VelocityClass> classes_;
    Superoperator dissipator_;
    double reference_absorption_ = 0.0;
};

/// F(x) at coupling detuning delta_c (overrides config.drive.delta_c).
double response_map(const ModelConfig& config, double delta_c, double x);

enum class Stability { stable, unstable };

struct FixedPoint {
    double x;
    DensityMatrix rho;
    Stability stability;
    double slope; // dF/dx at x

    bool tangent(double tol = 1e-2) const;
};

struct FixedPointSet {
    double delta_c;
    std::vector<FixedPoint> points; // ascending x

    std::size_t size() const { return points.size(); }
    std::vector<double> stable_roots() const;
};

/// All roots of F(x) - x found by a uniform scan plus bisection.
/// Throws RootScanInconclusive when g dips toward zero between grid points
/// far enough that a sign change narrower than the grid is likely.
FixedPointSet self_consistent_roots(const Medium& medium, double delta_c);
FixedPointSet self_consistent_roots(const ModelConfig& config, double delta_c,
                                    const SolverOptions& options = {});

/// Endpoint of dx/dt = F(x) - x started at x0: the first root in the flow
/// direction, bracketed with the root-scan step and refined by bisection.
double relaxation_target(const Medium& medium, double delta_c, double x0);

/// Bisection on a bracket [lo, hi] of g = F - x, down to adjacent doubles.
double refine_root(const Medium& medium, double delta_c, double lo, double hi);

/// dF/dx by centered difference (one-sided at the ends of [0, 1]).
double response_slope(const Medium& medium, double delta_c, double x);

struct TimeEvolveOptions {
    int record_every = 1;
    bool self_check = false;      // rerun at dt/2 and compare endpoints
    double self_check_tol = 1e-8;
    double invariant_tol = 1e-7;
    double trace_drift_tol = 1e-9;
};

struct Trajectory {
    std::vector<double> time;
    std::vector<DensityMatrix> states; // velocity-averaged
    std::vector<double> rydberg_fraction;

    const DensityMatrix& final_state() const { return states.back(); }
    double final_fraction() const { return rydberg_fraction.back(); }
};

/// Fixed-step RK4 integration of the nonlinear master equation: the
/// mean-field shift is recomputed from the instantaneous Rydberg fraction at
/// every stage. Every velocity class starts from rho0. Throws
/// StepSizeTooLarge when a state leaves the density-matrix invariants.
/// The pure coherence dephasing is not completely positive: with dephasing
/// comparable to Gamma_r1 a transient eigenvalue can dip below
/// -invariant_tol at any step size.
Trajectory time_evolve(const ModelConfig& config, const DensityMatrix& rho0, double duration, double dt,
                       const TimeEvolveOptions& options = {});

} // namespace rydbist
