#include "rydbist/solver.hpp"

#include "rydbist/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rydbist {

DensityMatrix trusted_density(const Matrix4c& m)
{
    return DensityMatrix(m);
}

namespace {

Matrix4c hermitize(const Matrix4c& m) { return 0.5 * (m + m.adjoint()); }

double relative_singular_gap(const Superoperator& L)
{
    Eigen::JacobiSVD<Superoperator> svd(L);
    const auto& sv = svd.singularValues(); // descending
    if (sv(0) == 0.0)
        return 0.0;
    return sv(14) / sv(0);
}

std::string describe(double lo, double hi)
{
    std::ostringstream os;
    os.precision(6);
    os << '[' << lo << ", " << hi << ']';
    return os.str();
}

} // namespace

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix DensityMatrix::from_matrix(const Matrix4c& m, double tol, double eigen_tol)
{
    DensityMatrix rho(m);
    if (!m.allFinite())
        throw std::invalid_argument("density matrix has non-finite entries");
    if (rho.hermiticity_error() > tol)
        throw std::invalid_argument("density matrix is not Hermitian");
    if (rho.trace_error() > tol)
        throw std::invalid_argument("density matrix trace differs from 1");
    rho.m_ = hermitize(m);
    if (rho.min_eigenvalue() < -eigen_tol)
        throw std::invalid_argument("density matrix has a negative eigenvalue");
    return rho;
}

DensityMatrix DensityMatrix::pure(int level)
{
    Matrix4c m = Matrix4c::Zero();
    m(level, level) = 1.0;
    return DensityMatrix(m);
}

double DensityMatrix::hermiticity_error() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }

double DensityMatrix::trace_error() const { return std::abs(m_.trace() - Complex(1.0, 0.0)); }

double DensityMatrix::min_eigenvalue() const
{
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(hermitize(m_), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

// ---------------------------------------------------------------------------
// steady state

DensityMatrix steady_state(const Superoperator& L, double degeneracy_threshold)
{
    Superoperator bordered = L;
    const int anchor = vec_index(kG, kG);
    bordered.row(anchor).setZero();
    for (int a = 0; a < kLevelCount; ++a)
        bordered(anchor, vec_index(a, a)) = 1.0;

    StateVector rhs = StateVector::Zero();
    rhs(anchor) = 1.0;

    Eigen::PartialPivLU<Superoperator> lu(bordered);
    // rcond and the pivot ratio are cheap estimates that can miss an exactly
    // singular system; the SVD settles every case they flag.
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    const StateVector v = lu.solve(rhs);
    const bool suspect = !(lu.rcond() > 1e-3 * degeneracy_threshold) ||
                         !(pivots.minCoeff() > 1e-3 * degeneracy_threshold * pivots.maxCoeff()) ||
                         !((bordered * v - rhs).norm() < 1e-8 * (1.0 + v.norm()));
    if (suspect && !(relative_singular_gap(L) >= degeneracy_threshold))
        throw DegenerateSteadyState("steady state is not unique (null space of L has dimension > 1)");
    Matrix4c rho = hermitize(unvectorize(v));
    rho /= rho.trace().real();
    if (!rho.allFinite())
        throw DegenerateSteadyState("steady-state solve produced non-finite values");
    return trusted_density(rho);
}

double rydberg_fraction(const DensityMatrix& rho, RydbergMeasure measure)
{
    double x = rho.population(kR1);
    if (measure == RydbergMeasure::r1_and_r2)
        x += rho.population(kR2);
    return std::clamp(x, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Medium

Medium::Medium(ModelConfig config, SolverOptions options)
    : config_(std::move(config)), options_(options), classes_(doppler_weights(config_.doppler)),
      dissipator_(build_dissipator(config_.decay))
{
    // Bare two-level reference: same probe, no coupling or microwave fields.
    // The uncoupled r1, r2 levels get a nonzero decay so the steady state is
    // unique; rho(i, g) does not depend on it.
    DriveParams bare;
    bare.omega_p = config_.drive.omega_p;
    DecayParams bare_decay = config_.decay;
    bare_decay.gamma_r1 = std::max(bare_decay.gamma_r1, bare_decay.gamma_i);
    bare_decay.gamma_r2 = std::max(bare_decay.gamma_r2, bare_decay.gamma_i);
    const Superoperator bare_dissipator = build_dissipator(bare_decay);
    double sum = 0.0;
    for (const auto& vc : classes_) {
        const Matrix4c h = build_hamiltonian(bare, 0.0, vc.velocity, config_.levels);
        const DensityMatrix rho = steady_state(build_commutator(h) + bare_dissipator, options_.degeneracy_threshold);
        sum += vc.weight * rho(kI, kG).imag();
    }
    reference_absorption_ = sum;
}

Superoperator Medium::liouvillian(double delta_c, double x, double velocity) const
{
    DriveParams drive = config_.drive;
    drive.delta_c = delta_c;
    const double shift = -config_.mean_field.shift * x;
    Superoperator L = build_commutator(build_hamiltonian(drive, shift, velocity, config_.levels)) + dissipator_;
    const double extra = config_.mean_field.broadening * x;
    if (extra != 0.0) {
        for (int r : {kR1, kR2}) {
            L(vec_index(kG, r), vec_index(kG, r)) -= extra;
            L(vec_index(r, kG), vec_index(r, kG)) -= extra;
        }
    }
    return L;
}

Medium::Observables Medium::observe(double delta_c, double x) const
{
    Observables out{Complex(0.0, 0.0), 0.0};
    for (const auto& vc : classes_) {
        const DensityMatrix rho = steady_state(liouvillian(delta_c, x, vc.velocity), options_.degeneracy_threshold);
        out.probe_coherence += vc.weight * rho(kI, kG);
        out.rydberg_fraction += vc.weight * rydberg_fraction(rho, config_.mean_field.measure);
    }
    out.rydberg_fraction = std::clamp(out.rydberg_fraction, 0.0, 1.0);
    return out;
}

DensityMatrix Medium::averaged_state(double delta_c, double x) const
{
    Matrix4c sum = Matrix4c::Zero();
    for (const auto& vc : classes_)
        sum += vc.weight *
               steady_state(liouvillian(delta_c, x, vc.velocity), options_.degeneracy_threshold).matrix();
    return DensityMatrix(hermitize(sum) / sum.trace().real());
}

double Medium::transmission(Complex probe_coherence) const
{
    if (reference_absorption_ == 0.0)
        throw NumericalError("transmission needs a nonzero probe (drive.omega_p_mhz > 0)");
    const double t = std::exp(-config_.cell.optical_depth * probe_coherence.imag() / reference_absorption_);
    return std::clamp(t, 0.0, 1.0);
}

double response_map(const ModelConfig& config, double delta_c, double x)
{
    return Medium(config).response(delta_c, x);
}

// ---------------------------------------------------------------------------
// fixed points

bool FixedPoint::tangent(double tol) const { return std::abs(slope - 1.0) < tol; }

std::vector<double> FixedPointSet::stable_roots() const
{
    std::vector<double> out;
    for (const auto& p : points)
        if (p.stability == Stability::stable)
            out.push_back(p.x);
    return out;
}

double refine_root(const Medium& medium, double delta_c, double lo, double hi)
{
    auto g = [&](double x) { return medium.response(delta_c, x) - x; };
    double g_lo = g(lo);
    if (g_lo == 0.0)
        return lo;
    double g_hi = g(hi);
    if (g_hi == 0.0)
        return hi;
    if ((g_lo > 0) == (g_hi > 0))
        throw std::invalid_argument("refine_root: interval does not bracket a sign change");

    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        const double g_mid = g(mid);
        if (g_mid == 0.0)
            return mid;
        if ((g_mid > 0) == (g_lo > 0)) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }
    const double root = std::abs(g_lo) <= std::abs(g_hi) ? lo : hi;
    const double residual = std::min(std::abs(g_lo), std::abs(g_hi));
    if (residual > medium.options().root_tolerance)
        throw NumericalError("response map is discontinuous near x = " + std::to_string(root) +
                             " (residual " + std::to_string(residual) + ")");
    return root;
}

double response_slope(const Medium& medium, double delta_c, double x)
{
    const double h = medium.options().slope_step;
    const double lo = std::max(0.0, x - h);
    const double hi = std::min(1.0, x + h);
    return (medium.response(delta_c, hi) - medium.response(delta_c, lo)) / (hi - lo);
}

FixedPointSet self_consistent_roots(const Medium& medium, double delta_c)
{
    const int n = medium.options().root_grid_points;
    std::vector<double> xs(n), gs(n);
    for (int k = 0; k < n; ++k) {
        xs[k] = static_cast<double>(k) / (n - 1);
        gs[k] = medium.response(delta_c, xs[k]) - xs[k];
    }

    std::vector<double> roots;
    for (int k = 0; k < n; ++k) {
        if (gs[k] == 0.0) {
            roots.push_back(xs[k]);
            continue;
        }
        if (k + 1 < n && gs[k + 1] != 0.0 && (gs[k] > 0) != (gs[k + 1] > 0))
            roots.push_back(refine_root(medium, delta_c, xs[k], xs[k + 1]));
    }

    // A same-sign dip whose interpolating parabola crosses zero inside the
    // neighbouring cells means two roots may hide between grid points.
    for (int k = 1; k + 1 < n; ++k) {
        const double a = gs[k - 1], b = gs[k], c = gs[k + 1];
        if (b == 0.0 || (a > 0) != (b > 0) || (c > 0) != (b > 0))
            continue;
        if (!(std::abs(b) < std::abs(a) && std::abs(b) < std::abs(c)))
            continue;
        const double curvature = a - 2.0 * b + c;
        if (curvature == 0.0)
            continue;
        const double offset = 0.5 * (a - c) / curvature; // vertex, in grid steps
        const double vertex = b - 0.25 * (a - c) * offset;
        if (std::abs(offset) <= 1.0 && (vertex > 0) != (b > 0))
            throw RootScanInconclusive(xs[k - 1], xs[k + 1],
                                       "possible root pair narrower than the scan grid in x " +
                                           describe(xs[k - 1], xs[k + 1]));
    }

    FixedPointSet set{delta_c, {}};
    for (double x : roots) {
        const double slope = response_slope(medium, delta_c, x);
        set.points.push_back(FixedPoint{x, medium.averaged_state(delta_c, x),
                                        slope < 1.0 ? Stability::stable : Stability::unstable, slope});
    }
    return set;
}

FixedPointSet self_consistent_roots(const ModelConfig& config, double delta_c, const SolverOptions& options)
{
    return self_consistent_roots(Medium(config, options), delta_c);
}

double relaxation_target(const Medium& medium, double delta_c, double x0)
{
    // Without feedback F is constant in x and F(0) is the only root.
    const MeanFieldParams& mf = medium.config().mean_field;
    if (mf.shift == 0.0 && mf.broadening == 0.0)
        return medium.response(delta_c, 0.0);

    x0 = std::clamp(x0, 0.0, 1.0);
    const double step = 1.0 / (medium.options().root_grid_points - 1);
    auto g = [&](double x) { return medium.response(delta_c, x) - x; };

    const double g0 = g(x0);
    if (g0 == 0.0)
        return x0;
    const bool upward = g0 > 0;
    double from = x0;
    for (;;) {
        const double to = upward ? std::min(1.0, from + step) : std::max(0.0, from - step);
        const double g_to = g(to);
        if (g_to == 0.0)
            return to;
        if ((g_to > 0) != upward)
            return upward ? refine_root(medium, delta_c, from, to) : refine_root(medium, delta_c, to, from);
        if (to == from)
            return to; // pinned at a boundary of [0, 1]
        from = to;
    }
}

// ---------------------------------------------------------------------------
// time evolution

namespace {

double ensemble_fraction(const Medium& medium, const std::vector<StateVector>& states)
{
    const auto& classes = medium.velocity_classes();
    const bool with_r2 = medium.config().mean_field.measure == RydbergMeasure::r1_and_r2;
    double x = 0.0;
    for (std::size_t k = 0; k < classes.size(); ++k) {
        double p = states[k](vec_index(kR1, kR1)).real();
        if (with_r2)
            p += states[k](vec_index(kR2, kR2)).real();
        x += classes[k].weight * p;
    }
    return std::clamp(x, 0.0, 1.0);
}

void derivative(const Medium& medium, double delta_c, const std::vector<StateVector>& in,
                std::vector<StateVector>& out)
{
    const double x = ensemble_fraction(medium, in);
    const auto& classes = medium.velocity_classes();
    for (std::size_t k = 0; k < classes.size(); ++k)
        out[k].noalias() = medium.liouvillian(delta_c, x, classes[k].velocity) * in[k];
}

Matrix4c average(const Medium& medium, const std::vector<StateVector>& states)
{
    Matrix4c sum = Matrix4c::Zero();
    const auto& classes = medium.velocity_classes();
    for (std::size_t k = 0; k < classes.size(); ++k)
        sum += classes[k].weight * unvectorize(states[k]);
    return sum;
}

Trajectory integrate(const Medium& medium, const DensityMatrix& rho0, double duration, double dt,
                     const TimeEvolveOptions& options)
{
    if (!(dt > 0) || !(duration >= 0))
        throw std::invalid_argument("time_evolve needs dt > 0 and duration >= 0");

    const double delta_c = medium.config().drive.delta_c;
    const std::size_t n_classes = medium.velocity_classes().size();
    std::vector<StateVector> y(n_classes, vectorize(rho0.matrix()));
    std::vector<StateVector> k1(n_classes), k2(n_classes), k3(n_classes), k4(n_classes), tmp(n_classes);

    const auto steps = static_cast<long>(std::llround(duration / dt));
    const double initial_trace = average(medium, y).trace().real();

    Trajectory traj;
    auto record = [&](double t) {
        const Matrix4c m = average(medium, y);
        traj.time.push_back(t);
        traj.states.push_back(trusted_density(m));
        traj.rydberg_fraction.push_back(ensemble_fraction(medium, y));
    };
    record(0.0);

    for (long step = 1; step <= steps; ++step) {
        derivative(medium, delta_c, y, k1);
        for (std::size_t k = 0; k < n_classes; ++k)
            tmp[k] = y[k] + 0.5 * dt * k1[k];
        derivative(medium, delta_c, tmp, k2);
        for (std::size_t k = 0; k < n_classes; ++k)
            tmp[k] = y[k] + 0.5 * dt * k2[k];
        derivative(medium, delta_c, tmp, k3);
        for (std::size_t k = 0; k < n_classes; ++k)
            tmp[k] = y[k] + dt * k3[k];
        derivative(medium, delta_c, tmp, k4);
        for (std::size_t k = 0; k < n_classes; ++k)
            y[k] += (dt / 6.0) * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);

        const Matrix4c m = average(medium, y);
        const DensityMatrix rho = trusted_density(m);
        const double t = step * dt;
        if (!m.allFinite() || rho.hermiticity_error() > options.invariant_tol ||
            std::abs(m.trace().real() - initial_trace) > options.trace_drift_tol ||
            rho.min_eigenvalue() < -options.invariant_tol) {
            std::ostringstream os;
            os << "density matrix left its invariants at t = " << t << " us (dt = " << dt << ")";
            throw StepSizeTooLarge(os.str());
        }
        if (step % options.record_every == 0 || step == steps)
            record(t);
    }
    return traj;
}

} // namespace

Trajectory time_evolve(const ModelConfig& config, const DensityMatrix& rho0, double duration, double dt,
                       const TimeEvolveOptions& options)
{
    const Medium medium(config);
    Trajectory traj = integrate(medium, rho0, duration, dt, options);
    if (options.self_check) {
        TimeEvolveOptions fine = options;
        fine.self_check = false;
        fine.record_every = std::max(1, static_cast<int>(std::llround(duration / dt)) * 2);
        const Trajectory half = integrate(medium, rho0, duration, 0.5 * dt, fine);
        const double diff = (half.final_state().matrix() - traj.final_state().matrix()).cwiseAbs().maxCoeff();
        if (diff > options.self_check_tol) {
            std::ostringstream os;
            os << "halving dt changes the endpoint by " << diff << " (dt = " << dt << ")";
            throw StepSizeTooLarge(os.str());
        }
    }
    return traj;
}

} // namespace rydbist
