#include "rydbist/model.hpp"

#include <cmath>
#include <stdexcept>

namespace rydbist {

namespace {

// rad/s -> rad/us
constexpr double kPerSecondToPerMicro = 1e-6;

void add_decay_channel(Superoperator& L, int to, int from, double rate)
{
    if (rate == 0.0)
        return;
    // D[C] rho with C = |to><from|:
    //   rate * (C rho C^+ - 1/2 {C^+C, rho}), C^+C = |from><from|
    L(vec_index(to, to), vec_index(from, from)) += rate;
    for (int k = 0; k < kLevelCount; ++k) {
        L(vec_index(from, k), vec_index(from, k)) -= 0.5 * rate;
        L(vec_index(k, from), vec_index(k, from)) -= 0.5 * rate;
    }
}

void add_dephasing(Superoperator& L, int a, int b, double rate)
{
    L(vec_index(a, b), vec_index(a, b)) -= rate;
    L(vec_index(b, a), vec_index(b, a)) -= rate;
}

} // namespace

StateVector vectorize(const Matrix4c& rho)
{
    StateVector v;
    for (int b = 0; b < kLevelCount; ++b)
        for (int a = 0; a < kLevelCount; ++a)
            v(vec_index(a, b)) = rho(a, b);
    return v;
}

Matrix4c unvectorize(const StateVector& v)
{
    Matrix4c rho;
    for (int b = 0; b < kLevelCount; ++b)
        for (int a = 0; a < kLevelCount; ++a)
            rho(a, b) = v(vec_index(a, b));
    return rho;
}

DriveParams doppler_shifted(const DriveParams& drive, double velocity, const LevelScheme& levels)
{
    DriveParams out = drive;
    if (velocity != 0.0) {
        out.delta_p -= levels.probe_direction * levels.probe_wavenumber() * velocity * kPerSecondToPerMicro;
        out.delta_c -=
            levels.coupling_direction * levels.coupling_wavenumber() * velocity * kPerSecondToPerMicro;
    }
    return out;
}

Matrix4c build_hamiltonian(const DriveParams& drive, double mf_shift, double velocity,
                           const LevelScheme& levels)
{
    const DriveParams d = doppler_shifted(drive, velocity, levels);
    Matrix4c h = Matrix4c::Zero();
    h(kI, kI) = -d.delta_p;
    h(kR1, kR1) = -d.delta_p - d.delta_c + mf_shift;
    h(kR2, kR2) = -d.delta_p - d.delta_c - d.delta_mw + mf_shift;
    h(kG, kI) = h(kI, kG) = 0.5 * d.omega_p;
    h(kI, kR1) = h(kR1, kI) = 0.5 * d.omega_c;
    h(kR1, kR2) = h(kR2, kR1) = 0.5 * d.omega_mw;
    return h;
}

Superoperator build_commutator(const Matrix4c& hamiltonian)
{
    // vec(H rho) = (I (x) H) vec(rho), vec(rho H) = (H^T (x) I) vec(rho)
    const Complex minus_i(0.0, -1.0);
    Superoperator L = Superoperator::Zero();
    for (int b = 0; b < kLevelCount; ++b) {
        for (int a = 0; a < kLevelCount; ++a) {
            const int row = vec_index(a, b);
            for (int k = 0; k < kLevelCount; ++k) {
                L(row, vec_index(k, b)) += minus_i * hamiltonian(a, k);
                L(row, vec_index(a, k)) -= minus_i * hamiltonian(k, b);
            }
        }
    }
    return L;
}

Superoperator build_dissipator(const DecayParams& decays)
{
    Superoperator L = Superoperator::Zero();
    add_decay_channel(L, kG, kI, decays.gamma_i);
    add_decay_channel(L, kI, kR1, decays.gamma_r1);
    add_decay_channel(L, kI, kR2, decays.gamma_r2);
    add_dephasing(L, kG, kI, decays.dephasing_gi);
    add_dephasing(L, kG, kR1, decays.dephasing_gr1);
    add_dephasing(L, kG, kR2, decays.dephasing_gr2);
    return L;
}

Superoperator build_liouvillian(const Matrix4c& hamiltonian, const DecayParams& decays)
{
    return build_commutator(hamiltonian) + build_dissipator(decays);
}

double rabi_from_power(double power_mw, double kappa)
{
    if (!(power_mw >= 0.0))
        throw std::invalid_argument("microwave power must be >= 0 (linear units)");
    return kappa * std::sqrt(power_mw);
}

} // namespace rydbist
