// Four-level ladder Hamiltonian and Lindblad generator.
//
// Basis ordering is g, i, r1, r2. The rotating-frame Hamiltonian has the
// cumulative detunings on the diagonal,
//
//   H = diag(0, -dp, -dp - dc + s, -dp - dc - dmw + s)
//     + Op/2 |g><i| + Oc/2 |i><r1| + Omw/2 |r1><r2| + h.c.,
//
// where s is the mean-field shift (s = -V x in the self-consistent problem)
// and dp, dc are the Doppler-shifted detunings seen by a velocity class.
// Density matrices are vectorized column-major: vec(rho)[a + 4 b] = rho(a, b).
#pragma once

#include "rydbist/config.hpp"

#include <Eigen/Dense>
#include <complex>

namespace rydbist {

using Complex = std::complex<double>;
using Matrix4c = Eigen::Matrix<Complex, 4, 4>;
using Superoperator = Eigen::Matrix<Complex, 16, 16>;
using StateVector = Eigen::Matrix<Complex, 16, 1>;

inline constexpr int vec_index(int row, int col) { return row + kLevelCount * col; }

StateVector vectorize(const Matrix4c& rho);
Matrix4c unvectorize(const StateVector& v);

/// Detunings seen by an atom moving with `velocity` (m/s) along the cell axis.
/// A beam with propagation sign s and wavenumber k sees delta - s*k*v.
DriveParams doppler_shifted(const DriveParams& drive, double velocity, const LevelScheme& levels);

Matrix4c build_hamiltonian(const DriveParams& drive, double mf_shift, double velocity,
                           const LevelScheme& levels = {});

/// Dissipative part only: decay channels i->g, r1->i, r2->i and the extra
/// pure dephasing on the g-i, g-r1, g-r2 coherences.
Superoperator build_dissipator(const DecayParams& decays);

/// Coherent part -i[H, .].
Superoperator build_commutator(const Matrix4c& hamiltonian);

Superoperator build_liouvillian(const Matrix4c& hamiltonian, const DecayParams& decays);

/// Omega_MW = kappa * sqrt(P). P is linear power (mW); negative P throws.
double rabi_from_power(double power_mw, double kappa);

} // namespace rydbist
