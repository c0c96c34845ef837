// Quasi-static coupling-detuning scans with branch continuation.
#pragma once

#include "rydbist/doppler.hpp"
#include "rydbist/solver.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace rydbist {

enum class ScanDirection { forward, backward };

const char* to_string(ScanDirection direction);

struct Spectrum {
    ScanDirection direction = ScanDirection::forward;
    std::vector<double> delta_c;      // rad/us, in scan order
    std::vector<double> transmission; // [0, 1]
    std::vector<double> branch_x;     // Rydberg fraction followed
    std::vector<bool> jumped;         // true where the branch was lost (fold)

    std::size_t size() const { return delta_c.size(); }
    /// Copy with points reordered by ascending delta_c.
    Spectrum ascending() const;
};

struct HysteresisPair {
    Spectrum forward;
    Spectrum backward;

    /// Ascending grid shared by both scans.
    std::vector<double> grid() const;
    /// T_fwd - T_bwd on the ascending grid.
    std::vector<double> difference() const;
};

/// `points` equally spaced values from start to stop inclusive.
std::vector<double> make_grid(double start, double stop, int points);
std::vector<double> make_grid(const ScanWindow& window);

/// Beer-Lambert transmission of `probe_coherence` normalized so the bare
/// resonant two-level medium gives exp(-OD).
double transmission(const ModelConfig& config, Complex probe_coherence);

/// Velocity-averaged probe coherence and Rydberg fraction at a shared
/// mean-field x.
Medium::Observables averaged_observables(const ModelConfig& config, double delta_c, double x);

/// The first point relaxes from x = 0. Each later point continues the branch
/// from the previous x; a move larger than the capture radius is recorded as
/// a fold jump.
Spectrum sweep_spectrum(const Medium& medium, const std::vector<double>& grid, ScanDirection direction);
Spectrum sweep_spectrum(const ModelConfig& config, const std::vector<double>& grid, ScanDirection direction,
                        const SolverOptions& options = {});

HysteresisPair hysteresis_pair(const Medium& medium, const std::vector<double>& grid);
HysteresisPair hysteresis_pair(const ModelConfig& config, const std::vector<double>& grid,
                               const SolverOptions& options = {});

/// CSV with header `delta_c_mhz,transmission,branch_x`, rows in ascending
/// delta_c, 12 significant digits.
void write_spectrum_csv(std::ostream& os, const Spectrum& spectrum);
Spectrum read_spectrum_csv(std::istream& is, ScanDirection direction = ScanDirection::forward);

} // namespace rydbist
