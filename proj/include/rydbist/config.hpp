// Physical parameter set of the four-level ladder g - i - r1 - r2 and the
// run settings that travel with it in a config file.
//
// All angular frequencies are rad/us (see units.hpp). The config file speaks
// plain MHz and the reader/writer converts.
#pragma once

#include "rydbist/units.hpp"

#include <string>

namespace rydbist {

enum Level : int { kG = 0, kI = 1, kR1 = 2, kR2 = 3 };
inline constexpr int kLevelCount = 4;

struct LevelScheme {
    double probe_wavelength_nm = 852.0;
    double coupling_wavelength_nm = 510.0;
    int probe_direction = +1;    // propagation sign along the cell axis
    int coupling_direction = -1;

    /// Wavenumber 2*pi/lambda in rad/m.
    double probe_wavenumber() const;
    double coupling_wavenumber() const;
};

struct DriveParams {
    double omega_p = 0.0;   // probe Rabi frequency, g <-> i
    double omega_c = 0.0;   // coupling Rabi frequency, i <-> r1
    double omega_mw = 0.0;  // microwave Rabi frequency, r1 <-> r2
    double delta_p = 0.0;   // positive = blue
    double delta_c = 0.0;
    double delta_mw = 0.0;  // from the r1-r2 spacing
};

struct DecayParams {
    double gamma_i = mhz_to_angular(5.2);   // i -> g
    double gamma_r1 = mhz_to_angular(0.01); // r1 -> i
    double gamma_r2 = mhz_to_angular(0.01); // r2 -> i
    double dephasing_gi = mhz_to_angular(0.1);
    double dephasing_gr1 = mhz_to_angular(0.1);
    double dephasing_gr2 = mhz_to_angular(0.1);
};

/// Which populations make up the Rydberg fraction x.
enum class RydbergMeasure { r1_and_r2, r1_only };

struct MeanFieldParams {
    double shift = 0.0;       // V: detuning shift of r1 (and r2) per unit x
    double broadening = 0.0;  // beta: extra g-r1, g-r2 dephasing per unit x
    RydbergMeasure measure = RydbergMeasure::r1_and_r2;
};

struct DopplerParams {
    bool enabled = false;
    double most_probable_speed = 200.0; // m/s
    int classes = 101;                  // odd, so v = 0 is a node
    double cutoff = 3.0;                // in units of the most probable speed
};

struct CellParams {
    double optical_depth = 1.0;
};

/// Omega_MW = kappa * sqrt(P[mW]).
struct MicrowaveCoupling {
    double kappa = mhz_to_angular(300.0); // rad/us per sqrt(mW)
};

struct ModelConfig {
    LevelScheme levels;
    DriveParams drive;
    DecayParams decay;
    MeanFieldParams mean_field;
    DopplerParams doppler;
    CellParams cell;
    MicrowaveCoupling microwave;

    /// Throws ConfigError naming the offending key.
    void validate() const;
};

struct SolverOptions {
    int root_grid_points = 201;
    double root_tolerance = 1e-10;   // |F(x) - x| at an accepted root
    double slope_step = 1e-4;        // centered difference for dF/dx
    double capture_radius = 0.1;     // branch continuation, in x
    double degeneracy_threshold = 1e-8;
};

struct ScanWindow {
    double start = mhz_to_angular(-60.0);
    double stop = mhz_to_angular(40.0);
    int points = 401;
};

struct AnalysisOptions {
    double region_threshold = 0.01; // epsilon on |T_fwd - T_bwd|
};

/// Everything a config file carries.
struct RunConfig {
    ModelConfig model;
    SolverOptions solver;
    ScanWindow scan;
    AnalysisOptions analysis;

    void validate() const;
};

/// Parses the flat `section.key = value` format. Unknown keys, duplicate
/// keys, and malformed values throw ConfigError with the key path.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Writes every key. parse_config(format_config(c)) reproduces c exactly.
std::string format_config(const RunConfig& config);

bool operator==(const RunConfig& a, const RunConfig& b);

} // namespace rydbist
