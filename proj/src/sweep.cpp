#include "rydbist/sweep.hpp"

#include "rydbist/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rydbist {

const char* to_string(ScanDirection direction)
{
    return direction == ScanDirection::forward ? "forward" : "backward";
}

Spectrum Spectrum::ascending() const
{
    Spectrum out = *this;
    if (size() >= 2 && delta_c.front() > delta_c.back()) {
        std::reverse(out.delta_c.begin(), out.delta_c.end());
        std::reverse(out.transmission.begin(), out.transmission.end());
        std::reverse(out.branch_x.begin(), out.branch_x.end());
        std::reverse(out.jumped.begin(), out.jumped.end());
    }
    return out;
}

std::vector<double> HysteresisPair::grid() const { return forward.ascending().delta_c; }

std::vector<double> HysteresisPair::difference() const
{
    const Spectrum f = forward.ascending();
    const Spectrum b = backward.ascending();
    if (f.delta_c != b.delta_c)
        throw std::invalid_argument("hysteresis pair scans are on different grids");
    std::vector<double> out(f.size());
    for (std::size_t k = 0; k < f.size(); ++k)
        out[k] = f.transmission[k] - b.transmission[k];
    return out;
}

std::vector<double> make_grid(double start, double stop, int points)
{
    if (points < 2)
        throw std::invalid_argument("a scan grid needs at least 2 points");
    std::vector<double> grid(points);
    const double step = (stop - start) / (points - 1);
    for (int k = 0; k < points; ++k)
        grid[k] = start + k * step;
    grid.back() = stop;
    return grid;
}

std::vector<double> make_grid(const ScanWindow& window)
{
    return make_grid(std::min(window.start, window.stop), std::max(window.start, window.stop), window.points);
}

double transmission(const ModelConfig& config, Complex probe_coherence)
{
    return Medium(config).transmission(probe_coherence);
}

Medium::Observables averaged_observables(const ModelConfig& config, double delta_c, double x)
{
    return Medium(config).observe(delta_c, x);
}

Spectrum sweep_spectrum(const Medium& medium, const std::vector<double>& grid, ScanDirection direction)
{
    if (grid.size() < 2)
        throw std::invalid_argument("sweep_spectrum needs at least 2 grid points");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1]))
            throw std::invalid_argument("sweep_spectrum grid must be strictly ascending");

    std::vector<double> order = grid;
    if (direction == ScanDirection::backward)
        std::reverse(order.begin(), order.end());

    Spectrum out;
    out.direction = direction;
    out.delta_c.reserve(order.size());
    out.transmission.reserve(order.size());
    out.branch_x.reserve(order.size());
    out.jumped.reserve(order.size());

    const double capture = medium.options().capture_radius;
    double x_prev = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const double dc = order[k];
        double x = 0.0;
        try {
            x = relaxation_target(medium, dc, x_prev);
        } catch (const BranchTrackingFailed&) {
            throw;
        } catch (const NumericalError& e) {
            throw BranchTrackingFailed(dc, std::string("no stable branch at delta_c = ") +
                                               std::to_string(angular_to_mhz(dc)) + " MHz: " + e.what());
        }
        const bool jump = k > 0 && std::abs(x - x_prev) > capture;
        out.delta_c.push_back(dc);
        out.transmission.push_back(medium.transmission(medium.observe(dc, x).probe_coherence));
        out.branch_x.push_back(x);
        out.jumped.push_back(jump);
        x_prev = x;
    }
    return out;
}

Spectrum sweep_spectrum(const ModelConfig& config, const std::vector<double>& grid, ScanDirection direction,
                        const SolverOptions& options)
{
    return sweep_spectrum(Medium(config, options), grid, direction);
}

HysteresisPair hysteresis_pair(const Medium& medium, const std::vector<double>& grid)
{
    return {sweep_spectrum(medium, grid, ScanDirection::forward),
            sweep_spectrum(medium, grid, ScanDirection::backward)};
}

HysteresisPair hysteresis_pair(const ModelConfig& config, const std::vector<double>& grid,
                               const SolverOptions& options)
{
    return hysteresis_pair(Medium(config, options), grid);
}

void write_spectrum_csv(std::ostream& os, const Spectrum& spectrum)
{
    const Spectrum s = spectrum.ascending();
    os << "delta_c_mhz,transmission,branch_x\n";
    char line[128];
    for (std::size_t k = 0; k < s.size(); ++k) {
        std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g\n", angular_to_mhz(s.delta_c[k]), s.transmission[k],
                      s.branch_x[k]);
        os << line;
    }
}

Spectrum read_spectrum_csv(std::istream& is, ScanDirection direction)
{
    std::string line;
    if (!std::getline(is, line) || line.rfind("delta_c_mhz,transmission,branch_x", 0) != 0)
        throw std::runtime_error("spectrum CSV: missing header 'delta_c_mhz,transmission,branch_x'");
    Spectrum s;
    s.direction = direction;
    int row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty())
            continue;
        double dc = 0, t = 0, x = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &dc, &t, &x) != 3)
            throw std::runtime_error("spectrum CSV: malformed row " + std::to_string(row));
        s.delta_c.push_back(mhz_to_angular(dc));
        s.transmission.push_back(t);
        s.branch_x.push_back(x);
        s.jumped.push_back(false);
    }
    if (direction == ScanDirection::backward) {
        std::reverse(s.delta_c.begin(), s.delta_c.end());
        std::reverse(s.transmission.begin(), s.transmission.end());
        std::reverse(s.branch_x.begin(), s.branch_x.end());
    }
    return s;
}

} // namespace rydbist
