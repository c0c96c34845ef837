#include "rydbist/config.hpp"

#include "rydbist/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace rydbist {

double LevelScheme::probe_wavenumber() const { return kTwoPi / (probe_wavelength_nm * 1e-9); }

double LevelScheme::coupling_wavenumber() const { return kTwoPi / (coupling_wavelength_nm * 1e-9); }

namespace {

void require(bool ok, const char* key, const char* message)
{
    if (!ok)
        throw ConfigError(key, message);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

std::string format_double(double value)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& text)
{
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (!text.empty() && *first == '+')
        ++first;
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last)
        throw ConfigError(key, "expected a number, got '" + text + "'");
    return value;
}

int parse_int(const std::string& key, const std::string& text)
{
    int value = 0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (!text.empty() && *first == '+')
        ++first;
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last)
        throw ConfigError(key, "expected an integer, got '" + text + "'");
    return value;
}

bool parse_bool(const std::string& key, const std::string& text)
{
    if (text == "true" || text == "1")
        return true;
    if (text == "false" || text == "0")
        return false;
    throw ConfigError(key, "expected true or false, got '" + text + "'");
}

struct Field {
    std::string key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

template <class Access>
Field angular_field(std::string key, Access access)
{
    return {std::move(key),
            [access](const RunConfig& c) {
                return format_double(angular_to_mhz_exact(access(const_cast<RunConfig&>(c))));
            },
            [access](RunConfig& c, const std::string& k, const std::string& v) {
                access(c) = mhz_to_angular(parse_double(k, v));
            }};
}

template <class Access>
Field real_field(std::string key, Access access)
{
    return {std::move(key),
            [access](const RunConfig& c) { return format_double(access(const_cast<RunConfig&>(c))); },
            [access](RunConfig& c, const std::string& k, const std::string& v) {
                access(c) = parse_double(k, v);
            }};
}

template <class Access>
Field int_field(std::string key, Access access)
{
    return {std::move(key),
            [access](const RunConfig& c) { return std::to_string(access(const_cast<RunConfig&>(c))); },
            [access](RunConfig& c, const std::string& k, const std::string& v) {
                access(c) = parse_int(k, v);
            }};
}

const std::vector<Field>& fields()
{
    static const std::vector<Field> table = {
        real_field("levels.probe_wavelength_nm", [](RunConfig& c) -> double& { return c.model.levels.probe_wavelength_nm; }),
        real_field("levels.coupling_wavelength_nm", [](RunConfig& c) -> double& { return c.model.levels.coupling_wavelength_nm; }),
        int_field("levels.probe_direction", [](RunConfig& c) -> int& { return c.model.levels.probe_direction; }),
        int_field("levels.coupling_direction", [](RunConfig& c) -> int& { return c.model.levels.coupling_direction; }),

        angular_field("drive.omega_p_mhz", [](RunConfig& c) -> double& { return c.model.drive.omega_p; }),
        angular_field("drive.omega_c_mhz", [](RunConfig& c) -> double& { return c.model.drive.omega_c; }),
        angular_field("drive.omega_mw_mhz", [](RunConfig& c) -> double& { return c.model.drive.omega_mw; }),
        angular_field("drive.delta_p_mhz", [](RunConfig& c) -> double& { return c.model.drive.delta_p; }),
        angular_field("drive.delta_c_mhz", [](RunConfig& c) -> double& { return c.model.drive.delta_c; }),
        angular_field("drive.delta_mw_mhz", [](RunConfig& c) -> double& { return c.model.drive.delta_mw; }),

        angular_field("decay.gamma_i_mhz", [](RunConfig& c) -> double& { return c.model.decay.gamma_i; }),
        angular_field("decay.gamma_r1_mhz", [](RunConfig& c) -> double& { return c.model.decay.gamma_r1; }),
        angular_field("decay.gamma_r2_mhz", [](RunConfig& c) -> double& { return c.model.decay.gamma_r2; }),
        angular_field("decay.dephasing_gi_mhz", [](RunConfig& c) -> double& { return c.model.decay.dephasing_gi; }),
        angular_field("decay.dephasing_gr1_mhz", [](RunConfig& c) -> double& { return c.model.decay.dephasing_gr1; }),
        angular_field("decay.dephasing_gr2_mhz", [](RunConfig& c) -> double& { return c.model.decay.dephasing_gr2; }),

        angular_field("mean_field.shift_mhz", [](RunConfig& c) -> double& { return c.model.mean_field.shift; }),
        angular_field("mean_field.broadening_mhz", [](RunConfig& c) -> double& { return c.model.mean_field.broadening; }),
        {"mean_field.measure",
         [](const RunConfig& c) {
             return std::string(c.model.mean_field.measure == RydbergMeasure::r1_only ? "r1" : "r1+r2");
         },
         [](RunConfig& c, const std::string& k, const std::string& v) {
             if (v == "r1+r2")
                 c.model.mean_field.measure = RydbergMeasure::r1_and_r2;
             else if (v == "r1")
                 c.model.mean_field.measure = RydbergMeasure::r1_only;
             else
                 throw ConfigError(k, "expected r1+r2 or r1, got '" + v + "'");
         }},

        {"doppler.enabled",
         [](const RunConfig& c) { return std::string(c.model.doppler.enabled ? "true" : "false"); },
         [](RunConfig& c, const std::string& k, const std::string& v) { c.model.doppler.enabled = parse_bool(k, v); }},
        real_field("doppler.most_probable_speed_m_s", [](RunConfig& c) -> double& { return c.model.doppler.most_probable_speed; }),
        int_field("doppler.classes", [](RunConfig& c) -> int& { return c.model.doppler.classes; }),
        real_field("doppler.cutoff", [](RunConfig& c) -> double& { return c.model.doppler.cutoff; }),

        real_field("cell.optical_depth", [](RunConfig& c) -> double& { return c.model.cell.optical_depth; }),
        angular_field("microwave.kappa_mhz_per_sqrt_mw", [](RunConfig& c) -> double& { return c.model.microwave.kappa; }),

        int_field("solver.root_grid_points", [](RunConfig& c) -> int& { return c.solver.root_grid_points; }),
        real_field("solver.root_tolerance", [](RunConfig& c) -> double& { return c.solver.root_tolerance; }),
        real_field("solver.slope_step", [](RunConfig& c) -> double& { return c.solver.slope_step; }),
        real_field("solver.capture_radius", [](RunConfig& c) -> double& { return c.solver.capture_radius; }),
        real_field("solver.degeneracy_threshold", [](RunConfig& c) -> double& { return c.solver.degeneracy_threshold; }),

        angular_field("scan.start_mhz", [](RunConfig& c) -> double& { return c.scan.start; }),
        angular_field("scan.stop_mhz", [](RunConfig& c) -> double& { return c.scan.stop; }),
        int_field("scan.points", [](RunConfig& c) -> int& { return c.scan.points; }),

        real_field("analysis.region_threshold", [](RunConfig& c) -> double& { return c.analysis.region_threshold; }),
    };
    return table;
}

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace

void ModelConfig::validate() const
{
    require(levels.probe_wavelength_nm > 0 && std::isfinite(levels.probe_wavelength_nm),
            "levels.probe_wavelength_nm", "must be positive");
    require(levels.coupling_wavelength_nm > 0 && std::isfinite(levels.coupling_wavelength_nm),
            "levels.coupling_wavelength_nm", "must be positive");
    require(levels.probe_direction == 1 || levels.probe_direction == -1, "levels.probe_direction",
            "must be +1 or -1");
    require(levels.coupling_direction == 1 || levels.coupling_direction == -1,
            "levels.coupling_direction", "must be +1 or -1");

    require(finite_nonneg(drive.omega_p), "drive.omega_p_mhz", "must be finite and >= 0");
    require(finite_nonneg(drive.omega_c), "drive.omega_c_mhz", "must be finite and >= 0");
    require(finite_nonneg(drive.omega_mw), "drive.omega_mw_mhz", "must be finite and >= 0");
    require(std::isfinite(drive.delta_p), "drive.delta_p_mhz", "must be finite");
    require(std::isfinite(drive.delta_c), "drive.delta_c_mhz", "must be finite");
    require(std::isfinite(drive.delta_mw), "drive.delta_mw_mhz", "must be finite");

    require(finite_nonneg(decay.gamma_i), "decay.gamma_i_mhz", "must be finite and >= 0");
    require(finite_nonneg(decay.gamma_r1), "decay.gamma_r1_mhz", "must be finite and >= 0");
    require(finite_nonneg(decay.gamma_r2), "decay.gamma_r2_mhz", "must be finite and >= 0");
    require(finite_nonneg(decay.dephasing_gi), "decay.dephasing_gi_mhz", "must be finite and >= 0");
    require(finite_nonneg(decay.dephasing_gr1), "decay.dephasing_gr1_mhz", "must be finite and >= 0");
    require(finite_nonneg(decay.dephasing_gr2), "decay.dephasing_gr2_mhz", "must be finite and >= 0");

    require(std::isfinite(mean_field.shift), "mean_field.shift_mhz", "must be finite");
    require(finite_nonneg(mean_field.broadening), "mean_field.broadening_mhz", "must be finite and >= 0");

    require(doppler.classes >= 1 && doppler.classes % 2 == 1, "doppler.classes", "must be odd and >= 1");
    require(doppler.cutoff > 0 && std::isfinite(doppler.cutoff), "doppler.cutoff", "must be positive");
    require(doppler.most_probable_speed > 0 && std::isfinite(doppler.most_probable_speed),
            "doppler.most_probable_speed_m_s", "must be positive");

    require(finite_nonneg(cell.optical_depth), "cell.optical_depth", "must be finite and >= 0");
    require(microwave.kappa > 0 && std::isfinite(microwave.kappa), "microwave.kappa_mhz_per_sqrt_mw",
            "must be positive");
}

void RunConfig::validate() const
{
    model.validate();
    require(solver.root_grid_points >= 3, "solver.root_grid_points", "must be >= 3");
    require(solver.root_tolerance > 0, "solver.root_tolerance", "must be positive");
    require(solver.slope_step > 0 && solver.slope_step < 0.1, "solver.slope_step", "must be in (0, 0.1)");
    require(solver.capture_radius > 0, "solver.capture_radius", "must be positive");
    require(solver.degeneracy_threshold > 0, "solver.degeneracy_threshold", "must be positive");
    require(std::isfinite(scan.start), "scan.start_mhz", "must be finite");
    require(std::isfinite(scan.stop) && scan.stop != scan.start, "scan.stop_mhz",
            "must be finite and differ from scan.start_mhz");
    require(scan.points >= 2, "scan.points", "must be >= 2");
    require(analysis.region_threshold > 0, "analysis.region_threshold", "must be positive");
}

RunConfig parse_config(const std::string& text)
{
    std::map<std::string, const Field*> index;
    for (const auto& f : fields())
        index.emplace(f.key, &f);

    RunConfig config;
    std::map<std::string, int> seen;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto it = index.find(key);
        if (it == index.end())
            throw ConfigError(key, "unknown key (line " + std::to_string(line_no) + ")");
        if (auto [pos, fresh] = seen.emplace(key, line_no); !fresh)
            throw ConfigError(key, "duplicate key (lines " + std::to_string(pos->second) + " and " +
                                       std::to_string(line_no) + ")");
        if (value.empty())
            throw ConfigError(key, "missing value (line " + std::to_string(line_no) + ")");
        it->second->set(config, key, value);
    }
    config.validate();
    return config;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream file(path);
    if (!file)
        throw ConfigError("", "cannot read config file '" + path + "'");
    std::stringstream buffer;
    buffer << file.rdbuf();
    return parse_config(buffer.str());
}

std::string format_config(const RunConfig& config)
{
    std::string out;
    std::string section;
    for (const auto& f : fields()) {
        const std::string head = f.key.substr(0, f.key.find('.'));
        if (head != section) {
            if (!section.empty())
                out += '\n';
            section = head;
        }
        out += f.key + " = " + f.get(config) + '\n';
    }
    return out;
}

bool operator==(const RunConfig& a, const RunConfig& b)
{
    for (const auto& f : fields())
        if (f.get(a) != f.get(b))
            return false;
    return true;
}

} // namespace rydbist
