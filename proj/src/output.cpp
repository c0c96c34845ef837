#include "rydbist/output.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace rydbist {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 70, kRight = 20, kTop = 36, kBottom = 52;

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v)
    {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void finish()
    {
        if (!std::isfinite(lo)) {
            lo = 0;
            hi = 1;
        } else if (hi == lo) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

void header(std::ostream& os, const std::string& title)
{
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty())
        os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
           << "</text>\n";
}

void axes(std::ostream& os, const Range& xr, const Range& yr, const std::string& x_label,
          const std::string& y_label)
{
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    os << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\"" << y0 - y1
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = x0 + (x1 - x0) * i / 4.0;
        const double fy = y0 - (y0 - y1) * i / 4.0;
        os << "<text x=\"" << fx << "\" y=\"" << y0 + 16 << "\" text-anchor=\"middle\">"
           << num(xr.lo + (xr.hi - xr.lo) * i / 4.0) << "</text>\n";
        os << "<text x=\"" << x0 - 6 << "\" y=\"" << fy + 4 << "\" text-anchor=\"end\">"
           << num(yr.lo + (yr.hi - yr.lo) * i / 4.0) << "</text>\n";
    }
    os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
       << escape(x_label) << "</text>\n";
    os << "<text transform=\"translate(16," << (y0 + y1) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape(y_label) << "</text>\n";
}

// Blue (-1) through white (0) to red (+1).
std::string diverging(double t)
{
    t = std::clamp(t, -1.0, 1.0);
    int r = 255, g = 255, b = 255;
    if (t < 0) {
        r = static_cast<int>(std::lround(255 * (1 + t)));
        g = static_cast<int>(std::lround(255 * (1 + 0.6 * t)));
    } else {
        g = static_cast<int>(std::lround(255 * (1 - 0.6 * t)));
        b = static_cast<int>(std::lround(255 * (1 - t)));
    }
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

} // namespace

void write_line_plot_svg(std::ostream& os, const std::vector<SvgSeries>& series, const std::string& x_label,
                         const std::string& y_label, const std::string& title)
{
    Range xr, yr;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size())
            throw std::invalid_argument("svg series '" + s.name + "': x and y differ in length");
        for (double v : s.x)
            xr.add(v);
        for (double v : s.y)
            yr.add(v);
    }
    xr.finish();
    yr.finish();
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    auto px = [&](double v) { return x0 + (v - xr.lo) / (xr.hi - xr.lo) * (x1 - x0); };
    auto py = [&](double v) { return y0 - (v - yr.lo) / (yr.hi - yr.lo) * (y0 - y1); };

    header(os, title);
    axes(os, xr, yr, x_label, y_label);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        os << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << escape(s.color) << "\" points=\"";
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k]))
                continue;
            os << num(px(s.x[k])) << ',' << num(py(s.y[k])) << ' ';
        }
        os << "\"/>\n";
        os << "<text x=\"" << x1 - 8 << "\" y=\"" << y1 + 16 + 14 * i << "\" text-anchor=\"end\" fill=\""
           << escape(s.color) << "\">" << escape(s.name) << "</text>\n";
    }
    os << "</svg>\n";
}

void write_heatmap_svg(std::ostream& os, const PhaseDiagram& diagram, const std::string& title)
{
    const std::size_t rows = diagram.axis.values.size();
    const std::size_t cols = diagram.delta_c.size();
    Range xr, yr;
    for (double dc : diagram.delta_c)
        xr.add(angular_to_mhz(dc));
    for (double v : diagram.axis.values)
        yr.add(diagram.axis.display(v));
    xr.finish();
    yr.finish();
    double scale = 0.0;
    for (std::size_t r = 0; r < rows; ++r)
        if (diagram.row_valid(r))
            for (double v : diagram.difference[r])
                scale = std::max(scale, std::abs(v));
    if (scale == 0.0)
        scale = 1.0;

    header(os, title.empty() ? "T_fwd - T_bwd (|max| = " + num(scale) + ")" : title);
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    const double cw = (x1 - x0) / std::max<std::size_t>(cols, 1);
    const double ch = (y0 - y1) / std::max<std::size_t>(rows, 1);
    for (std::size_t r = 0; r < rows; ++r) {
        const double y = y0 - (r + 1) * ch;
        for (std::size_t k = 0; k < cols; ++k) {
            const std::string fill = diagram.row_valid(r) ? diverging(diagram.difference[r][k] / scale) : "#bbbbbb";
            os << "<rect x=\"" << num(x0 + k * cw) << "\" y=\"" << num(y) << "\" width=\"" << num(cw + 0.05)
               << "\" height=\"" << num(ch + 0.05) << "\" fill=\"" << fill << "\"/>\n";
        }
    }
    axes(os, xr, yr, "delta_c (MHz)", diagram.axis.label());
    os << "</svg>\n";
}

void write_manifest(std::ostream& os, const RunManifest& m)
{
    nlohmann::ordered_json j;
    j["tool_version"] = m.tool_version;
    j["subcommand"] = m.subcommand;
    j["arguments"] = m.arguments;
    j["config"] = m.config_text;
    j["outputs"] = nlohmann::ordered_json::array();
    for (const auto& o : m.outputs)
        j["outputs"].push_back({{"role", o.role}, {"path", o.path}});
    j["wall_seconds"] = m.wall_seconds;
    os << j.dump(2) << '\n';
}

RunManifest read_manifest(std::istream& is)
{
    RunManifest m;
    try {
        nlohmann::json j;
        is >> j;
        m.tool_version = j.at("tool_version").get<std::string>();
        m.subcommand = j.at("subcommand").get<std::string>();
        m.arguments = j.at("arguments").get<std::vector<std::string>>();
        m.config_text = j.at("config").get<std::string>();
        for (const auto& o : j.at("outputs"))
            m.outputs.push_back({o.at("role").get<std::string>(), o.at("path").get<std::string>()});
        m.wall_seconds = j.value("wall_seconds", 0.0);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("manifest: ") + e.what());
    }
    return m;
}

} // namespace rydbist
