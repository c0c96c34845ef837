// File artifacts beyond the CSV contracts: static SVG renderings and the run
// manifest.
#pragma once

#include "rydbist/analysis.hpp"
#include "rydbist/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace rydbist {

struct SvgSeries {
    std::string name;
    std::string color; // any SVG color
    std::vector<double> x;
    std::vector<double> y;
};

void write_line_plot_svg(std::ostream& os, const std::vector<SvgSeries>& series, const std::string& x_label,
                         const std::string& y_label, const std::string& title = {});

/// Diverging colormap over [-max|dT|, max|dT|]; invalid rows are grey.
void write_heatmap_svg(std::ostream& os, const PhaseDiagram& diagram, const std::string& title = {});

struct OutputFile {
    std::string role; // e.g. "spectrum_forward", "phasemap", "svg"
    std::string path;
};

struct RunManifest {
    std::string tool_version;
    std::string subcommand;
    std::string config_text;          // format_config of the resolved run config
    std::vector<std::string> arguments; // subcommand arguments needed for replay
    std::vector<OutputFile> outputs;
    double wall_seconds = 0.0;
};

void write_manifest(std::ostream& os, const RunManifest& manifest);
RunManifest read_manifest(std::istream& is);

} // namespace rydbist
