#pragma once

// Static SVG line charts. Output is a pure function of the input, so
// repeated runs produce byte-identical files.

#include "pfdsim/engine.hpp"
#include "pfdsim/experiments.hpp"

#include <string>
#include <vector>

namespace pfdsim {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    std::vector<std::string> x_categories;  // if set, x values are indices into this
    bool markers = false;
};

[[nodiscard]] std::string render_svg(const Chart& chart);

/// Probe waveforms (A, B, UP, DN when present) against time in ns.
[[nodiscard]] Chart waveform_chart(const TransientResult& r, const std::string& title);
/// `metric` is "rise_time", "power" or "f_max"; rows without it are skipped.
[[nodiscard]] Chart width_chart(const std::vector<ExperimentReport>& rows, const std::string& metric);
[[nodiscard]] Chart corner_chart(const std::vector<ExperimentReport>& rows);

} // namespace pfdsim
