#pragma once

// Named experiments driven by string options: the layer behind the C API and
// the command-line tool.

#include "pfdsim/experiments.hpp"
#include "pfdsim/report.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pfdsim {

struct RunConfig {
    ExperimentSettings settings;
    DesignPoint point;
    std::optional<int> periods;  // per-experiment default when unset
    DeadZoneSearch dead_zone;
    FmaxSearch fmax;
    WidthSweep widths;
    std::optional<double> f_ref;  // default: point.frequency
    std::optional<double> f_fb;   // default: 0.8 * f_ref
    std::vector<CornerName> corners = {CornerName::TT, CornerName::FF, CornerName::FS, CornerName::SF,
                                       CornerName::SS};

    /// Replaces the calibration and re-applies the current corner from the
    /// new corner table.
    void set_calibration(const Calibration& cal);
};

/// Sets one option from text. Keys: width, length, corner, freq, offset,
/// dt, t_stop, integrator, periods, jobs, reltol, abstol_v, abstol_i, gmin,
/// lo, hi, tol, f_lo, f_hi, tol_rel, offset_fraction, check_periods, f_ref,
/// f_fb, w_lo, w_hi, steps, with_fmax, corners (comma list). Throws
/// InvalidArgument on unknown keys or bad values.
void set_option(RunConfig& config, std::string_view key, std::string_view value);

[[nodiscard]] const std::vector<std::string>& experiment_names();

struct RunOutput {
    RunDocument document;
    std::optional<TransientResult> waves;
    std::vector<std::pair<std::string, std::string>> plots;  // file name, SVG

    [[nodiscard]] std::string summary() const;
    [[nodiscard]] std::string report_json() const;
};

/// Experiments: transient, deadzone, fmax, halfperiod, mismatch,
/// sweep-width, corners, characterize (dead zone, f_max and one operating
/// run at the same design point).
[[nodiscard]] RunOutput run_experiment(const RunConfig& config, std::string_view experiment);

/// Merges report.json documents into one summary table.
[[nodiscard]] RunOutput summarize_documents(const std::vector<std::string>& json_texts, const CornerTable& corners);

/// report.json, summary.txt, waves.csv (when there are waves) and, with
/// `plots`, every plot_*.svg. Creates the directory.
void write_outputs(const RunOutput& out, const std::filesystem::path& dir, bool plots);

} // namespace pfdsim
