#pragma once

// JSON / plain-text rendering of experiment results, and the summary table
// that merges results per design (width, length, corner).

#include "pfdsim/experiments.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace pfdsim {

/// Flat object of scalars, SI units; absent metrics are null.
[[nodiscard]] nlohmann::json to_json(const ExperimentReport& r);
/// Inverse of to_json. Corner scales are looked up in `corners`.
[[nodiscard]] ExperimentReport report_from_json(const nlohmann::json& j, const CornerTable& corners = {});

struct Check {
    std::string name;
    bool passed = false;
    bool operator==(const Check&) const = default;
};

/// The document written as report.json by the command-line tool.
struct RunDocument {
    std::string experiment;
    std::vector<ExperimentReport> results;
    std::vector<Check> checks;
    nlohmann::json extra = nlohmann::json::object();

    [[nodiscard]] bool passed() const;
    [[nodiscard]] nlohmann::json to_json() const;
    static RunDocument from_json(const nlohmann::json& j, const CornerTable& corners = {});
};

struct SummaryRow {
    double width = 0.0;
    double length = 0.0;
    CornerName corner = CornerName::TT;
    std::optional<double> f_max;
    std::optional<double> dead_zone;
    std::optional<double> avg_power;
    std::optional<double> up_rise_time;
};

/// One row per distinct (width, length, corner) in first-seen order; each
/// metric is taken from the first result that has it.
[[nodiscard]] std::vector<SummaryRow> summarize(const std::vector<ExperimentReport>& reports);

[[nodiscard]] nlohmann::json summary_json(const std::vector<SummaryRow>& rows);
/// Aligned table; missing metrics print as "-", die area as "out of scope".
/// Numbers use the same formatting as summary_json.
[[nodiscard]] std::string summary_text(const std::vector<SummaryRow>& rows);

/// Shortest round-trip text of v, as nlohmann::json prints it.
[[nodiscard]] std::string json_number(double v);

} // namespace pfdsim
