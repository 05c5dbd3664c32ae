#include "pfdsim/report.hpp"

#include "pfdsim/error.hpp"

#include <algorithm>
#include <sstream>

namespace pfdsim {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

std::optional<double> read_optional(const json& j, const char* key)
{
    const auto it = j.find(key);
    if (it == j.end() || it->is_null())
        return std::nullopt;
    return it->get<double>();
}

} // namespace

std::string json_number(double v)
{
    return json(v).dump();
}

json to_json(const ExperimentReport& r)
{
    return {
        {"width", r.point.width},
        {"length", r.point.length},
        {"corner", std::string(to_string(r.point.corner.name))},
        {"frequency", r.point.frequency},
        {"offset", r.point.offset},
        {"decision", std::string(to_string(r.decision))},
        {"dead_zone", optional_number(r.dead_zone)},
        {"f_max", optional_number(r.f_max)},
        {"avg_power", r.avg_power},
        {"up_rise_time", optional_number(r.up_rise_time)},
        {"mutual_exclusion_overlap", r.mutual_exclusion_overlap},
    };
}

ExperimentReport report_from_json(const json& j, const CornerTable& corners)
{
    try {
        ExperimentReport r;
        r.point.width = j.at("width").get<double>();
        r.point.length = j.at("length").get<double>();
        r.point.corner = corners.corner(parse_corner_name(j.at("corner").get<std::string>()));
        r.point.frequency = j.at("frequency").get<double>();
        r.point.offset = j.at("offset").get<double>();
        r.decision = parse_decision(j.at("decision").get<std::string>());
        r.dead_zone = read_optional(j, "dead_zone");
        r.f_max = read_optional(j, "f_max");
        r.avg_power = j.at("avg_power").get<double>();
        r.up_rise_time = read_optional(j, "up_rise_time");
        r.mutual_exclusion_overlap = j.at("mutual_exclusion_overlap").get<double>();
        return r;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed report: ") + e.what());
    }
}

bool RunDocument::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

json RunDocument::to_json() const
{
    json results_j = json::array();
    for (const ExperimentReport& r : results)
        results_j.push_back(pfdsim::to_json(r));
    json checks_j = json::array();
    for (const Check& c : checks)
        checks_j.push_back({{"name", c.name}, {"passed", c.passed}});
    return {{"experiment", experiment}, {"results", results_j}, {"checks", checks_j},
            {"passed", passed()},       {"extra", extra}};
}

RunDocument RunDocument::from_json(const json& j, const CornerTable& corners)
{
    try {
        RunDocument d;
        d.experiment = j.at("experiment").get<std::string>();
        for (const json& r : j.at("results"))
            d.results.push_back(report_from_json(r, corners));
        for (const json& c : j.value("checks", json::array()))
            d.checks.push_back({c.at("name").get<std::string>(), c.at("passed").get<bool>()});
        d.extra = j.value("extra", json::object());
        return d;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed report document: ") + e.what());
    }
}

std::vector<SummaryRow> summarize(const std::vector<ExperimentReport>& reports)
{
    std::vector<SummaryRow> rows;
    for (const ExperimentReport& r : reports) {
        auto it = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& row) {
            return row.width == r.point.width && row.length == r.point.length && row.corner == r.point.corner.name;
        });
        if (it == rows.end()) {
            rows.push_back({r.point.width, r.point.length, r.point.corner.name, {}, {}, {}, {}});
            it = rows.end() - 1;
        }
        if (!it->f_max)
            it->f_max = r.f_max;
        if (!it->dead_zone)
            it->dead_zone = r.dead_zone;
        if (!it->avg_power)
            it->avg_power = r.avg_power;
        if (!it->up_rise_time)
            it->up_rise_time = r.up_rise_time;
    }
    return rows;
}

json summary_json(const std::vector<SummaryRow>& rows)
{
    json out = json::array();
    for (const SummaryRow& r : rows) {
        out.push_back({
            {"width", r.width},
            {"length", r.length},
            {"corner", std::string(to_string(r.corner))},
            {"f_max", optional_number(r.f_max)},
            {"dead_zone", optional_number(r.dead_zone)},
            {"avg_power", optional_number(r.avg_power)},
            {"up_rise_time", optional_number(r.up_rise_time)},
            {"die_area", "out of scope"},
        });
    }
    return {{"rows", out}};
}

std::string summary_text(const std::vector<SummaryRow>& rows)
{
    const std::vector<std::string> header = {"width (m)", "length (m)",   "corner",    "f_max (Hz)",
                                             "dead zone (s)", "power (W)", "rise time (s)", "die area"};
    std::vector<std::vector<std::string>> cells;
    const auto cell = [](const std::optional<double>& v) { return v ? json_number(*v) : std::string("-"); };
    for (const SummaryRow& r : rows)
        cells.push_back({json_number(r.width), json_number(r.length), std::string(to_string(r.corner)),
                         cell(r.f_max), cell(r.dead_zone), cell(r.avg_power), cell(r.up_rise_time),
                         "out of scope"});

    std::vector<std::size_t> widths(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        widths[c] = header[c].size();
        for (const auto& row : cells)
            widths[c] = std::max(widths[c], row[c].size());
    }
    std::ostringstream out;
    const auto line = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << row[c];
            if (c + 1 < row.size())
                out << std::string(widths[c] - row[c].size() + 2, ' ');
        }
        out << '\n';
    };
    line(header);
    std::vector<std::string> rule;
    for (std::size_t w : widths)
        rule.emplace_back(w, '-');
    line(rule);
    for (const auto& row : cells)
        line(row);
    return out.str();
}

} // namespace pfdsim
