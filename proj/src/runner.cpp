#include "pfdsim/runner.hpp"

#include "pfdsim/error.hpp"
#include "pfdsim/plot.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace pfdsim {

using nlohmann::json;

namespace {

int parse_int(std::string_view s, std::string_view key)
{
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw InvalidArgument(std::string(key) + ": '" + std::string(s) + "' is not an integer");
    return v;
}

bool parse_bool(std::string_view s, std::string_view key)
{
    if (s == "1" || s == "true" || s == "on" || s == "yes")
        return true;
    if (s == "0" || s == "false" || s == "off" || s == "no")
        return false;
    throw InvalidArgument(std::string(key) + ": '" + std::string(s) + "' is not a boolean");
}

std::vector<CornerName> parse_corner_list(std::string_view s)
{
    std::vector<CornerName> out;
    while (!s.empty()) {
        const auto comma = s.find(',');
        const std::string_view item = text::trim(s.substr(0, comma));
        if (!item.empty())
            out.push_back(parse_corner_name(item));
        if (comma == std::string_view::npos)
            break;
        s.remove_prefix(comma + 1);
    }
    if (out.empty())
        throw InvalidArgument("corners: empty list");
    return out;
}

Decision expected_decision(double offset)
{
    return offset > 0.0 ? Decision::LeadA : offset < 0.0 ? Decision::LeadB : Decision::Undetermined;
}

json verdicts_json(const std::vector<PeriodVerdict>& periods)
{
    json out = json::array();
    for (const PeriodVerdict& v : periods)
        out.push_back({{"decision", std::string(to_string(v.decision))}, {"reset", v.reset}});
    return out;
}

bool strictly(const std::vector<ExperimentReport>& rows, const std::function<std::optional<double>(const ExperimentReport&)>& get,
              bool increasing)
{
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        const auto a = get(rows[i]), b = get(rows[i + 1]);
        if (!a || !b || (increasing ? !(*b > *a) : !(*b < *a)))
            return false;
    }
    return true;
}

void add_wave_plot(RunOutput& out, const std::string& title)
{
    out.plots.emplace_back("plot_waves.svg", render_svg(waveform_chart(*out.waves, title)));
}

std::string describe(const DesignPoint& p)
{
    std::ostringstream o;
    o << "W=" << p.width * 1e9 << "nm L=" << p.length * 1e9 << "nm " << to_string(p.corner.name) << ' '
      << p.frequency * 1e-9 << "GHz offset=" << p.offset * 1e12 << "ps";
    return o.str();
}

} // namespace

void RunConfig::set_calibration(const Calibration& cal)
{
    cal.validate();
    settings.calibration = cal;
    point.corner = cal.corners.corner(point.corner.name);
}

void set_option(RunConfig& c, std::string_view key, std::string_view value)
{
    const std::string k(key);
    const auto num = [&] { return text::parse_double(text::trim(value), k); };
    const auto integer = [&] { return parse_int(text::trim(value), key); };

    static const std::map<std::string, std::function<void(RunConfig&, double)>, std::less<>> doubles = {
        {"width", [](RunConfig& r, double v) { r.point.width = v; }},
        {"length", [](RunConfig& r, double v) { r.point.length = v; }},
        {"freq", [](RunConfig& r, double v) { r.point.frequency = v; }},
        {"offset", [](RunConfig& r, double v) { r.point.offset = v; }},
        {"dt", [](RunConfig& r, double v) { r.settings.dt = v; }},
        {"t_stop", [](RunConfig& r, double v) { r.settings.t_stop = v; }},
        {"reltol", [](RunConfig& r, double v) { r.settings.solver.reltol = v; }},
        {"abstol_v", [](RunConfig& r, double v) { r.settings.solver.abstol_v = v; }},
        {"abstol_i", [](RunConfig& r, double v) { r.settings.solver.abstol_i = v; }},
        {"gmin", [](RunConfig& r, double v) { r.settings.solver.gmin = v; }},
        {"lo", [](RunConfig& r, double v) { r.dead_zone.lo = v; }},
        {"hi", [](RunConfig& r, double v) { r.dead_zone.hi = v; }},
        {"tol", [](RunConfig& r, double v) { r.dead_zone.tol = v; }},
        {"f_lo", [](RunConfig& r, double v) { r.fmax.f_lo = r.widths.fmax.f_lo = v; }},
        {"f_hi", [](RunConfig& r, double v) { r.fmax.f_hi = r.widths.fmax.f_hi = v; }},
        {"tol_rel", [](RunConfig& r, double v) { r.fmax.tol_rel = r.widths.fmax.tol_rel = v; }},
        {"offset_fraction", [](RunConfig& r, double v) { r.fmax.offset_fraction = r.widths.fmax.offset_fraction = v; }},
        {"f_ref", [](RunConfig& r, double v) { r.f_ref = v; }},
        {"f_fb", [](RunConfig& r, double v) { r.f_fb = v; }},
        {"w_lo", [](RunConfig& r, double v) { r.widths.w_lo = v; }},
        {"w_hi", [](RunConfig& r, double v) { r.widths.w_hi = v; }},
    };

    if (const auto it = doubles.find(key); it != doubles.end()) {
        const double v = num();
        if (!std::isfinite(v))
            throw InvalidArgument(k + " must be finite");
        if (k != "offset" && k != "lo" && v <= 0.0)
            throw InvalidArgument(k + " must be > 0");
        if (k == "lo" && v < 0.0)
            throw InvalidArgument("lo must be >= 0");
        it->second(c, v);
    } else if (k == "corner") {
        c.point.corner = c.settings.calibration.corners.corner(parse_corner_name(text::trim(value)));
    } else if (k == "integrator") {
        c.settings.solver.integrator = parse_integrator(text::trim(value));
    } else if (k == "periods") {
        const int n = integer();
        if (n < 1)
            throw InvalidArgument("periods must be >= 1");
        c.periods = n;
        c.dead_zone.n_periods = n;
    } else if (k == "jobs") {
        const int n = integer();
        if (n < 1)
            throw InvalidArgument("jobs must be >= 1");
        c.settings.jobs = n;
    } else if (k == "check_periods") {
        const int n = integer();
        if (n < 1)
            throw InvalidArgument("check_periods must be >= 1");
        c.fmax.check_periods = c.widths.fmax.check_periods = n;
    } else if (k == "steps") {
        const int n = integer();
        if (n < 2)
            throw InvalidArgument("steps must be >= 2");
        c.widths.steps = n;
    } else if (k == "with_fmax") {
        c.widths.with_fmax = parse_bool(text::trim(value), key);
    } else if (k == "corners") {
        c.corners = parse_corner_list(value);
    } else {
        throw InvalidArgument("unknown option '" + k + "'");
    }
}

const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> names = {"transient",  "deadzone",    "fmax",    "halfperiod",
                                                   "mismatch",   "sweep-width", "corners", "characterize"};
    return names;
}

std::string RunOutput::summary() const
{
    std::ostringstream o;
    o << "experiment: " << document.experiment << '\n';
    if (waves)
        o << "samples: " << waves->size() << '\n';
    if (!document.results.empty())
        o << '\n' << summary_text(summarize(document.results));
    if (!document.checks.empty()) {
        o << '\n';
        for (const Check& c : document.checks)
            o << (c.passed ? "PASS  " : "FAIL  ") << c.name << '\n';
    }
    return o.str();
}

std::string RunOutput::report_json() const
{
    json j = document.to_json();
    j["summary"] = summary_json(summarize(document.results)).at("rows");
    return j.dump(2) + "\n";
}

RunOutput run_experiment(const RunConfig& config, std::string_view experiment)
{
    const ExperimentSettings& s = config.settings;
    const DesignPoint& p = config.point;
    s.validate();
    p.validate();

    RunOutput out;
    RunDocument& doc = out.document;
    doc.experiment = std::string(experiment);

    if (experiment == "transient") {
        const int n = config.periods.value_or(10);
        OffsetRun run = simulate_offset(s, p, n);
        if (p.offset != 0.0)
            doc.checks.push_back({"decision matches the leading input",
                                  run.report.decision == expected_decision(p.offset)});
        doc.extra = {{"periods", n}, {"samples", run.waves.size()}};
        doc.results.push_back(run.report);
        out.waves = std::move(run.waves);
        add_wave_plot(out, "Transient, " + describe(p));
    } else if (experiment == "deadzone") {
        const double dz = measure_dead_zone(s, p, config.dead_zone);
        ExperimentReport r = run_offset_experiment(s, p);
        r.dead_zone = dz;
        doc.results.push_back(r);
        doc.checks.push_back({"dead zone inside the search window", dz > config.dead_zone.lo && dz <= config.dead_zone.hi});
        doc.extra = {{"lo", config.dead_zone.lo}, {"hi", config.dead_zone.hi}, {"tol", config.dead_zone.tol},
                     {"periods", config.dead_zone.n_periods}};
    } else if (experiment == "fmax") {
        const double f = measure_fmax(s, p, config.fmax);
        ExperimentReport r = run_offset_experiment(s, p);
        r.f_max = f;
        doc.results.push_back(r);
        doc.checks.push_back({"f_max below the search ceiling", f < config.fmax.f_hi});
        doc.extra = {{"f_lo", config.fmax.f_lo},
                     {"f_hi", config.fmax.f_hi},
                     {"tol_rel", config.fmax.tol_rel},
                     {"offset_fraction", config.fmax.offset_fraction},
                     {"check_periods", config.fmax.check_periods}};
    } else if (experiment == "halfperiod") {
        const int n = config.periods.value_or(20);
        HalfPeriodResult h = half_period_test(s, p, n);
        doc.results.push_back(h.report);
        doc.checks.push_back({"stable decision at half-period offset", h.stable});
        doc.extra = {{"periods", n}, {"checked", verdicts_json(h.periods)}};
        out.waves = std::move(h.waves);
        add_wave_plot(out, "Half-period offset, " + describe(h.report.point));
    } else if (experiment == "mismatch") {
        const double f_ref = config.f_ref.value_or(p.frequency);
        const double f_fb = config.f_fb.value_or(0.8 * f_ref);
        const int n = config.periods.value_or(20);
        MismatchResult m = frequency_mismatch_test(s, p, f_ref, f_fb, n);
        doc.results.push_back(m.report);
        doc.checks.push_back({"output of the faster input dominates", m.passed});
        doc.extra = {{"f_ref", f_ref},
                     {"f_fb", f_fb},
                     {"periods", n},
                     {"up_high_time", m.up_high_time},
                     {"dn_high_time", m.dn_high_time}};
        out.waves = std::move(m.waves);
        add_wave_plot(out, "Frequency mismatch");
    } else if (experiment == "sweep-width") {
        doc.results = width_sweep(s, p, config.widths);
        doc.checks.push_back({"UP rise time decreases with width",
                              strictly(doc.results, [](const ExperimentReport& r) { return r.up_rise_time; }, false)});
        doc.checks.push_back(
            {"average power increases with width",
             strictly(doc.results, [](const ExperimentReport& r) { return std::optional(r.avg_power); }, true)});
        out.plots.emplace_back("plot_width_rise_time.svg", render_svg(width_chart(doc.results, "rise_time")));
        out.plots.emplace_back("plot_width_power.svg", render_svg(width_chart(doc.results, "power")));
        if (config.widths.with_fmax)
            out.plots.emplace_back("plot_width_f_max.svg", render_svg(width_chart(doc.results, "f_max")));
    } else if (experiment == "corners") {
        std::vector<CornerSet> sets;
        for (CornerName n : config.corners)
            sets.push_back(s.calibration.corners.corner(n));
        doc.results = corner_sweep(s, p, sets);
        std::map<CornerName, std::optional<double>> rise;
        for (const ExperimentReport& r : doc.results)
            rise[r.point.corner.name] = r.up_rise_time;
        if (rise.count(CornerName::FF) && rise.count(CornerName::TT) && rise.count(CornerName::SS)) {
            const auto ff = rise[CornerName::FF], tt = rise[CornerName::TT], ss = rise[CornerName::SS];
            doc.checks.push_back({"rise time ordered FF <= TT <= SS", ff && tt && ss && *ff <= *tt && *tt <= *ss});
        }
        out.plots.emplace_back("plot_corners.svg", render_svg(corner_chart(doc.results)));
    } else if (experiment == "characterize") {
        ExperimentReport r = run_offset_experiment(s, p);
        r.dead_zone = measure_dead_zone(s, p, config.dead_zone);
        r.f_max = measure_fmax(s, p, config.fmax);
        doc.results.push_back(r);
    } else {
        throw InvalidArgument("unknown experiment '" + std::string(experiment) + "'");
    }
    return out;
}

RunOutput summarize_documents(const std::vector<std::string>& json_texts, const CornerTable& corners)
{
    if (json_texts.empty())
        throw InvalidArgument("no reports to summarize");
    RunOutput out;
    out.document.experiment = "report";
    for (const std::string& text : json_texts) {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception& e) {
            throw InvalidArgument(std::string("report is not valid JSON: ") + e.what());
        }
        RunDocument d = RunDocument::from_json(j, corners);
        for (ExperimentReport& r : d.results)
            out.document.results.push_back(std::move(r));
    }
    return out;
}

void write_outputs(const RunOutput& out, const std::filesystem::path& dir, bool plots)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());

    const auto write = [&](const std::string& name, const std::function<void(std::ostream&)>& body) {
        const auto path = dir / name;
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f)
            throw IoError("cannot write '" + path.string() + "'");
        body(f);
        f.flush();
        if (!f)
            throw IoError("write failed for '" + path.string() + "'");
    };

    write("report.json", [&](std::ostream& o) { o << out.report_json(); });
    write("summary.txt", [&](std::ostream& o) { o << out.summary(); });
    if (out.waves)
        write("waves.csv", [&](std::ostream& o) { write_csv(o, *out.waves); });
    if (plots)
        for (const auto& [name, svg] : out.plots)
            write(name, [&](std::ostream& o) { o << svg; });
}

} // namespace pfdsim
