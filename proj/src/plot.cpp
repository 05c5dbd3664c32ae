#include "pfdsim/plot.hpp"

#include "pfdsim/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace pfdsim {

namespace {

constexpr double kWidth = 800, kHeight = 480;
constexpr double kLeft = 80, kRight = 160, kTop = 40, kBottom = 60;
constexpr std::size_t kMaxPoints = 4000;
constexpr std::array<const char*, 6> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
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
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish()
    {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        } else if (hi - lo <= 0.0) {
            const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
            lo -= pad;
            hi += pad;
        }
    }
};

// 1-2-5 steps, about five ticks per axis.
double nice_step(double span)
{
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

} // namespace

std::string render_svg(const Chart& chart)
{
    Range xr, yr;
    for (const Series& s : chart.series) {
        if (s.x.size() != s.y.size())
            throw InvalidArgument("series '" + s.name + "' has mismatched lengths");
        for (double v : s.x)
            xr.add(v);
        for (double v : s.y)
            yr.add(v);
    }
    if (!chart.x_categories.empty()) {
        xr.lo = -0.5;
        xr.hi = static_cast<double>(chart.x_categories.size()) - 0.5;
    }
    xr.finish();
    yr.finish();
    const double ypad = 0.05 * (yr.hi - yr.lo);
    yr.lo -= ypad;
    yr.hi += ypad;

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    const auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    const auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(chart.title) << "</text>\n";
    o << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw) << "\" height=\""
      << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

    const double ys = nice_step(yr.hi - yr.lo);
    for (double v = std::ceil(yr.lo / ys) * ys; v <= yr.hi; v += ys) {
        o << "<line x1=\"" << fmt(kLeft) << "\" x2=\"" << fmt(kLeft + pw) << "\" y1=\"" << fmt(py(v)) << "\" y2=\""
          << fmt(py(v)) << "\" stroke=\"#ddd\"/>\n";
        o << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(py(v) + 4) << "\" text-anchor=\"end\">"
          << tick_label(v) << "</text>\n";
    }
    if (chart.x_categories.empty()) {
        const double xs = nice_step(xr.hi - xr.lo);
        for (double v = std::ceil(xr.lo / xs) * xs; v <= xr.hi; v += xs)
            o << "<text x=\"" << fmt(px(v)) << "\" y=\"" << fmt(kTop + ph + 18) << "\" text-anchor=\"middle\">"
              << tick_label(v) << "</text>\n";
    } else {
        for (std::size_t i = 0; i < chart.x_categories.size(); ++i)
            o << "<text x=\"" << fmt(px(static_cast<double>(i))) << "\" y=\"" << fmt(kTop + ph + 18)
              << "\" text-anchor=\"middle\">" << escape(chart.x_categories[i]) << "</text>\n";
    }
    o << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 14) << "\" text-anchor=\"middle\">"
      << escape(chart.x_label) << "</text>\n";
    o << "<text transform=\"translate(18," << fmt(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(chart.y_label) << "</text>\n";

    for (std::size_t k = 0; k < chart.series.size(); ++k) {
        const Series& s = chart.series[k];
        const char* color = kColors[k % kColors.size()];
        const std::size_t stride = std::max<std::size_t>(1, (s.x.size() + kMaxPoints - 1) / kMaxPoints);
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); i += stride)
            o << (i ? " " : "") << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i]));
        if (!s.x.empty() && (s.x.size() - 1) % stride != 0)
            o << ' ' << fmt(px(s.x.back())) << ',' << fmt(py(s.y.back()));
        o << "\"/>\n";
        if (chart.markers)
            for (std::size_t i = 0; i < s.x.size(); ++i)
                o << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i])) << "\" r=\"3\" fill=\""
                  << color << "\"/>\n";
        const double ly = kTop + 10 + 18 * static_cast<double>(k);
        o << "<line x1=\"" << fmt(kLeft + pw + 12) << "\" x2=\"" << fmt(kLeft + pw + 32) << "\" y1=\"" << fmt(ly)
          << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << fmt(kLeft + pw + 38) << "\" y=\"" << fmt(ly + 4) << "\">" << escape(s.name)
          << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

Chart waveform_chart(const TransientResult& r, const std::string& title)
{
    Chart c{title, "time (ns)", "voltage (V)", {}, {}, false};
    for (const char* probe : {"A", "B", "UP", "DN"}) {
        const auto& names = r.probe_names();
        if (std::find(names.begin(), names.end(), probe) == names.end())
            continue;
        const WaveformView w = r.probe(probe);
        Series s{probe, {}, {w.value.begin(), w.value.end()}};
        s.x.reserve(w.time.size());
        for (double t : w.time)
            s.x.push_back(t * 1e9);
        c.series.push_back(std::move(s));
    }
    return c;
}

Chart width_chart(const std::vector<ExperimentReport>& rows, const std::string& metric)
{
    Chart c{"", "width (nm)", "", {}, {}, true};
    Series s{metric, {}, {}};
    for (const ExperimentReport& r : rows) {
        double y = 0.0;
        if (metric == "rise_time") {
            if (!r.up_rise_time)
                continue;
            y = *r.up_rise_time * 1e12;
        } else if (metric == "power") {
            y = r.avg_power * 1e6;
        } else if (metric == "f_max") {
            if (!r.f_max)
                continue;
            y = *r.f_max * 1e-9;
        } else {
            throw InvalidArgument("unknown width metric '" + metric + "'");
        }
        s.x.push_back(r.point.width * 1e9);
        s.y.push_back(y);
    }
    if (metric == "rise_time") {
        c.title = "UP rise time vs width";
        c.y_label = "rise time (ps)";
    } else if (metric == "power") {
        c.title = "Average power vs width";
        c.y_label = "power (uW)";
    } else {
        c.title = "f_max vs width";
        c.y_label = "f_max (GHz)";
    }
    c.series.push_back(std::move(s));
    return c;
}

Chart corner_chart(const std::vector<ExperimentReport>& rows)
{
    Chart c{"UP rise time per corner", "corner", "rise time (ps)", {}, {}, true};
    Series s{"rise_time", {}, {}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        c.x_categories.emplace_back(to_string(rows[i].point.corner.name));
        if (!rows[i].up_rise_time)
            continue;
        s.x.push_back(static_cast<double>(i));
        s.y.push_back(*rows[i].up_rise_time * 1e12);
    }
    c.series.push_back(std::move(s));
    return c;
}

} // namespace pfdsim
