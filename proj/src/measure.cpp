#include "pfdsim/measure.hpp"

#include "pfdsim/error.hpp"

#include <algorithm>
#include <string>

namespace pfdsim {

namespace {

double crossing(WaveformView w, std::size_t i, double level)
{
    const double v0 = w.value[i], v1 = w.value[i + 1];
    const double t0 = w.time[i], t1 = w.time[i + 1];
    if (v1 == v0)
        return t0;
    return t0 + (level - v0) / (v1 - v0) * (t1 - t0);
}

bool crosses_up(WaveformView w, std::size_t i, double level)
{
    return w.value[i] < level && w.value[i + 1] >= level;
}

void check_shape(WaveformView w)
{
    if (w.time.size() != w.value.size())
        throw InvalidArgument("waveform time/value length mismatch");
}

} // namespace

std::string_view to_string(Decision d) noexcept
{
    switch (d) {
    case Decision::LeadA: return "LeadA";
    case Decision::LeadB: return "LeadB";
    case Decision::Undetermined: return "Undetermined";
    }
    return "Undetermined";
}

Decision parse_decision(std::string_view s)
{
    for (Decision d : {Decision::LeadA, Decision::LeadB, Decision::Undetermined})
        if (s == to_string(d))
            return d;
    throw InvalidArgument("unknown decision '" + std::string(s) + "'");
}

Decision mirror(Decision d) noexcept
{
    return d == Decision::LeadA ? Decision::LeadB : d == Decision::LeadB ? Decision::LeadA : d;
}

double rise_time(WaveformView w, double v_low, double v_high)
{
    check_shape(w);
    const double lo = v_low + 0.1 * (v_high - v_low);
    const double hi = v_low + 0.9 * (v_high - v_low);
    if (!(v_high > v_low) || w.size() < 2)
        throw MeasureError("no qualifying transition");
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        if (!crosses_up(w, i, hi))
            continue;
        for (std::size_t j = i + 1; j-- > 0;) {
            if (crosses_up(w, j, lo))
                return crossing(w, i, hi) - crossing(w, j, lo);
        }
    }
    throw MeasureError("no qualifying transition");
}

double fall_time(WaveformView w, double v_low, double v_high)
{
    check_shape(w);
    std::vector<double> neg(w.value.begin(), w.value.end());
    for (double& v : neg)
        v = -v;
    return rise_time({w.time, neg}, -v_high, -v_low);
}

std::vector<PulseEvent> detect_pulses(WaveformView w, double threshold)
{
    check_shape(w);
    std::vector<PulseEvent> out;
    if (w.empty())
        return out;
    bool high = w.value[0] >= threshold;
    PulseEvent cur{w.time[0], 0.0, high ? w.value[0] : threshold};
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        const double next = w.value[i + 1];
        if (!high && next >= threshold) {
            high = true;
            cur = {crossing(w, i, threshold), 0.0, next};
        } else if (high && next < threshold) {
            high = false;
            cur.end = crossing(w, i, threshold);
            if (cur.end > cur.start)
                out.push_back(cur);
        } else if (high) {
            cur.peak = std::max(cur.peak, next);
        }
    }
    if (high) {
        cur.end = w.time.back();
        if (cur.end > cur.start)
            out.push_back(cur);
    }
    return out;
}

Decision classify_decision(WaveformView up, WaveformView dn, double threshold, double min_peak)
{
    const auto real_pulses = [&](WaveformView w) {
        const auto ev = detect_pulses(w, threshold);
        return std::count_if(ev.begin(), ev.end(), [&](const PulseEvent& e) { return e.peak >= min_peak; });
    };
    const auto n_up = real_pulses(up);
    const auto n_dn = real_pulses(dn);
    if (n_up > 0 && n_dn == 0)
        return Decision::LeadA;
    if (n_dn > 0 && n_up == 0)
        return Decision::LeadB;
    return Decision::Undetermined;
}

double mutual_exclusion_overlap(WaveformView up, WaveformView dn, double threshold)
{
    const auto a = detect_pulses(up, threshold);
    const auto b = detect_pulses(dn, threshold);
    double total = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double lo = std::max(a[i].start, b[j].start);
        const double hi = std::min(a[i].end, b[j].end);
        if (hi > lo)
            total += hi - lo;
        (a[i].end < b[j].end) ? ++i : ++j;
    }
    return total;
}

double high_time(WaveformView w, double threshold)
{
    double total = 0.0;
    for (const PulseEvent& e : detect_pulses(w, threshold))
        total += e.end - e.start;
    return total;
}

double sample_at(WaveformView w, double t)
{
    check_shape(w);
    if (w.empty())
        throw MeasureError("empty waveform");
    if (t <= w.time.front())
        return w.value.front();
    if (t >= w.time.back())
        return w.value.back();
    const auto it = std::upper_bound(w.time.begin(), w.time.end(), t);
    const auto i = static_cast<std::size_t>(it - w.time.begin()) - 1;
    const double f = (t - w.time[i]) / (w.time[i + 1] - w.time[i]);
    return w.value[i] + f * (w.value[i + 1] - w.value[i]);
}

Waveform slice(WaveformView w, double t0, double t1)
{
    check_shape(w);
    if (w.empty() || !(t1 > t0) || t0 < w.time.front() || t1 > w.time.back())
        throw MeasureError("window outside waveform");
    Waveform out;
    out.time.push_back(t0);
    out.value.push_back(sample_at(w, t0));
    const auto first = std::upper_bound(w.time.begin(), w.time.end(), t0);
    for (auto it = first; it != w.time.end() && *it < t1; ++it) {
        const auto i = static_cast<std::size_t>(it - w.time.begin());
        out.time.push_back(w.time[i]);
        out.value.push_back(w.value[i]);
    }
    out.time.push_back(t1);
    out.value.push_back(sample_at(w, t1));
    return out;
}

double average_power(WaveformView supply_current, double vdd, double t0, double t1)
{
    const Waveform s = slice(supply_current, t0, t1);
    double charge = 0.0;
    for (std::size_t i = 0; i + 1 < s.time.size(); ++i)
        charge += 0.5 * (s.value[i] + s.value[i + 1]) * (s.time[i + 1] - s.time[i]);
    return vdd * charge / (t1 - t0);
}

} // namespace pfdsim
