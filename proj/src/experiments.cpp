#include "pfdsim/experiments.hpp"

#include "pfdsim/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <thread>

namespace pfdsim {

void DesignPoint::validate() const
{
    if (!(width > 0.0 && length > 0.0))
        throw InvalidArgument("design point: width and length must be > 0");
    if (!(frequency > 0.0) || !std::isfinite(frequency))
        throw InvalidArgument("design point: frequency must be > 0");
    if (!(std::abs(offset) < period()))
        throw InvalidArgument("design point: |offset| must be < period");
    corner.validate();
}

void ExperimentSettings::validate() const
{
    calibration.validate();
    if (!(detect_fraction > 0.0 && detect_fraction < 1.0))
        throw InvalidArgument("detect fraction must be in (0, 1)");
    if (!(peak_fraction >= detect_fraction && peak_fraction <= 1.0))
        throw InvalidArgument("peak fraction must be in [detect fraction, 1]");
    if (skip_periods < 0)
        throw InvalidArgument("skip_periods must be >= 0");
    if (jobs < 1)
        throw InvalidArgument("jobs must be >= 1");
    if (dt && !(*dt > 0.0))
        throw InvalidArgument("dt must be > 0");
    if (t_stop && !(*t_stop > 0.0))
        throw InvalidArgument("t_stop must be > 0");
}

namespace {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads; results keep index
/// order and the lowest-index exception is rethrown.
template <class T>
std::vector<T> parallel_map(int jobs, std::size_t n, const std::function<T(std::size_t)>& fn)
{
    std::vector<std::optional<T>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }
    std::vector<T> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i])
            std::rethrow_exception(errors[i]);
        out.push_back(std::move(*slots[i]));
    }
    return out;
}

PfdOptions options_for(const ExperimentSettings& s, const DesignPoint& p)
{
    PfdOptions o = pfd_options(s.calibration, p.frequency, p.offset);
    o.width = p.width;
    o.length = p.length;
    o.corner = p.corner;
    return o;
}

TransientResult simulate(const ExperimentSettings& s, const PfdOptions& o, double fastest_period, double t_stop)
{
    SimOptions so = s.solver;
    so.dt = s.dt.value_or(default_time_step(fastest_period));
    so.t_stop = t_stop;
    return transient(build_pfd(s.calibration, o), so);
}

ExperimentReport measure_window(const ExperimentSettings& s, const DesignPoint& point, const TransientResult& r,
                                double t0, double t1)
{
    const double vdd = s.calibration.vdd;
    const Waveform up = slice(r.probe("UP"), t0, t1);
    const Waveform dn = slice(r.probe("DN"), t0, t1);
    ExperimentReport rep;
    rep.point = point;
    rep.decision = classify_decision(up, dn, s.threshold(), s.min_peak());
    rep.mutual_exclusion_overlap = mutual_exclusion_overlap(up, dn, s.threshold());
    rep.avg_power = average_power(supply_current(r), vdd, t0, t1);
    try {
        rep.up_rise_time = rise_time(up, 0.0, vdd);
    } catch (const MeasureError&) {
        rep.up_rise_time.reset();
    }
    return rep;
}

double window_start(const ExperimentSettings& s, double period, double t_stop)
{
    const double t0 = s.skip_periods * period;
    return t0 < t_stop ? t0 : 0.0;
}

} // namespace

std::vector<PeriodVerdict> classify_periods(WaveformView up, WaveformView dn, double t0, double period, int count,
                                            double threshold, double min_peak)
{
    std::vector<PeriodVerdict> out;
    for (int k = 0; k < count; ++k) {
        const double a = t0 + k * period;
        const double b = std::min(a + period, up.time.back());
        const Waveform u = slice(up, a, b);
        const Waveform d = slice(dn, a, b);
        PeriodVerdict v;
        v.decision = classify_decision(u, d, threshold, min_peak);
        const Waveform* active = v.decision == Decision::LeadA ? &u : v.decision == Decision::LeadB ? &d : nullptr;
        v.reset = active && *std::min_element(active->value.begin(), active->value.end()) < threshold;
        out.push_back(v);
    }
    return out;
}

OffsetRun simulate_offset(const ExperimentSettings& s, const DesignPoint& point, int n_periods)
{
    s.validate();
    point.validate();
    if (n_periods < 1)
        throw InvalidArgument("n_periods must be >= 1");
    const double T = point.period();
    const double t_stop = s.t_stop.value_or(n_periods * T);
    TransientResult waves = simulate(s, options_for(s, point), T, t_stop);
    ExperimentReport rep = measure_window(s, point, waves, window_start(s, T, t_stop), t_stop);
    return {std::move(rep), std::move(waves)};
}

ExperimentReport run_offset_experiment(const ExperimentSettings& s, const DesignPoint& point, int n_periods)
{
    return simulate_offset(s, point, n_periods).report;
}

// --- searches ------------------------------------------------------------------

double measure_dead_zone(const ExperimentSettings& s, const DesignPoint& point, const DeadZoneSearch& search)
{
    if (!(search.lo >= 0.0 && search.hi > search.lo))
        throw InvalidArgument("dead zone: need 0 <= lo < hi");
    if (!(search.tol > 0.0))
        throw InvalidArgument("dead zone: tol must be > 0");
    if (!(search.hi < point.period()))
        throw InvalidArgument("dead zone: hi must be below the input period");

    ExperimentSettings fixed = s;
    fixed.t_stop.reset();

    const auto one_polarity = [&](double sign) {
        const Decision want = sign > 0 ? Decision::LeadA : Decision::LeadB;
        std::map<double, bool> seen;
        const auto correct = [&](double delta) {
            if (const auto it = seen.find(delta); it != seen.end())
                return it->second;
            DesignPoint p = point;
            p.offset = sign * delta;
            const bool ok = run_offset_experiment(fixed, p, search.n_periods).decision == want;
            seen.emplace(delta, ok);
            return ok;
        };

        if (!correct(search.hi))
            throw ExperimentError("no lock window found");
        if (correct(search.lo))
            return search.lo;
        double a = search.lo, b = search.hi;
        while (b - a > search.tol) {
            const double m = 0.5 * (a + b);
            (correct(m) ? b : a) = m;
        }
        for (int k = 1; k <= 3; ++k)
            correct(b + (search.hi - b) * k / 4.0);

        // A correct offset below an incorrect one means the predicate is not
        // monotone on the bracket.
        bool monotone = true;
        bool seen_ok = false;
        for (const auto& [delta, ok] : seen) {
            if (seen_ok && !ok)
                monotone = false;
            seen_ok = seen_ok || ok;
        }
        if (monotone)
            return b;

        double last_ok = search.hi;
        for (double d = search.hi - search.tol; d >= search.lo; d -= search.tol) {
            if (!correct(d))
                break;
            last_ok = d;
        }
        return last_ok;
    };

    return std::max(one_polarity(+1.0), one_polarity(-1.0));
}

bool operates_at(const ExperimentSettings& s, const DesignPoint& point, const FmaxSearch& search)
{
    DesignPoint p = point;
    p.offset = search.offset_fraction / p.frequency;
    ExperimentSettings fixed = s;
    fixed.t_stop.reset();
    const int skip = s.skip_periods;
    const OffsetRun run = simulate_offset(fixed, p, skip + search.check_periods);
    const auto verdicts = classify_periods(run.waves.probe("UP"), run.waves.probe("DN"), skip * p.period(),
                                           p.period(), search.check_periods, s.threshold(), s.min_peak());
    return std::all_of(verdicts.begin(), verdicts.end(),
                       [](const PeriodVerdict& v) { return v.decision == Decision::LeadA && v.reset; });
}

double measure_fmax(const ExperimentSettings& s, const DesignPoint& point, const FmaxSearch& search)
{
    if (!(search.offset_fraction > 0.0 && search.offset_fraction < 0.5))
        throw InvalidArgument("fmax: offset fraction must be in (0, 0.5)");
    if (!(search.f_lo > 0.0 && search.f_hi > search.f_lo))
        throw InvalidArgument("fmax: need 0 < f_lo < f_hi");
    if (!(search.tol_rel > 0.0))
        throw InvalidArgument("fmax: tol_rel must be > 0");
    if (search.check_periods < 1)
        throw InvalidArgument("fmax: check_periods must be >= 1");

    std::map<double, bool> seen;
    const auto ok = [&](double f) {
        if (const auto it = seen.find(f); it != seen.end())
            return it->second;
        DesignPoint p = point;
        p.frequency = f;
        const bool r = operates_at(s, p, search);
        seen.emplace(f, r);
        return r;
    };

    if (!ok(search.f_lo))
        throw ExperimentError("fmax: incorrect decision even at f_lo");
    if (ok(search.f_hi))
        return search.f_hi;
    double lo = search.f_lo, hi = search.f_hi;
    while (hi / lo > 1.0 + search.tol_rel) {
        const double m = std::sqrt(lo * hi);
        (ok(m) ? lo : hi) = m;
    }
    for (int k = 1; k <= 3; ++k)
        ok(search.f_lo * std::pow(lo / search.f_lo, k / 4.0));

    bool monotone = true;
    bool seen_bad = false;
    for (const auto& [f, good] : seen) {
        if (seen_bad && good)
            monotone = false;
        seen_bad = seen_bad || !good;
    }
    if (monotone)
        return lo;

    double last_ok = search.f_lo;
    for (double f = search.f_lo * (1.0 + search.tol_rel); f <= search.f_hi; f *= 1.0 + search.tol_rel) {
        if (!ok(f))
            break;
        last_ok = f;
    }
    return last_ok;
}

// --- sweeps --------------------------------------------------------------------

std::vector<double> sweep_widths(const WidthSweep& sweep)
{
    if (sweep.steps < 2)
        throw InvalidArgument("width sweep: steps must be >= 2");
    if (!(sweep.w_lo > 0.0 && sweep.w_hi > sweep.w_lo))
        throw InvalidArgument("width sweep: need 0 < w_lo < w_hi");
    std::vector<double> w;
    for (int i = 0; i < sweep.steps; ++i)
        w.push_back(sweep.w_lo + (sweep.w_hi - sweep.w_lo) * i / (sweep.steps - 1));
    return w;
}

std::vector<ExperimentReport> width_sweep(const ExperimentSettings& s, const DesignPoint& fixed,
                                          const WidthSweep& sweep)
{
    const std::vector<double> widths = sweep_widths(sweep);
    return parallel_map<ExperimentReport>(s.jobs, widths.size(), [&](std::size_t i) {
        DesignPoint p = fixed;
        p.width = widths[i];
        ExperimentReport r = run_offset_experiment(s, p);
        if (sweep.with_fmax)
            r.f_max = measure_fmax(s, p, sweep.fmax);
        return r;
    });
}

std::vector<ExperimentReport> corner_sweep(const ExperimentSettings& s, const DesignPoint& fixed,
                                           const std::vector<CornerSet>& corners)
{
    if (corners.empty())
        throw InvalidArgument("corner sweep: no corners given");
    return parallel_map<ExperimentReport>(s.jobs, corners.size(), [&](std::size_t i) {
        DesignPoint p = fixed;
        p.corner = corners[i];
        return run_offset_experiment(s, p);
    });
}

// --- stress tests --------------------------------------------------------------

HalfPeriodResult half_period_test(const ExperimentSettings& s, const DesignPoint& point, int n_periods)
{
    if (n_periods < 2)
        throw InvalidArgument("window too short");
    DesignPoint p = point;
    const double sign = point.offset < 0.0 ? -1.0 : 1.0;
    p.offset = sign * 0.5 * p.period();
    ExperimentSettings fixed = s;
    fixed.t_stop.reset();
    OffsetRun run = simulate_offset(fixed, p, n_periods);

    const int checked = std::min(10, n_periods / 2);
    HalfPeriodResult out;
    out.periods = classify_periods(run.waves.probe("UP"), run.waves.probe("DN"), (n_periods - checked) * p.period(),
                                   p.period(), checked, s.threshold(), s.min_peak());
    const Decision want = sign > 0 ? Decision::LeadA : Decision::LeadB;
    out.stable = std::all_of(out.periods.begin(), out.periods.end(),
                             [&](const PeriodVerdict& v) { return v.decision == want; });
    out.report = std::move(run.report);
    out.waves = std::move(run.waves);
    return out;
}

MismatchResult frequency_mismatch_test(const ExperimentSettings& s, const DesignPoint& point, double f_ref,
                                       double f_fb, int n_periods)
{
    if (!(f_ref > 0.0 && f_fb > 0.0))
        throw InvalidArgument("mismatch: frequencies must be > 0");
    if (f_ref == f_fb)
        throw InvalidArgument("equal frequencies");
    if (n_periods < 1)
        throw InvalidArgument("n_periods must be >= 1");
    s.validate();

    DesignPoint p = point;
    p.frequency = f_ref;
    p.offset = 0.0;
    p.validate();
    PfdOptions o = options_for(s, p);
    o.input_a = PulseSpec::clock(f_ref, 0.0, s.calibration.vdd);
    o.input_b = PulseSpec::clock(f_fb, 0.0, s.calibration.vdd);

    const double t_ref = 1.0 / f_ref;
    const double t_stop = s.t_stop.value_or(n_periods * t_ref);
    MismatchResult out;
    out.f_ref = f_ref;
    out.f_fb = f_fb;
    out.waves = simulate(s, o, std::min(t_ref, 1.0 / f_fb), t_stop);
    const double t0 = window_start(s, t_ref, t_stop);
    out.report = measure_window(s, p, out.waves, t0, t_stop);
    out.up_high_time = high_time(slice(out.waves.probe("UP"), t0, t_stop), s.threshold());
    out.dn_high_time = high_time(slice(out.waves.probe("DN"), t0, t_stop), s.threshold());
    out.passed = f_fb < f_ref ? out.up_high_time > out.dn_high_time : out.dn_high_time > out.up_high_time;
    return out;
}

} // namespace pfdsim
