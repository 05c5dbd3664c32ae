#pragma once

// Waveform post-processing. Every threshold crossing is linearly
// interpolated between adjacent samples.

#include "pfdsim/waveform.hpp"

#include <string_view>
#include <vector>

namespace pfdsim {

struct PulseEvent {
    double start = 0.0;  // s, upward crossing (or first sample if already high)
    double end = 0.0;    // s, downward crossing (or last sample if still high)
    double peak = 0.0;   // V
};

enum class Decision { LeadA, LeadB, Undetermined };

[[nodiscard]] std::string_view to_string(Decision d) noexcept;
[[nodiscard]] Decision parse_decision(std::string_view s);
[[nodiscard]] Decision mirror(Decision d) noexcept;

/// 10 % -> 90 % rise time of the first upward transition. The 10 % point is
/// the last upward 10 % crossing before the first 90 % crossing, so a small
/// glitch ahead of the edge is ignored. Throws MeasureError("no qualifying
/// transition").
[[nodiscard]] double rise_time(WaveformView w, double v_low, double v_high);
/// Mirror of rise_time: first 90 % -> 10 % downward transition.
[[nodiscard]] double fall_time(WaveformView w, double v_low, double v_high);

/// Maximal intervals with w >= threshold, sorted and disjoint.
[[nodiscard]] std::vector<PulseEvent> detect_pulses(WaveformView w, double threshold);

/// LeadA when UP has a pulse peaking at >= min_peak and DN has none;
/// LeadB symmetrically; Undetermined otherwise.
[[nodiscard]] Decision classify_decision(WaveformView up, WaveformView dn, double threshold, double min_peak);

/// Total time during which both signals are >= threshold.
[[nodiscard]] double mutual_exclusion_overlap(WaveformView up, WaveformView dn, double threshold);

/// Total time above threshold.
[[nodiscard]] double high_time(WaveformView w, double threshold);

/// vdd times the mean supply current over [t0, t1] (trapezoidal rule, with
/// the window edges interpolated). Throws MeasureError when the window is
/// empty or falls outside the waveform.
[[nodiscard]] double average_power(WaveformView supply_current, double vdd, double t0, double t1);

/// Copy of w restricted to [t0, t1], with interpolated end samples.
[[nodiscard]] Waveform slice(WaveformView w, double t0, double t1);

/// Linear interpolation at t (clamped to the ends).
[[nodiscard]] double sample_at(WaveformView w, double t);

} // namespace pfdsim
