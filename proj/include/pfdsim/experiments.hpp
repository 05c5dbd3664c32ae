#pragma once

// Characterization harness for the canonical PFD: lead/lag runs, dead-zone
// and f_max searches, width and corner sweeps, the half-period and
// frequency-mismatch tests.

#include "pfdsim/calibration.hpp"
#include "pfdsim/engine.hpp"
#include "pfdsim/measure.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pfdsim {

struct DesignPoint {
    double width = 260e-9;
    double length = 100e-9;
    CornerSet corner = CornerSet::typical();
    double frequency = 1e9;
    double offset = 100e-12;  // s, > 0 means A leads B

    [[nodiscard]] double period() const noexcept { return 1.0 / frequency; }
    void validate() const;
    bool operator==(const DesignPoint&) const = default;
};

/// Shared knobs for every experiment.
struct ExperimentSettings {
    Calibration calibration;
    SimOptions solver;             // dt and t_stop are filled per run
    std::optional<double> dt;      // fixed base step; default min(0.5 ps, T/2000)
    std::optional<double> t_stop;  // overrides n_periods * T for single runs
    double detect_fraction = 0.5;  // pulse threshold, fraction of VDD
    double peak_fraction = 0.8;    // "real pulse" peak, fraction of VDD
    int skip_periods = 2;          // start-up periods excluded from metrics
    int jobs = 1;                  // parallel sweep workers

    [[nodiscard]] double threshold() const noexcept { return detect_fraction * calibration.vdd; }
    [[nodiscard]] double min_peak() const noexcept { return peak_fraction * calibration.vdd; }
    void validate() const;
};

struct ExperimentReport {
    DesignPoint point;
    Decision decision = Decision::Undetermined;
    std::optional<double> dead_zone;     // s
    std::optional<double> f_max;         // Hz
    double avg_power = 0.0;              // W
    std::optional<double> up_rise_time;  // s, absent when UP never switches
    double mutual_exclusion_overlap = 0.0;  // s
};

/// Per-period view: which output is asserted in the period, and whether the
/// asserted output also returned below threshold inside it.
struct PeriodVerdict {
    Decision decision = Decision::Undetermined;
    bool reset = false;
};

/// Splits [t0, t0 + count * period) into periods and classifies each one
/// from the clipped UP/DN waveforms.
[[nodiscard]] std::vector<PeriodVerdict> classify_periods(WaveformView up, WaveformView dn, double t0,
                                                          double period, int count, double threshold,
                                                          double min_peak);

struct OffsetRun {
    ExperimentReport report;
    TransientResult waves;
};

/// Builds the PFD at the point and simulates n_periods. Metrics use the
/// window after the first skip_periods periods.
[[nodiscard]] OffsetRun simulate_offset(const ExperimentSettings& s, const DesignPoint& point, int n_periods = 10);
[[nodiscard]] ExperimentReport run_offset_experiment(const ExperimentSettings& s, const DesignPoint& point,
                                                     int n_periods = 10);

struct DeadZoneSearch {
    double lo = 0.0;
    double hi = 200e-12;
    double tol = 0.5e-12;
    int n_periods = 10;
};

/// Smallest offset with a correct full-swing decision, max over the two
/// polarities. Bisection, with a linear scan at `tol` resolution if the
/// bracket turns out not to be monotone. Throws ExperimentError("no lock
/// window found") when even `hi` is misclassified.
[[nodiscard]] double measure_dead_zone(const ExperimentSettings& s, const DesignPoint& point,
                                       const DeadZoneSearch& search = {});

struct FmaxSearch {
    double offset_fraction = 0.1;
    double f_lo = 0.5e9;
    double f_hi = 20e9;
    double tol_rel = 0.01;
    int check_periods = 10;
};

/// Largest frequency at which the PFD gives LeadA, and resets, in each of
/// check_periods consecutive periods. Geometric bisection.
[[nodiscard]] double measure_fmax(const ExperimentSettings& s, const DesignPoint& point,
                                  const FmaxSearch& search = {});
/// The per-frequency predicate used by measure_fmax.
[[nodiscard]] bool operates_at(const ExperimentSettings& s, const DesignPoint& point, const FmaxSearch& search);

struct WidthSweep {
    double w_lo = 120e-9;
    double w_hi = 310e-9;
    int steps = 5;
    bool with_fmax = false;
    FmaxSearch fmax;
};

[[nodiscard]] std::vector<double> sweep_widths(const WidthSweep& sweep);
[[nodiscard]] std::vector<ExperimentReport> width_sweep(const ExperimentSettings& s, const DesignPoint& fixed,
                                                        const WidthSweep& sweep = {});

/// One report per corner at the fixed point.
[[nodiscard]] std::vector<ExperimentReport> corner_sweep(const ExperimentSettings& s, const DesignPoint& fixed,
                                                         const std::vector<CornerSet>& corners);

struct HalfPeriodResult {
    ExperimentReport report;
    std::vector<PeriodVerdict> periods;  // the checked (final) periods
    bool stable = false;                 // same decision, matching the lead, in every checked period
    TransientResult waves;
};

/// Offset forced to +T/2 (or -T/2 when point.offset < 0). Checks the last
/// min(10, n_periods / 2) periods. Throws InvalidArgument("window too
/// short") for n_periods < 2.
[[nodiscard]] HalfPeriodResult half_period_test(const ExperimentSettings& s, const DesignPoint& point,
                                                int n_periods = 20);

struct MismatchResult {
    ExperimentReport report;
    double f_ref = 0.0;
    double f_fb = 0.0;
    double up_high_time = 0.0;
    double dn_high_time = 0.0;
    bool passed = false;  // the faster input's output dominates
    TransientResult waves;
};

/// A runs at f_ref, B at f_fb, for n_periods reference periods. Throws
/// InvalidArgument("equal frequencies") when they match.
[[nodiscard]] MismatchResult frequency_mismatch_test(const ExperimentSettings& s, const DesignPoint& point,
                                                     double f_ref, double f_fb, int n_periods = 20);

} // namespace pfdsim
