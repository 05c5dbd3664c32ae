#pragma once

// Level-1 (Shichman-Hodges) MOSFET model and process-corner modifiers.

#include <string>
#include <string_view>
#include <vector>

namespace pfdsim {

enum class Polarity { NMOS, PMOS };

struct MosfetParams {
    Polarity polarity = Polarity::NMOS;
    double vth0 = 0.35;       // V, negative for PMOS
    double kprime = 200e-6;   // A/V^2
    double lambda = 0.1;      // 1/V
    double w = 260e-9;        // m
    double l = 100e-9;        // m
    double cgs = 0.1e-15;     // F
    double cgd = 0.1e-15;     // F

    bool operator==(const MosfetParams&) const = default;

    /// Throws InvalidArgument naming the first broken invariant.
    void validate() const;

    static MosfetParams default_nmos();
    static MosfetParams default_pmos();
};

struct Conductances {
    double gm = 0.0;   // dId/dVgs
    double gds = 0.0;  // dId/dVds
};

/// Drain current (into the drain terminal) for the given terminal voltages.
/// Negative vds is handled by swapping drain and source, so the model is
/// symmetric; PMOS is evaluated by sign reflection.
[[nodiscard]] double mosfet_current(const MosfetParams& p, double vgs, double vds) noexcept;

/// Analytic partial derivatives of mosfet_current.
[[nodiscard]] Conductances mosfet_conductances(const MosfetParams& p, double vgs, double vds) noexcept;

/// Current and conductances in one evaluation; used by the MNA assembler.
struct MosfetEval {
    double id = 0.0;
    Conductances g;
};
[[nodiscard]] MosfetEval mosfet_evaluate(const MosfetParams& p, double vgs, double vds) noexcept;

enum class CornerName { TT, FF, FS, SF, SS };

[[nodiscard]] std::string_view to_string(CornerName c) noexcept;
/// Throws InvalidArgument for anything but TT/FF/FS/SF/SS (case-insensitive).
[[nodiscard]] CornerName parse_corner_name(std::string_view s);

/// Multipliers on |vth0| and kprime per polarity. First letter of the name
/// is the NMOS speed, second the PMOS speed.
struct CornerSet {
    CornerName name = CornerName::TT;
    double vth_scale_n = 1.0;
    double vth_scale_p = 1.0;
    double k_scale_n = 1.0;
    double k_scale_p = 1.0;

    bool operator==(const CornerSet&) const = default;

    void validate() const;
    static CornerSet typical() { return {}; }
};

/// Scale factors for one "fast" or "slow" device.
struct SpeedScales {
    double vth_scale = 1.0;
    double k_scale = 1.0;
};

struct CornerTable {
    SpeedScales fast{0.9, 1.15};
    SpeedScales slow{1.1, 0.85};

    [[nodiscard]] CornerSet corner(CornerName name) const;
    [[nodiscard]] std::vector<CornerSet> all() const;
};

/// Copy of p with |vth0| and kprime scaled by the polarity-matching factors.
[[nodiscard]] MosfetParams apply_corner(const MosfetParams& p, const CornerSet& c) noexcept;

} // namespace pfdsim
