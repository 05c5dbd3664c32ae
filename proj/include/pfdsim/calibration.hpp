#pragma once

#include "pfdsim/devices.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace pfdsim {

/// Everything the simulator needs to know about the process: supply, the two
/// device models, the corner table and the fixed PFD parasitics. Loaded from
/// a `key = value` text file (SI units, `#` comments); any key that is not
/// present keeps its compiled-in default.
struct Calibration {
    double vdd = 1.2;
    MosfetParams nmos = MosfetParams::default_nmos();
    MosfetParams pmos = MosfetParams::default_pmos();
    CornerTable corners;

    // Gate capacitances in nmos/pmos are quoted at this width and scale
    // linearly with the drawn width.
    double cap_ref_width = 260e-9;
    double internal_cap = 0.5e-15;  // X and Y storage nodes
    double load_cap = 1e-15;        // UP and DN outputs

    void validate() const;

    static Calibration defaults() { return {}; }
};

[[nodiscard]] Calibration parse_calibration(std::istream& in, Calibration base = {});
[[nodiscard]] Calibration load_calibration(const std::filesystem::path& path);

/// Writes every key, so the output is a complete, loadable file.
void write_calibration(std::ostream& out, const Calibration& cal);

} // namespace pfdsim
