#pragma once

#include "pfdsim/calibration.hpp"
#include "pfdsim/devices.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pfdsim {

/// Trapezoidal clock waveform with SPICE PULSE semantics: v_low until
/// `delay`, then rise / flat top of `width` / fall / low, repeating.
struct PulseSpec {
    double v_low = 0.0;
    double v_high = 1.2;
    double delay = 0.0;
    double rise = 10e-12;
    double fall = 10e-12;
    double width = 490e-12;
    double period = 1e-9;

    bool operator==(const PulseSpec&) const = default;

    void validate() const;
    [[nodiscard]] double value(double t) const noexcept;
    /// Corner times (start/end of each ramp) in [t0, t1].
    [[nodiscard]] std::vector<double> breakpoints(double t0, double t1) const;

    /// 50 % duty clock: edges of 0.01 * period, flat top sized so the
    /// mid-level high time is exactly half a period.
    static PulseSpec clock(double frequency, double delay, double v_high);
};

struct Mosfet {
    std::string drain, gate, source;
    MosfetParams params;
    bool operator==(const Mosfet&) const = default;
};

struct Resistor {
    std::string a, b;
    double ohms = 0.0;
    bool operator==(const Resistor&) const = default;
};

struct Capacitor {
    std::string a, b;
    double farads = 0.0;
    bool operator==(const Capacitor&) const = default;
};

struct DcSource {
    std::string plus, minus;
    double volts = 0.0;
    bool operator==(const DcSource&) const = default;
};

struct PulseSource {
    std::string plus, minus;
    PulseSpec pulse;
    bool operator==(const PulseSource&) const = default;
};

using Element = std::variant<Mosfet, Resistor, Capacitor, DcSource, PulseSource>;

struct Device {
    std::string name;
    Element element;
    bool operator==(const Device&) const = default;
};

/// Terminal node names of a device in a fixed order (d, g, s for FETs).
[[nodiscard]] std::vector<std::string> terminals(const Element& e);

struct Violation {
    enum class Kind { NoGround, MultipleGround, UnknownNode, Disconnected, NonPositiveValue, FloatingGate, BadParams };
    Kind kind;
    std::string subject;  // node or device name
    std::string message;
};

/// Devices dropped into a netlist as a unit by Netlist::add_subcircuit.
struct Subcircuit {
    std::vector<std::string> internal_nodes;
    std::vector<Device> devices;
};

class Netlist {
public:
    /// Throws InvalidArgument("duplicate identifier: ...") on reuse.
    void add_node(const std::string& name);
    void add_ground(const std::string& name);
    /// Throws InvalidArgument for an undeclared terminal ("unknown node") or
    /// a reused device name ("duplicate identifier").
    void add_device(Device device);
    void add_subcircuit(const Subcircuit& sub);

    void add_probe(const std::string& alias, const std::string& node);
    void set_supply(const std::string& dc_source_name);

    [[nodiscard]] const std::vector<std::string>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<Device>& devices() const noexcept { return devices_; }
    [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& probes() const noexcept { return probes_; }
    [[nodiscard]] const std::optional<std::string>& ground() const noexcept { return ground_; }
    [[nodiscard]] const std::optional<std::string>& supply() const noexcept { return supply_; }

    [[nodiscard]] bool has_node(const std::string& name) const { return node_index_.contains(name); }
    [[nodiscard]] const Device* find_device(const std::string& name) const;
    [[nodiscard]] std::size_t size() const noexcept { return devices_.size(); }
    [[nodiscard]] std::size_t count_mosfets() const;

    /// Every violated invariant; empty means valid.
    [[nodiscard]] std::vector<Violation> validate() const;

    bool operator==(const Netlist&) const = default;

private:
    std::vector<std::string> nodes_;
    std::map<std::string, std::size_t, std::less<>> node_index_;
    std::optional<std::string> ground_;
    std::vector<Device> devices_;
    std::map<std::string, std::size_t, std::less<>> device_index_;
    std::vector<std::pair<std::string, std::string>> probes_;
    std::optional<std::string> supply_;
    int ground_count_ = 0;
};

/// Line-oriented text form, see docs/formats.md.
void write_netlist(std::ostream& out, const Netlist& n);
[[nodiscard]] Netlist read_netlist(std::istream& in);

// --- canonical PFD ----------------------------------------------------------

/// Static CMOS 2-input NOR: series PMOS vdd -> <prefix>_p -> out (gates in1,
/// in2), parallel NMOS out -> gnd.
[[nodiscard]] Subcircuit build_nor2(const std::string& prefix, const std::string& out, const std::string& in1,
                                    const std::string& in2, const std::string& vdd, const std::string& gnd,
                                    const MosfetParams& p_params, const MosfetParams& n_params);

struct PfdOptions {
    double width = 260e-9;
    double length = 100e-9;
    CornerSet corner = CornerSet::typical();
    double load_cap = 1e-15;
    PulseSpec input_a = PulseSpec::clock(1e9, 0.0, 1.2);
    PulseSpec input_b = PulseSpec::clock(1e9, 0.0, 1.2);

    void validate() const;
};

/// Options for the given calibration at its default width/length, inputs
/// both at `frequency` with `offset` > 0 meaning A leads B.
[[nodiscard]] PfdOptions pfd_options(const Calibration& cal, double frequency, double offset);

/// The 16-transistor PFD: 8-FET dynamic detection core (nodes X, Y) and two
/// cross-coupled NOR gates producing UP = NOR(X, DN), DN = NOR(Y, UP).
[[nodiscard]] Netlist build_pfd(const Calibration& cal, const PfdOptions& opts);

} // namespace pfdsim
