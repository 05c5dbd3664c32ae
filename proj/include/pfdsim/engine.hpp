#pragma once

// Modified nodal analysis: DC operating point by damped Newton with gmin
// stepping, and fixed-grid transient analysis with capacitor companion models.

#include "pfdsim/netlist.hpp"
#include "pfdsim/waveform.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pfdsim {

enum class Integrator { BackwardEuler, Trapezoidal };

[[nodiscard]] std::string_view to_string(Integrator i) noexcept;
[[nodiscard]] Integrator parse_integrator(std::string_view s);

struct SimOptions {
    double reltol = 1e-3;
    double abstol_v = 1e-6;   // V
    double abstol_i = 1e-9;   // A
    double dt = 0.5e-12;      // base step, s
    double t_stop = 10e-9;    // s
    Integrator integrator = Integrator::Trapezoidal;
    int max_newton_iters = 50;
    double gmin = 1e-12;      // S, from every node to ground
    double max_node_step = 0.3;  // V per Newton iteration
    int max_step_halvings = 8;

    void validate() const;
};

/// min(0.5 ps, period / 2000): the default base step for a stimulus period.
[[nodiscard]] double default_time_step(double fastest_period) noexcept;

using NodeVoltages = std::map<std::string, double, std::less<>>;

/// Ground is included at 0 V. Throws SolverError naming the worst node when
/// Newton fails even after gmin stepping.
[[nodiscard]] NodeVoltages dc_operating_point(const Netlist& netlist, const SimOptions& options);

class TransientResult {
public:
    [[nodiscard]] const std::vector<double>& time() const noexcept { return time_; }
    [[nodiscard]] const std::vector<std::string>& node_names() const noexcept { return node_names_; }
    [[nodiscard]] const std::vector<std::string>& source_names() const noexcept { return source_names_; }
    /// Probe aliases in netlist order; every non-ground node when the
    /// netlist declares none.
    [[nodiscard]] const std::vector<std::string>& probe_names() const noexcept { return probe_names_; }

    [[nodiscard]] WaveformView node(std::string_view name) const;
    [[nodiscard]] WaveformView probe(std::string_view alias) const;
    /// Current delivered by a voltage source into the circuit (out of its
    /// plus terminal).
    [[nodiscard]] WaveformView source_current(std::string_view name) const;
    [[nodiscard]] const std::optional<std::string>& supply_name() const noexcept { return supply_; }

    [[nodiscard]] std::size_t size() const noexcept { return time_.size(); }
    bool operator==(const TransientResult&) const = default;

private:
    friend class TransientRecorder;
    std::vector<double> time_;
    std::vector<std::string> node_names_;
    std::vector<std::vector<double>> node_values_;
    std::vector<std::string> source_names_;
    std::vector<std::vector<double>> source_values_;
    std::vector<std::string> probe_names_;
    std::vector<std::size_t> probe_nodes_;
    std::optional<std::string> supply_;
};

/// Integrates from the DC operating point at t = 0 to t_stop on the grid
/// k*dt merged with every pulse-source corner time. A step whose Newton
/// solve fails is retried as two half steps, recursively.
[[nodiscard]] TransientResult transient(const Netlist& netlist, const SimOptions& options);

/// Supply branch current, positive into the circuit. Throws InvalidArgument
/// when the netlist declared no supply.
[[nodiscard]] WaveformView supply_current(const TransientResult& result);

/// `t,<probes...>,i_vdd` with full double precision; the i_vdd column is
/// omitted when there is no supply.
void write_csv(std::ostream& out, const TransientResult& result);

struct KclReport {
    std::size_t points_checked = 0;
    double worst_ratio = 0.0;     // |residual| / allowed, <= 1 passes
    double worst_residual = 0.0;  // A
    double worst_time = 0.0;
    std::string worst_node;

    [[nodiscard]] bool ok() const noexcept { return worst_ratio <= 1.0; }
};

/// Recomputes every node's KCL residual at every stored time point from the
/// recorded voltages and source currents alone, replaying the capacitor
/// companion currents.
[[nodiscard]] KclReport verify_kcl(const Netlist& netlist, const SimOptions& options, const TransientResult& result);

} // namespace pfdsim
