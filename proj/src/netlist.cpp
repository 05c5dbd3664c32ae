#include "pfdsim/netlist.hpp"

#include "pfdsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace pfdsim {

// --- PulseSpec ---------------------------------------------------------------

void PulseSpec::validate() const
{
    if (!(rise > 0.0 && fall > 0.0))
        throw InvalidArgument("pulse: rise and fall must be > 0");
    if (!(period > 0.0))
        throw InvalidArgument("pulse: period must be > 0");
    if (!(width >= 0.0))
        throw InvalidArgument("pulse: width must be >= 0");
    if (!(period > rise + width + fall))
        throw InvalidArgument("pulse: period must exceed rise + width + fall");
    if (!(delay >= 0.0))
        throw InvalidArgument("pulse: delay must be >= 0");
    if (!std::isfinite(v_low) || !std::isfinite(v_high))
        throw InvalidArgument("pulse: levels must be finite");
}

double PulseSpec::value(double t) const noexcept
{
    if (t <= delay)
        return v_low;
    const double tt = std::fmod(t - delay, period);
    if (tt < rise)
        return v_low + (v_high - v_low) * (tt / rise);
    if (tt < rise + width)
        return v_high;
    if (tt < rise + width + fall)
        return v_high - (v_high - v_low) * ((tt - rise - width) / fall);
    return v_low;
}

std::vector<double> PulseSpec::breakpoints(double t0, double t1) const
{
    std::vector<double> out;
    if (t1 < delay)
        return out;
    const double first = std::max(0.0, std::floor((t0 - delay) / period));
    const double corners[] = {0.0, rise, rise + width, rise + width + fall};
    for (double k = first;; k += 1.0) {
        const double base = delay + k * period;
        if (base > t1)
            break;
        for (double c : corners) {
            const double t = base + c;
            if (t >= t0 && t <= t1)
                out.push_back(t);
        }
    }
    return out;
}

PulseSpec PulseSpec::clock(double frequency, double delay, double v_high)
{
    PulseSpec p;
    p.period = 1.0 / frequency;
    p.rise = 0.01 * p.period;
    p.fall = p.rise;
    p.width = 0.5 * p.period - p.rise;
    p.delay = delay;
    p.v_low = 0.0;
    p.v_high = v_high;
    return p;
}

// --- Netlist -----------------------------------------------------------------

std::vector<std::string> terminals(const Element& e)
{
    return std::visit(
        [](const auto& d) -> std::vector<std::string> {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Mosfet>)
                return {d.drain, d.gate, d.source};
            else if constexpr (std::is_same_v<T, Resistor> || std::is_same_v<T, Capacitor>)
                return {d.a, d.b};
            else
                return {d.plus, d.minus};
        },
        e);
}

void Netlist::add_node(const std::string& name)
{
    if (name.empty())
        throw InvalidArgument("empty node name");
    if (node_index_.contains(name))
        throw InvalidArgument("duplicate identifier: " + name);
    node_index_.emplace(name, nodes_.size());
    nodes_.push_back(name);
}

void Netlist::add_ground(const std::string& name)
{
    add_node(name);
    ++ground_count_;
    if (!ground_)
        ground_ = name;
}

void Netlist::add_device(Device device)
{
    if (device.name.empty())
        throw InvalidArgument("empty device name");
    if (device_index_.contains(device.name))
        throw InvalidArgument("duplicate identifier: " + device.name);
    for (const std::string& t : terminals(device.element))
        if (!node_index_.contains(t))
            throw InvalidArgument("unknown node: " + t + " (device " + device.name + ")");
    device_index_.emplace(device.name, devices_.size());
    devices_.push_back(std::move(device));
}

void Netlist::add_subcircuit(const Subcircuit& sub)
{
    for (const std::string& n : sub.internal_nodes)
        add_node(n);
    for (const Device& d : sub.devices)
        add_device(d);
}

void Netlist::add_probe(const std::string& alias, const std::string& node)
{
    if (!node_index_.contains(node))
        throw InvalidArgument("unknown node: " + node + " (probe " + alias + ")");
    for (const auto& [a, n] : probes_)
        if (a == alias)
            throw InvalidArgument("duplicate identifier: probe " + alias);
    probes_.emplace_back(alias, node);
}

void Netlist::set_supply(const std::string& dc_source_name)
{
    const Device* d = find_device(dc_source_name);
    if (!d || !std::holds_alternative<DcSource>(d->element))
        throw InvalidArgument("supply must name a dc source: " + dc_source_name);
    supply_ = dc_source_name;
}

const Device* Netlist::find_device(const std::string& name) const
{
    const auto it = device_index_.find(name);
    return it == device_index_.end() ? nullptr : &devices_[it->second];
}

std::size_t Netlist::count_mosfets() const
{
    return static_cast<std::size_t>(std::count_if(devices_.begin(), devices_.end(), [](const Device& d) {
        return std::holds_alternative<Mosfet>(d.element);
    }));
}

std::vector<Violation> Netlist::validate() const
{
    std::vector<Violation> out;
    using K = Violation::Kind;

    if (ground_count_ == 0)
        out.push_back({K::NoGround, "", "no ground node"});
    else if (ground_count_ > 1)
        out.push_back({K::MultipleGround, *ground_, "more than one ground node"});

    // Union-find over nodes; every device ties all its terminals together.
    std::vector<std::size_t> parent(nodes_.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    const auto find = [&](std::size_t i) {
        while (parent[i] != i)
            i = parent[i] = parent[parent[i]];
        return i;
    };

    std::set<std::string> driven;  // nodes with a non-gate connection
    for (const Device& d : devices_) {
        const auto ts = terminals(d.element);
        std::vector<std::size_t> idx;
        for (const std::string& t : ts) {
            const auto it = node_index_.find(t);
            if (it == node_index_.end()) {
                out.push_back({K::UnknownNode, t, "device " + d.name + " references unknown node " + t});
                continue;
            }
            idx.push_back(it->second);
        }
        for (std::size_t i = 1; i < idx.size(); ++i)
            parent[find(idx[i])] = find(idx[0]);

        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, Mosfet>) {
                    driven.insert(e.drain);
                    driven.insert(e.source);
                    try {
                        e.params.validate();
                    } catch (const InvalidArgument& ex) {
                        out.push_back({K::BadParams, d.name, ex.what()});
                    }
                } else if constexpr (std::is_same_v<T, Resistor>) {
                    driven.insert(e.a);
                    driven.insert(e.b);
                    if (!(e.ohms > 0.0))
                        out.push_back({K::NonPositiveValue, d.name, "resistance must be > 0"});
                } else if constexpr (std::is_same_v<T, Capacitor>) {
                    if (!(e.farads > 0.0))
                        out.push_back({K::NonPositiveValue, d.name, "capacitance must be > 0"});
                } else if constexpr (std::is_same_v<T, DcSource>) {
                    driven.insert(e.plus);
                    driven.insert(e.minus);
                } else {
                    driven.insert(e.plus);
                    driven.insert(e.minus);
                    try {
                        e.pulse.validate();
                    } catch (const InvalidArgument& ex) {
                        out.push_back({K::BadParams, d.name, ex.what()});
                    }
                }
            },
            d.element);
    }

    if (ground_) {
        const std::size_t g = find(node_index_.at(*ground_));
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (find(i) != g)
                out.push_back({K::Disconnected, nodes_[i], "node " + nodes_[i] + " is not connected to ground"});
    }

    std::set<std::string> reported;
    for (const Device& d : devices_) {
        const auto* m = std::get_if<Mosfet>(&d.element);
        if (!m || m->gate == ground_ || driven.contains(m->gate) || reported.contains(m->gate))
            continue;
        reported.insert(m->gate);
        out.push_back({K::FloatingGate, m->gate, "gate node " + m->gate + " is not driven"});
    }
    return out;
}

} // namespace pfdsim
