#include "mna.hpp"

#include "pfdsim/error.hpp"

#include <algorithm>
#include <cmath>

namespace pfdsim::mna {

int Circuit::node_index(std::string_view name) const
{
    for (std::size_t i = 0; i < node_names.size(); ++i)
        if (node_names[i] == name)
            return static_cast<int>(i);
    return kGround;
}

Circuit compile(const Netlist& netlist)
{
    const auto violations = netlist.validate();
    if (!violations.empty()) {
        std::string msg = "invalid netlist:";
        for (const Violation& v : violations)
            msg += " [" + v.message + "]";
        throw InvalidArgument(msg);
    }

    Circuit c;
    std::map<std::string, int, std::less<>> index;
    for (const std::string& n : netlist.nodes()) {
        if (n == netlist.ground()) {
            index[n] = kGround;
            continue;
        }
        index[n] = static_cast<int>(c.node_names.size());
        c.node_names.push_back(n);
    }

    std::vector<Cap> gate_caps;
    for (const Device& dev : netlist.devices()) {
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, Mosfet>) {
                    const Fet f{index.at(e.drain), index.at(e.gate), index.at(e.source), e.params};
                    c.fets.push_back(f);
                    if (e.params.cgs > 0.0)
                        gate_caps.push_back({f.g, f.s, e.params.cgs});
                    if (e.params.cgd > 0.0)
                        gate_caps.push_back({f.g, f.d, e.params.cgd});
                } else if constexpr (std::is_same_v<T, Resistor>) {
                    c.resistors.push_back({index.at(e.a), index.at(e.b), 1.0 / e.ohms});
                } else if constexpr (std::is_same_v<T, Capacitor>) {
                    c.caps.push_back({index.at(e.a), index.at(e.b), e.farads});
                } else if constexpr (std::is_same_v<T, DcSource>) {
                    c.sources.push_back({dev.name, index.at(e.plus), index.at(e.minus), e.volts});
                } else {
                    c.sources.push_back({dev.name, index.at(e.plus), index.at(e.minus), e.pulse});
                }
            },
            dev.element);
    }
    // Caps whose terminals coincide carry no current.
    std::erase_if(gate_caps, [](const Cap& cap) { return cap.a == cap.b; });
    c.caps.insert(c.caps.end(), gate_caps.begin(), gate_caps.end());
    return c;
}

void stamp_static(const Circuit& c, const Eigen::VectorXd& x, double t, double gmin, Residual& res,
                  Eigen::MatrixXd* jac)
{
    const auto J = [&](int r, int col, double v) {
        if (jac && r != kGround && col != kGround)
            (*jac)(r, col) += v;
    };

    for (int i = 0; i < c.num_nodes(); ++i) {
        const double i_g = gmin * x[i];
        res.f[i] += i_g;
        res.scale[i] = std::max(res.scale[i], std::abs(i_g));
        J(i, i, gmin);
    }

    for (const Res& r : c.resistors) {
        add_branch_current(res, r.a, r.b, r.g * (voltage(x, r.a) - voltage(x, r.b)));
        J(r.a, r.a, r.g);
        J(r.a, r.b, -r.g);
        J(r.b, r.a, -r.g);
        J(r.b, r.b, r.g);
    }

    for (const Fet& f : c.fets) {
        const double vs = voltage(x, f.s);
        const MosfetEval ev = mosfet_evaluate(f.params, voltage(x, f.g) - vs, voltage(x, f.d) - vs);
        add_branch_current(res, f.d, f.s, ev.id);
        const double gm = ev.g.gm;
        const double gds = ev.g.gds;
        J(f.d, f.d, gds);
        J(f.d, f.g, gm);
        J(f.d, f.s, -gm - gds);
        J(f.s, f.d, -gds);
        J(f.s, f.g, -gm);
        J(f.s, f.s, gm + gds);
    }

    const int n = c.num_nodes();
    for (std::size_t k = 0; k < c.sources.size(); ++k) {
        const Src& s = c.sources[k];
        const int b = n + static_cast<int>(k);
        const double j = x[b];
        add_branch_current(res, s.plus, s.minus, j);
        res.f[b] += voltage(x, s.plus) - voltage(x, s.minus) - s.value(t);
        J(s.plus, b, 1.0);
        J(s.minus, b, -1.0);
        J(b, s.plus, 1.0);
        J(b, s.minus, -1.0);
    }
}

WorstRow worst_node_residual(const Circuit& c, const Residual& res, const SimOptions& opt) noexcept
{
    WorstRow w;
    for (int i = 0; i < c.num_nodes(); ++i) {
        const double r = std::abs(res.f[i]);
        const double ratio = r / (opt.abstol_i + opt.reltol * res.scale[i]);
        if (!(ratio <= w.ratio)) {  // NaN propagates as worst
            w.ratio = std::isnan(ratio) ? std::numeric_limits<double>::infinity() : ratio;
            w.residual = r;
            w.index = i;
        }
    }
    return w;
}

} // namespace pfdsim::mna
