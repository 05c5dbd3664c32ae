#include "pfdsim/netlist.hpp"

#include "pfdsim/error.hpp"

#include <algorithm>

namespace pfdsim {

Subcircuit build_nor2(const std::string& prefix, const std::string& out, const std::string& in1,
                      const std::string& in2, const std::string& vdd, const std::string& gnd,
                      const MosfetParams& p_params, const MosfetParams& n_params)
{
    const std::string mid = prefix + "_p";
    Subcircuit s;
    s.internal_nodes = {mid};
    s.devices = {
        {prefix + "_P1", Mosfet{mid, in1, vdd, p_params}},
        {prefix + "_P2", Mosfet{out, in2, mid, p_params}},
        {prefix + "_N1", Mosfet{out, in1, gnd, n_params}},
        {prefix + "_N2", Mosfet{out, in2, gnd, n_params}},
    };
    return s;
}

void PfdOptions::validate() const
{
    if (!(width > 0.0))
        throw InvalidArgument("pfd: width must be > 0");
    if (!(length > 0.0))
        throw InvalidArgument("pfd: length must be > 0");
    if (!(load_cap > 0.0))
        throw InvalidArgument("pfd: load_cap must be > 0");
    corner.validate();
    input_a.validate();
    input_b.validate();
}

PfdOptions pfd_options(const Calibration& cal, double frequency, double offset)
{
    if (!(frequency > 0.0))
        throw InvalidArgument("frequency must be > 0");
    PfdOptions o;
    o.load_cap = cal.load_cap;
    o.input_a = PulseSpec::clock(frequency, std::max(0.0, -offset), cal.vdd);
    o.input_b = PulseSpec::clock(frequency, std::max(0.0, offset), cal.vdd);
    return o;
}

Netlist build_pfd(const Calibration& cal, const PfdOptions& opts)
{
    cal.validate();
    opts.validate();

    const auto sized = [&](const MosfetParams& base) {
        MosfetParams p = apply_corner(base, opts.corner);
        const double scale = opts.width / cal.cap_ref_width;
        p.w = opts.width;
        p.l = opts.length;
        p.cgs = base.cgs * scale;
        p.cgd = base.cgd * scale;
        return p;
    };
    const MosfetParams n = sized(cal.nmos);
    const MosfetParams p = sized(cal.pmos);

    Netlist net;
    net.add_ground("0");
    for (const char* node : {"VDD", "A", "B", "X", "Y", "UP", "DN", "xn", "xp", "yn", "yp"})
        net.add_node(node);

    net.add_device({"VDD", DcSource{"VDD", "0", cal.vdd}});
    net.add_device({"VA", PulseSource{"A", "0", opts.input_a}});
    net.add_device({"VB", PulseSource{"B", "0", opts.input_b}});

    // Detection core. X discharges on A only while Y is still high, and Y on
    // B only while X is still high; both recharge when A = B = 0.
    net.add_device({"NM1", Mosfet{"X", "A", "xn", n}});
    net.add_device({"NM2", Mosfet{"xn", "Y", "0", n}});
    net.add_device({"NM3", Mosfet{"Y", "B", "yn", n}});
    net.add_device({"NM4", Mosfet{"yn", "X", "0", n}});
    net.add_device({"PM1", Mosfet{"xp", "A", "VDD", p}});
    net.add_device({"PM2", Mosfet{"X", "B", "xp", p}});
    net.add_device({"PM4", Mosfet{"yp", "B", "VDD", p}});
    net.add_device({"PM3", Mosfet{"Y", "A", "yp", p}});

    // Output restoration: UP = NOR(X, DN), DN = NOR(Y, UP).
    net.add_subcircuit(build_nor2("NOR_UP", "UP", "X", "DN", "VDD", "0", p, n));
    net.add_subcircuit(build_nor2("NOR_DN", "DN", "Y", "UP", "VDD", "0", p, n));

    net.add_device({"CX", Capacitor{"X", "0", cal.internal_cap}});
    net.add_device({"CY", Capacitor{"Y", "0", cal.internal_cap}});
    net.add_device({"CUP", Capacitor{"UP", "0", opts.load_cap}});
    net.add_device({"CDN", Capacitor{"DN", "0", opts.load_cap}});

    for (const char* probe : {"A", "B", "X", "Y", "UP", "DN", "VDD"})
        net.add_probe(probe, probe);
    net.set_supply("VDD");
    return net;
}

} // namespace pfdsim
