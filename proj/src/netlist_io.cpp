#include "pfdsim/netlist.hpp"

#include "pfdsim/error.hpp"
#include "text_util.hpp"

#include <istream>
#include <map>
#include <ostream>

namespace pfdsim {

namespace {

using text::format_double;

void write_params(std::ostream& out, const MosfetParams& p)
{
    out << " vth0=" << format_double(p.vth0) << " kprime=" << format_double(p.kprime)
        << " lambda=" << format_double(p.lambda) << " w=" << format_double(p.w) << " l=" << format_double(p.l)
        << " cgs=" << format_double(p.cgs) << " cgd=" << format_double(p.cgd);
}

// key=value tokens into a map; every key in `required` must appear.
std::map<std::string, double, std::less<>> parse_kv(const std::vector<std::string_view>& toks, std::size_t from,
                                                    std::initializer_list<const char*> required,
                                                    const std::string& ctx)
{
    std::map<std::string, double, std::less<>> kv;
    for (std::size_t i = from; i < toks.size(); ++i) {
        const auto eq = toks[i].find('=');
        if (eq == std::string_view::npos)
            throw InvalidArgument(ctx + ": expected key=value, got '" + std::string(toks[i]) + "'");
        kv[std::string(toks[i].substr(0, eq))] = text::parse_double(toks[i].substr(eq + 1), ctx);
    }
    for (const char* r : required)
        if (!kv.contains(r))
            throw InvalidArgument(ctx + ": missing '" + r + "'");
    if (kv.size() != required.size())
        throw InvalidArgument(ctx + ": unexpected parameter");
    return kv;
}

} // namespace

void write_netlist(std::ostream& out, const Netlist& n)
{
    out << "# pfdsim netlist v1\n";
    for (const std::string& node : n.nodes())
        out << (node == n.ground() ? "ground " : "node ") << node << '\n';
    for (const Device& d : n.devices()) {
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, Mosfet>) {
                    out << (e.params.polarity == Polarity::NMOS ? "nmos " : "pmos ") << d.name << ' ' << e.drain
                        << ' ' << e.gate << ' ' << e.source;
                    write_params(out, e.params);
                } else if constexpr (std::is_same_v<T, Resistor>) {
                    out << "resistor " << d.name << ' ' << e.a << ' ' << e.b << ' ' << format_double(e.ohms);
                } else if constexpr (std::is_same_v<T, Capacitor>) {
                    out << "capacitor " << d.name << ' ' << e.a << ' ' << e.b << ' ' << format_double(e.farads);
                } else if constexpr (std::is_same_v<T, DcSource>) {
                    out << "vdc " << d.name << ' ' << e.plus << ' ' << e.minus << ' ' << format_double(e.volts);
                } else {
                    const PulseSpec& p = e.pulse;
                    out << "vpulse " << d.name << ' ' << e.plus << ' ' << e.minus
                        << " v_low=" << format_double(p.v_low) << " v_high=" << format_double(p.v_high)
                        << " delay=" << format_double(p.delay) << " rise=" << format_double(p.rise)
                        << " fall=" << format_double(p.fall) << " width=" << format_double(p.width)
                        << " period=" << format_double(p.period);
                }
            },
            d.element);
        out << '\n';
    }
    for (const auto& [alias, node] : n.probes())
        out << "probe " << alias << ' ' << node << '\n';
    if (n.supply())
        out << "supply " << *n.supply() << '\n';
}

Netlist read_netlist(std::istream& in)
{
    Netlist n;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto toks = text::split_ws(text::trim(text::strip_comment(line)));
        if (toks.empty())
            continue;
        const std::string ctx = "netlist line " + std::to_string(lineno);
        const std::string_view kind = toks[0];
        const auto need = [&](std::size_t count) {
            if (toks.size() < count)
                throw InvalidArgument(ctx + ": too few fields for '" + std::string(kind) + "'");
        };
        const auto s = [&](std::size_t i) { return std::string(toks[i]); };
        try {
            if (kind == "node" || kind == "ground") {
                need(2);
                kind == "node" ? n.add_node(s(1)) : n.add_ground(s(1));
            } else if (kind == "nmos" || kind == "pmos") {
                need(5);
                const auto kv = parse_kv(toks, 5, {"vth0", "kprime", "lambda", "w", "l", "cgs", "cgd"}, ctx);
                MosfetParams p;
                p.polarity = kind == "nmos" ? Polarity::NMOS : Polarity::PMOS;
                p.vth0 = kv.at("vth0");
                p.kprime = kv.at("kprime");
                p.lambda = kv.at("lambda");
                p.w = kv.at("w");
                p.l = kv.at("l");
                p.cgs = kv.at("cgs");
                p.cgd = kv.at("cgd");
                n.add_device({s(1), Mosfet{s(2), s(3), s(4), p}});
            } else if (kind == "resistor" || kind == "capacitor" || kind == "vdc") {
                need(5);
                if (toks.size() != 5)
                    throw InvalidArgument(ctx + ": too many fields");
                const double v = text::parse_double(toks[4], ctx);
                if (kind == "resistor")
                    n.add_device({s(1), Resistor{s(2), s(3), v}});
                else if (kind == "capacitor")
                    n.add_device({s(1), Capacitor{s(2), s(3), v}});
                else
                    n.add_device({s(1), DcSource{s(2), s(3), v}});
            } else if (kind == "vpulse") {
                need(4);
                const auto kv =
                    parse_kv(toks, 4, {"v_low", "v_high", "delay", "rise", "fall", "width", "period"}, ctx);
                PulseSpec p{kv.at("v_low"), kv.at("v_high"), kv.at("delay"), kv.at("rise"),
                            kv.at("fall"),  kv.at("width"),  kv.at("period")};
                n.add_device({s(1), PulseSource{s(2), s(3), p}});
            } else if (kind == "probe") {
                need(3);
                n.add_probe(s(1), s(2));
            } else if (kind == "supply") {
                need(2);
                n.set_supply(s(1));
            } else {
                throw InvalidArgument(ctx + ": unknown element kind '" + std::string(kind) + "'");
            }
        } catch (const InvalidArgument& e) {
            const std::string msg = e.what();
            if (msg.rfind("netlist line", 0) == 0)
                throw;
            throw InvalidArgument(ctx + ": " + msg);
        }
    }
    return n;
}

} // namespace pfdsim
