#include "pfdsim/devices.hpp"

#include "pfdsim/error.hpp"

#include <cctype>
#include <cmath>
#include <string>

namespace pfdsim {

namespace {

// NMOS-frame evaluation for vds >= 0. Returns current and partials w.r.t.
// (vgs, vds).
MosfetEval forward(double beta, double vth, double lambda, double vgs, double vds) noexcept
{
    MosfetEval out;
    const double vov = vgs - vth;
    if (vov <= 0.0)
        return out;
    const double clm = 1.0 + lambda * vds;
    if (vds < vov) {
        const double core = vov * vds - 0.5 * vds * vds;
        out.id = beta * core * clm;
        out.g.gm = beta * vds * clm;
        out.g.gds = beta * ((vov - vds) * clm + core * lambda);
    } else {
        const double core = 0.5 * vov * vov;
        out.id = beta * core * clm;
        out.g.gm = beta * vov * clm;
        out.g.gds = beta * core * lambda;
    }
    return out;
}

// Symmetric NMOS-frame evaluation: reverse conduction swaps drain/source.
MosfetEval nmos_frame(double beta, double vth, double lambda, double vgs, double vds) noexcept
{
    if (vds >= 0.0)
        return forward(beta, vth, lambda, vgs, vds);
    // I(vgs, vds) = -f(vgs - vds, -vds)
    const MosfetEval r = forward(beta, vth, lambda, vgs - vds, -vds);
    MosfetEval out;
    out.id = -r.id;
    out.g.gm = -r.g.gm;
    out.g.gds = r.g.gm + r.g.gds;
    return out;
}

} // namespace

void MosfetParams::validate() const
{
    const auto fail = [](const char* what) { throw InvalidArgument(std::string("mosfet params: ") + what); };
    if (!(w > 0.0)) fail("w must be > 0");
    if (!(l > 0.0)) fail("l must be > 0");
    if (!(kprime > 0.0)) fail("kprime must be > 0");
    if (!(lambda >= 0.0)) fail("lambda must be >= 0");
    if (!(cgs >= 0.0)) fail("cgs must be >= 0");
    if (!(cgd >= 0.0)) fail("cgd must be >= 0");
    if (polarity == Polarity::NMOS && !(vth0 > 0.0)) fail("NMOS vth0 must be > 0");
    if (polarity == Polarity::PMOS && !(vth0 < 0.0)) fail("PMOS vth0 must be < 0");
}

MosfetParams MosfetParams::default_nmos()
{
    return {};
}

MosfetParams MosfetParams::default_pmos()
{
    MosfetParams p;
    p.polarity = Polarity::PMOS;
    p.vth0 = -0.35;
    p.kprime = 80e-6;
    return p;
}

MosfetEval mosfet_evaluate(const MosfetParams& p, double vgs, double vds) noexcept
{
    const double beta = p.kprime * (p.w / p.l);
    const double vth = std::abs(p.vth0);
    if (p.polarity == Polarity::NMOS)
        return nmos_frame(beta, vth, p.lambda, vgs, vds);
    // I_p(vgs, vds) = -I_n(-vgs, -vds); the two sign flips cancel in the
    // derivatives.
    MosfetEval r = nmos_frame(beta, vth, p.lambda, -vgs, -vds);
    r.id = -r.id;
    return r;
}

double mosfet_current(const MosfetParams& p, double vgs, double vds) noexcept
{
    return mosfet_evaluate(p, vgs, vds).id;
}

Conductances mosfet_conductances(const MosfetParams& p, double vgs, double vds) noexcept
{
    return mosfet_evaluate(p, vgs, vds).g;
}

std::string_view to_string(CornerName c) noexcept
{
    switch (c) {
    case CornerName::TT: return "TT";
    case CornerName::FF: return "FF";
    case CornerName::FS: return "FS";
    case CornerName::SF: return "SF";
    case CornerName::SS: return "SS";
    }
    return "TT";
}

CornerName parse_corner_name(std::string_view s)
{
    std::string up;
    for (char ch : s)
        up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
    for (CornerName c : {CornerName::TT, CornerName::FF, CornerName::FS, CornerName::SF, CornerName::SS})
        if (up == to_string(c))
            return c;
    throw InvalidArgument("unknown corner '" + std::string(s) + "' (expected TT, FF, FS, SF or SS)");
}

void CornerSet::validate() const
{
    if (!(vth_scale_n > 0.0 && vth_scale_p > 0.0 && k_scale_n > 0.0 && k_scale_p > 0.0))
        throw InvalidArgument("corner " + std::string(to_string(name)) + ": all scales must be > 0");
}

CornerSet CornerTable::corner(CornerName name) const
{
    const SpeedScales typ{};
    const auto pick = [&](char letter) -> const SpeedScales& {
        return letter == 'F' ? fast : letter == 'S' ? slow : typ;
    };
    const std::string_view code = to_string(name);
    const SpeedScales& n = name == CornerName::TT ? typ : pick(code[0]);
    const SpeedScales& p = name == CornerName::TT ? typ : pick(code[1]);
    return {name, n.vth_scale, p.vth_scale, n.k_scale, p.k_scale};
}

std::vector<CornerSet> CornerTable::all() const
{
    return {corner(CornerName::TT), corner(CornerName::FF), corner(CornerName::FS),
            corner(CornerName::SF), corner(CornerName::SS)};
}

MosfetParams apply_corner(const MosfetParams& p, const CornerSet& c) noexcept
{
    MosfetParams out = p;
    const bool n = p.polarity == Polarity::NMOS;
    out.vth0 = p.vth0 * (n ? c.vth_scale_n : c.vth_scale_p);
    out.kprime = p.kprime * (n ? c.k_scale_n : c.k_scale_p);
    return out;
}

} // namespace pfdsim
