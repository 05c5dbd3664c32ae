#include "pfdsim/calibration.hpp"

#include "pfdsim/error.hpp"
#include "text_util.hpp"

#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>

namespace pfdsim {

namespace {

using Setter = std::function<void(Calibration&, double)>;

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table = {
        {"vdd", [](Calibration& c, double v) { c.vdd = v; }},
        {"nmos.vth0", [](Calibration& c, double v) { c.nmos.vth0 = v; }},
        {"nmos.kprime", [](Calibration& c, double v) { c.nmos.kprime = v; }},
        {"nmos.lambda", [](Calibration& c, double v) { c.nmos.lambda = v; }},
        {"nmos.cgs", [](Calibration& c, double v) { c.nmos.cgs = v; }},
        {"nmos.cgd", [](Calibration& c, double v) { c.nmos.cgd = v; }},
        {"pmos.vth0", [](Calibration& c, double v) { c.pmos.vth0 = v; }},
        {"pmos.kprime", [](Calibration& c, double v) { c.pmos.kprime = v; }},
        {"pmos.lambda", [](Calibration& c, double v) { c.pmos.lambda = v; }},
        {"pmos.cgs", [](Calibration& c, double v) { c.pmos.cgs = v; }},
        {"pmos.cgd", [](Calibration& c, double v) { c.pmos.cgd = v; }},
        {"corner.fast.vth_scale", [](Calibration& c, double v) { c.corners.fast.vth_scale = v; }},
        {"corner.fast.k_scale", [](Calibration& c, double v) { c.corners.fast.k_scale = v; }},
        {"corner.slow.vth_scale", [](Calibration& c, double v) { c.corners.slow.vth_scale = v; }},
        {"corner.slow.k_scale", [](Calibration& c, double v) { c.corners.slow.k_scale = v; }},
        {"cap_ref_width", [](Calibration& c, double v) { c.cap_ref_width = v; }},
        {"pfd.internal_cap", [](Calibration& c, double v) { c.internal_cap = v; }},
        {"pfd.load_cap", [](Calibration& c, double v) { c.load_cap = v; }},
    };
    return table;
}

} // namespace

void Calibration::validate() const
{
    if (!(vdd > 0.0))
        throw InvalidArgument("calibration: vdd must be > 0");
    if (nmos.polarity != Polarity::NMOS || pmos.polarity != Polarity::PMOS)
        throw InvalidArgument("calibration: device polarity mismatch");
    nmos.validate();
    pmos.validate();
    for (const CornerSet& c : corners.all()) {
        c.validate();
    }
    if (!(corners.fast.vth_scale < 1.0 && corners.fast.k_scale > 1.0))
        throw InvalidArgument("calibration: fast corner needs vth_scale < 1 and k_scale > 1");
    if (!(corners.slow.vth_scale > 1.0 && corners.slow.k_scale < 1.0))
        throw InvalidArgument("calibration: slow corner needs vth_scale > 1 and k_scale < 1");
    if (!(cap_ref_width > 0.0))
        throw InvalidArgument("calibration: cap_ref_width must be > 0");
    if (!(internal_cap > 0.0 && load_cap > 0.0))
        throw InvalidArgument("calibration: pfd capacitances must be > 0");
}

Calibration parse_calibration(std::istream& in, Calibration base)
{
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view body = text::trim(text::strip_comment(line));
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos)
            throw InvalidArgument("calibration line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string_view key = text::trim(body.substr(0, eq));
        const std::string_view value = text::trim(body.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end())
            throw InvalidArgument("calibration line " + std::to_string(lineno) + ": unknown key '" +
                                  std::string(key) + "'");
        it->second(base, text::parse_double(value, "calibration line " + std::to_string(lineno)));
    }
    base.validate();
    return base;
}

Calibration load_calibration(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open calibration file '" + path.string() + "'");
    return parse_calibration(in);
}

void write_calibration(std::ostream& out, const Calibration& cal)
{
    const auto put = [&](const char* key, double v) { out << key << " = " << text::format_double(v) << '\n'; };
    put("vdd", cal.vdd);
    put("nmos.vth0", cal.nmos.vth0);
    put("nmos.kprime", cal.nmos.kprime);
    put("nmos.lambda", cal.nmos.lambda);
    put("nmos.cgs", cal.nmos.cgs);
    put("nmos.cgd", cal.nmos.cgd);
    put("pmos.vth0", cal.pmos.vth0);
    put("pmos.kprime", cal.pmos.kprime);
    put("pmos.lambda", cal.pmos.lambda);
    put("pmos.cgs", cal.pmos.cgs);
    put("pmos.cgd", cal.pmos.cgd);
    put("corner.fast.vth_scale", cal.corners.fast.vth_scale);
    put("corner.fast.k_scale", cal.corners.fast.k_scale);
    put("corner.slow.vth_scale", cal.corners.slow.vth_scale);
    put("corner.slow.k_scale", cal.corners.slow.k_scale);
    put("cap_ref_width", cal.cap_ref_width);
    put("pfd.internal_cap", cal.internal_cap);
    put("pfd.load_cap", cal.load_cap);
}

} // namespace pfdsim
