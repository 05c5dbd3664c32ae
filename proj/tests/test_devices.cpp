#include "oracles.hpp"

#include <pfdsim/calibration.hpp>
#include <pfdsim/devices.hpp>
#include <pfdsim/error.hpp>

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace pfdsim;

namespace {

MosfetParams hand_nmos()
{
    MosfetParams p = MosfetParams::default_nmos();
    p.lambda = 0.0;
    return p;
}

MosfetParams random_params(std::mt19937_64& rng, Polarity pol)
{
    std::uniform_real_distribution<double> vth(0.15, 0.6), kp(20e-6, 400e-6), lam(0.0, 0.3), w(100e-9, 2e-6),
        l(50e-9, 500e-9);
    MosfetParams p;
    p.polarity = pol;
    p.vth0 = pol == Polarity::NMOS ? vth(rng) : -vth(rng);
    p.kprime = kp(rng);
    p.lambda = lam(rng);
    p.w = w(rng);
    p.l = l(rng);
    return p;
}

} // namespace

TEST_SUITE("devices") {

TEST_CASE("cutoff gives zero current and zero conductance")
{
    const MosfetParams p = hand_nmos();
    for (double vds : {0.0, 0.3, 1.2}) {
        CHECK(mosfet_current(p, 0.2, vds) == 0.0);
        const Conductances g = mosfet_conductances(p, 0.2, vds);
        CHECK(g.gm == 0.0);
        CHECK(g.gds == 0.0);
    }
}

TEST_CASE("saturation and triode hand values")
{
    const MosfetParams p = hand_nmos();
    CHECK(mosfet_current(p, 1.2, 1.2) == doctest::Approx(187.85e-6).epsilon(1e-9));
    CHECK(mosfet_current(p, 1.2, 0.1) == doctest::Approx(41.6e-6).epsilon(1e-9));
    CHECK(mosfet_conductances(p, 1.2, 1.2).gm == doctest::Approx(442e-6).epsilon(1e-9));
}

TEST_CASE("current matches the written-out square law")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> v(0.0, 1.5);
    for (int i = 0; i < 1000; ++i) {
        const MosfetParams p = random_params(rng, Polarity::NMOS);
        const double vgs = v(rng), vds = v(rng);
        const double want = oracle::square_law(p.vth0, p.kprime, p.w / p.l, p.lambda, vgs, vds);
        CHECK(mosfet_current(p, vgs, vds) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("conductances agree with central differences")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> v(-1.5, 1.5);
    const double h = 1e-6;
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        const MosfetParams p = random_params(rng, i % 2 ? Polarity::PMOS : Polarity::NMOS);
        const double vgs = v(rng), vds = v(rng);
        const Conductances g = mosfet_conductances(p, vgs, vds);
        const double fd_gm = (mosfet_current(p, vgs + h, vds) - mosfet_current(p, vgs - h, vds)) / (2 * h);
        const double fd_gds = (mosfet_current(p, vgs, vds + h) - mosfet_current(p, vgs, vds - h)) / (2 * h);
        // 1e-4 relative, with a 1 pA/V floor for points sitting in cutoff.
        CHECK(std::abs(fd_gm - g.gm) <= 1e-4 * std::abs(g.gm) + 1e-12);
        CHECK(std::abs(fd_gds - g.gds) <= 1e-4 * std::abs(g.gds) + 1e-12);
        ++checked;
    }
    CHECK(checked == 1000);
}

TEST_CASE("evaluate bundles current and conductances")
{
    const MosfetParams p = MosfetParams::default_pmos();
    const MosfetEval e = mosfet_evaluate(p, -0.9, -0.4);
    CHECK(e.id == mosfet_current(p, -0.9, -0.4));
    CHECK(e.g.gm == mosfet_conductances(p, -0.9, -0.4).gm);
    CHECK(e.g.gds == mosfet_conductances(p, -0.9, -0.4).gds);
}

TEST_CASE("current is continuous at the triode/saturation boundary")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> vg(0.7, 1.5);
    for (int i = 0; i < 1000; ++i) {
        const MosfetParams p = random_params(rng, Polarity::NMOS);
        const double vgs = vg(rng);
        const double vov = vgs - p.vth0;
        const double sat = mosfet_current(p, vgs, vov);
        const double tri = mosfet_current(p, vgs, std::nextafter(vov, 0.0));
        CHECK(std::abs(sat - tri) <= 1e-15);
    }
}

TEST_CASE("PMOS is the sign reflection of a mirrored NMOS")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> v(-1.5, 1.5);
    for (int i = 0; i < 500; ++i) {
        MosfetParams n = random_params(rng, Polarity::NMOS);
        MosfetParams p = n;
        p.polarity = Polarity::PMOS;
        p.vth0 = -n.vth0;
        const double vgs = v(rng), vds = v(rng);
        CHECK(mosfet_current(p, vgs, vds) == -mosfet_current(n, -vgs, -vds));
    }
}

TEST_CASE("drain and source are interchangeable")
{
    const MosfetParams p = MosfetParams::default_nmos();
    // Swap the roles of the two terminals: vgs' = vgs - vds, vds' = -vds.
    for (double vgs : {0.5, 0.9, 1.2})
        for (double vds : {0.05, 0.4, 1.0})
            CHECK(mosfet_current(p, vgs - vds, -vds) == doctest::Approx(-mosfet_current(p, vgs, vds)).epsilon(1e-12));
}

TEST_CASE("saturation current increases with vgs and width")
{
    MosfetParams p = MosfetParams::default_nmos();
    double prev = 0.0;
    for (double vgs = 0.40; vgs <= 1.2; vgs += 0.05) {
        const double i = mosfet_current(p, vgs, 1.2);
        CHECK(i > prev);
        prev = i;
    }
    prev = 0.0;
    for (double w = 120e-9; w <= 310e-9; w += 10e-9) {
        p.w = w;
        const double i = mosfet_current(p, 1.0, 1.2);
        CHECK(i > prev);
        prev = i;
    }
}

TEST_CASE("parameter validation")
{
    MosfetParams p = MosfetParams::default_nmos();
    CHECK_NOTHROW(p.validate());
    p.vth0 = -0.3;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = MosfetParams::default_pmos();
    p.vth0 = 0.3;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = MosfetParams::default_nmos();
    p.w = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = MosfetParams::default_nmos();
    p.lambda = -0.1;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("corners")
{
    const CornerTable table;
    const MosfetParams n = MosfetParams::default_nmos();
    const MosfetParams p = MosfetParams::default_pmos();

    CHECK(apply_corner(n, table.corner(CornerName::TT)) == n);
    CHECK(apply_corner(p, CornerSet::typical()) == p);

    const MosfetParams nff = apply_corner(n, table.corner(CornerName::FF));
    CHECK(nff.vth0 == doctest::Approx(0.315));
    CHECK(nff.kprime == doctest::Approx(230e-6));
    CHECK(nff.w == n.w);
    CHECK(nff.lambda == n.lambda);

    const MosfetParams pss = apply_corner(p, table.corner(CornerName::SS));
    CHECK(pss.vth0 == doctest::Approx(-0.385));
    CHECK(pss.kprime == doctest::Approx(68e-6));

    // First letter is the NMOS speed.
    const CornerSet fs = table.corner(CornerName::FS);
    CHECK(fs.vth_scale_n < 1.0);
    CHECK(fs.k_scale_n > 1.0);
    CHECK(fs.vth_scale_p > 1.0);
    CHECK(fs.k_scale_p < 1.0);

    const auto all = table.all();
    REQUIRE(all.size() == 5);
    CHECK(all[0].name == CornerName::TT);
    for (const CornerSet& c : all)
        CHECK_NOTHROW(c.validate());

    CHECK(parse_corner_name("ff") == CornerName::FF);
    CHECK_THROWS_AS((void)parse_corner_name("XX"), InvalidArgument);
}

TEST_CASE("calibration file round trip")
{
    Calibration cal;
    cal.vdd = 1.0;
    cal.nmos.kprime = 250e-6;
    cal.corners.fast.k_scale = 1.2;
    cal.load_cap = 2e-15;
    std::stringstream ss;
    write_calibration(ss, cal);
    const Calibration back = parse_calibration(ss);
    CHECK(back.vdd == cal.vdd);
    CHECK(back.nmos == cal.nmos);
    CHECK(back.pmos == cal.pmos);
    CHECK(back.corners.fast.k_scale == 1.2);
    CHECK(back.load_cap == 2e-15);

    std::istringstream partial("# comment\nvdd = 1.1   # trailing\n\n");
    CHECK(parse_calibration(partial).vdd == 1.1);

    std::istringstream unknown("nmos.vth = 0.3\n");
    CHECK_THROWS_AS((void)parse_calibration(unknown), InvalidArgument);
    std::istringstream bad("vdd = fast\n");
    CHECK_THROWS_AS((void)parse_calibration(bad), InvalidArgument);
    std::istringstream negative("nmos.vth0 = -0.2\n");
    CHECK_THROWS_AS((void)parse_calibration(negative), InvalidArgument);
}

TEST_CASE("shipped calibration file matches the compiled defaults")
{
    const Calibration cal = load_calibration(PFDSIM_DATA_DIR "/default.params");
    const Calibration def;
    CHECK(cal.vdd == def.vdd);
    CHECK(cal.nmos == def.nmos);
    CHECK(cal.pmos == def.pmos);
    CHECK(cal.corners.fast.vth_scale == def.corners.fast.vth_scale);
    CHECK(cal.corners.slow.k_scale == def.corners.slow.k_scale);
    CHECK(cal.internal_cap == def.internal_cap);
    CHECK(cal.load_cap == def.load_cap);
}

} // TEST_SUITE
