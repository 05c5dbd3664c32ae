// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Each criterion also has to finish inside its time budget.

#include "oracles.hpp"

#include <pfdsim/calibration.hpp>
#include <pfdsim/devices.hpp>
#include <pfdsim/engine.hpp>
#include <pfdsim/experiments.hpp>
#include <pfdsim/measure.hpp>
#include <pfdsim/netlist.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <sys/wait.h>

using namespace pfdsim;
namespace fs = std::filesystem;

namespace {

// Recorded once from the bisection oracle at the default calibration.
constexpr double kGoldenDeadZone = 3.90625e-13;
constexpr double kGoldenFmax = 9251762800.416924;

struct Outcome {
    bool ok = true;
    std::vector<std::string> notes;

    void expect(bool cond, const std::string& what)
    {
        if (!cond) {
            ok = false;
            notes.push_back(what);
        }
    }
};

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

int jobs()
{
    return static_cast<int>(std::clamp(std::thread::hardware_concurrency(), 1u, 8u));
}

DesignPoint at_offset(double offset)
{
    DesignPoint p;
    p.offset = offset;
    return p;
}

// ---- criterion bodies ----

void solver_validation(Outcome& o)
{
    const double r = 1e3, c = 1e-12, rc = r * c, tr = 0.1e-12;
    Netlist n;
    n.add_ground("0");
    n.add_node("in");
    n.add_node("out");
    n.add_device({"VIN", PulseSource{"in", "0", PulseSpec{0.0, 1.0, 0.0, tr, tr, 1.0, 4.0}}});
    n.add_device({"R1", Resistor{"in", "out", r}});
    n.add_device({"C1", Capacitor{"out", "0", c}});
    n.add_probe("out", "out");
    SimOptions so;
    so.integrator = Integrator::Trapezoidal;
    so.dt = rc / 100;
    so.t_stop = 5 * rc;
    const TransientResult res = transient(n, so);
    const WaveformView v = res.probe("out");
    double worst = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        worst = std::max(worst, std::abs(v.value[i] - oracle::rc_ramp_response(v.time[i], rc, tr, 1.0)));
    o.expect(worst < 0.01, "RC max error " + fmt(worst));

    Netlist d;
    d.add_ground("0");
    d.add_node("top");
    d.add_node("mid");
    d.add_device({"V1", DcSource{"top", "0", 1.2}});
    d.add_device({"R1", Resistor{"top", "mid", 10e3}});
    d.add_device({"R2", Resistor{"mid", "0", 10e3}});
    const SimOptions dc;
    const double mid = dc_operating_point(d, dc).at("mid");
    o.expect(std::abs(mid - 0.6) <= dc.abstol_v, "divider " + fmt(mid));

    MosfetParams p = MosfetParams::default_nmos();
    p.lambda = 0.0;
    Netlist f;
    f.add_ground("0");
    f.add_node("vdd");
    f.add_node("d");
    f.add_device({"V1", DcSource{"vdd", "0", 1.2}});
    f.add_device({"R1", Resistor{"vdd", "d", 10e3}});
    f.add_device({"M1", Mosfet{"d", "d", "0", p}});
    const double vd = dc_operating_point(f, dc).at("d");
    const double k = p.kprime * p.w / p.l;
    const double want = oracle::bisect(
        [&](double x) { return 0.5 * k * (x - p.vth0) * (x - p.vth0) - (1.2 - x) / 10e3; }, p.vth0, 1.2);
    o.expect(std::abs(vd - want) < 1e-3, "diode node " + fmt(vd) + " vs " + fmt(want));
}

void numerical_hygiene(Outcome& o)
{
    const Calibration cal;
    const Netlist n = build_pfd(cal, pfd_options(cal, 1e9, 100e-12));
    SimOptions so;
    so.dt = 0.5e-12;
    so.t_stop = 10e-9;
    const TransientResult r = transient(n, so);
    const KclReport k = verify_kcl(n, so, r);
    o.expect(k.points_checked == r.size(), "KCL checked " + std::to_string(k.points_checked) + " points");
    o.expect(k.ok(), "KCL ratio " + fmt(k.worst_ratio) + " at node " + k.worst_node);

    std::mt19937_64 rng(20261016);
    std::uniform_real_distribution<double> volt(-1.4, 1.4);
    std::uniform_real_distribution<double> width(120e-9, 310e-9);
    const double h = 1e-6;
    int bad = 0;
    for (int i = 0; i < 1000; ++i) {
        MosfetParams p = (i % 2 == 0) ? MosfetParams::default_nmos() : MosfetParams::default_pmos();
        p.w = width(rng);
        const double vgs = volt(rng), vds = volt(rng);
        const Conductances g = mosfet_conductances(p, vgs, vds);
        const double gm = (mosfet_current(p, vgs + h, vds) - mosfet_current(p, vgs - h, vds)) / (2 * h);
        const double gds = (mosfet_current(p, vgs, vds + h) - mosfet_current(p, vgs, vds - h)) / (2 * h);
        const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-4 * std::abs(b) + 1e-12; };
        if (!close(g.gm, gm) || !close(g.gds, gds))
            ++bad;
    }
    o.expect(bad == 0, std::to_string(bad) + " of 1000 conductance samples off");
}

const std::vector<double> kOffsets = {25e-12, 50e-12, 100e-12, 200e-12, 400e-12};

void functional(Outcome& o)
{
    const ExperimentSettings s;
    o.expect(run_offset_experiment(s, at_offset(100e-12)).decision == Decision::LeadA, "+100 ps not LeadA");
    o.expect(run_offset_experiment(s, at_offset(-100e-12)).decision == Decision::LeadB, "-100 ps not LeadB");
    o.expect(run_offset_experiment(s, at_offset(0.0)).decision == Decision::Undetermined, "0 ps not Undetermined");
    for (double d : kOffsets) {
        if (d == 100e-12)
            continue;
        const Decision a = run_offset_experiment(s, at_offset(d)).decision;
        const Decision b = run_offset_experiment(s, at_offset(-d)).decision;
        o.expect(a == Decision::LeadA && b == mirror(a), "offset " + fmt(d) + " not antisymmetric");
    }
}

void mutual_exclusion(Outcome& o)
{
    const ExperimentSettings s;
    std::vector<double> grid = kOffsets;
    grid.push_back(0.0);
    grid.push_back(0.5e-9);
    double worst = 0.0;
    for (double d : grid)
        for (double sign : {1.0, -1.0}) {
            const DesignPoint p = at_offset(sign * d);
            worst = std::max(worst, run_offset_experiment(s, p).mutual_exclusion_overlap);
        }
    o.expect(worst <= 0.05 * 1e-9, "overlap " + fmt(worst) + " s");
    o.notes.push_back("worst overlap " + fmt(worst) + " s");
}

void dead_zone(Outcome& o)
{
    const ExperimentSettings s;
    const double a = measure_dead_zone(s, DesignPoint{});
    const double b = measure_dead_zone(s, DesignPoint{});
    o.expect(a == b, "not deterministic: " + fmt(a) + " vs " + fmt(b));
    o.expect(std::isfinite(a) && a > 0.0 && a < 200e-12, "outside (0, 200 ps): " + fmt(a));
    o.expect(a == kGoldenDeadZone, "golden " + fmt(kGoldenDeadZone) + ", got " + fmt(a));
    o.notes.push_back("dead zone " + fmt(a) + " s");
}

void half_period(Outcome& o)
{
    const ExperimentSettings s;
    const HalfPeriodResult r = half_period_test(s, at_offset(100e-12), 20);
    o.expect(r.periods.size() == 10, "checked " + std::to_string(r.periods.size()) + " periods");
    o.expect(r.stable, "unstable over the final periods");
    o.expect(r.report.decision == Decision::LeadA, "wrong decision");
}

void fmax_and_mismatch(Outcome& o)
{
    const ExperimentSettings s;
    const double a = measure_fmax(s, DesignPoint{});
    const double b = measure_fmax(s, DesignPoint{});
    o.expect(a == b, "not deterministic");
    o.expect(a >= 1e9, "f_max below 1 GHz: " + fmt(a));
    o.expect(std::abs(a - kGoldenFmax) <= 1e-6 * kGoldenFmax, "golden " + fmt(kGoldenFmax) + ", got " + fmt(a));

    ExperimentSettings doc;
    doc.calibration = load_calibration(PFDSIM_DATA_DIR "/default.params");
    const double f = measure_fmax(doc, DesignPoint{});
    o.expect(f >= 5e9, "default.params f_max " + fmt(f));

    const MismatchResult slow_fb = frequency_mismatch_test(s, DesignPoint{}, 1e9, 0.8e9);
    o.expect(slow_fb.up_high_time > slow_fb.dn_high_time, "f_fb < f_ref: UP not dominant");
    const MismatchResult fast_fb = frequency_mismatch_test(s, DesignPoint{}, 0.8e9, 1e9);
    o.expect(fast_fb.dn_high_time > fast_fb.up_high_time, "f_fb > f_ref: DN not dominant");
    o.notes.push_back("f_max " + fmt(a) + " Hz");
}

void width_trends(Outcome& o)
{
    ExperimentSettings s;
    s.jobs = jobs();
    const auto rows = width_sweep(s, DesignPoint{});
    o.expect(rows.size() == 5, "row count");
    bool rise_ok = true, power_ok = true;
    for (const ExperimentReport& r : rows)
        rise_ok = rise_ok && r.up_rise_time.has_value();
    if (!rise_ok) {
        o.expect(false, "missing rise time");
        return;
    }
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        rise_ok = rise_ok && *rows[i + 1].up_rise_time <= *rows[i].up_rise_time;
        power_ok = power_ok && rows[i + 1].avg_power >= rows[i].avg_power;
    }
    o.expect(rise_ok && *rows.back().up_rise_time < *rows.front().up_rise_time, "rise time trend");
    o.expect(power_ok && rows.back().avg_power > rows.front().avg_power, "power trend");
}

void corners(Outcome& o)
{
    ExperimentSettings s;
    s.jobs = jobs();
    const auto rows = corner_sweep(s, DesignPoint{}, s.calibration.corners.all());
    std::map<CornerName, double> rise;
    for (const ExperimentReport& r : rows) {
        o.expect(r.decision == Decision::LeadA, std::string(to_string(r.point.corner.name)) + " misclassified");
        if (r.up_rise_time)
            rise[r.point.corner.name] = *r.up_rise_time;
    }
    if (rise.size() != 5) {
        o.expect(false, "missing rise times");
        return;
    }
    o.expect(rise[CornerName::FF] <= rise[CornerName::TT] && rise[CornerName::TT] <= rise[CornerName::SS],
             "FF <= TT <= SS violated");
}

// Every file under dir, relative path -> contents.
std::map<std::string, std::string> snapshot(const fs::path& dir)
{
    std::map<std::string, std::string> files;
    if (fs::is_regular_file(dir)) {
        std::ifstream in(dir, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        files["."] = ss.str();
        return files;
    }
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file())
            continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        files[fs::relative(e.path(), dir).string()] = ss.str();
    }
    return files;
}

int run_cli(const std::string& args, const fs::path& log)
{
    const std::string cmd = std::string("\"") + PFDSIM_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void reproducibility(Outcome& o)
{
    const fs::path work = PFDSIM_WORK_DIR;
    fs::remove_all(work);
    fs::create_directories(work);
    const std::string net = (work / "canonical.net").string();
    const std::string fast_search = "--tol 10e-12 --f-lo 1e9 --f-hi 16e9 --tol-rel 0.02";
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"netlist", "netlist"},
        {"transient", "--plot transient"},
        {"simulate", "simulate " + net + " --stop 3e-9 --step 1e-12"},
        {"deadzone", "deadzone --tol 2e-12"},
        {"fmax", "fmax --f-lo 1e9 --f-hi 16e9 --tol-rel 0.02"},
        {"halfperiod", "--plot halfperiod"},
        {"mismatch", "mismatch --f-ref 1e9 --f-fb 0.8e9"},
        {"sweep-width", "--plot --jobs " + std::to_string(jobs()) + " sweep-width"},
        {"corners", "--plot --jobs " + std::to_string(jobs()) + " corners"},
        {"report", "report " + fast_search},
    };
    // The canonical netlist has to exist before simulate runs.
    if (run_cli("--out " + net + " netlist", work / "prep.log") != 0) {
        o.expect(false, "netlist export failed");
        return;
    }
    for (const auto& [name, args] : commands) {
        std::map<std::string, std::string> runs[2];
        std::string logs[2];
        for (int k = 0; k < 2; ++k) {
            const fs::path out = work / (name + "_" + std::to_string(k));
            const fs::path log = work / (name + "_" + std::to_string(k) + ".log");
            const int rc = run_cli("--out " + out.string() + " " + args, log);
            if (rc != 0) {
                o.expect(false, name + " exited " + std::to_string(rc));
                break;
            }
            runs[k] = snapshot(out);
            logs[k] = snapshot(log).begin()->second;
        }
        o.expect(!runs[0].empty(), name + " wrote nothing");
        o.expect(runs[0] == runs[1], name + " outputs differ");
        o.expect(logs[0] == logs[1], name + " stdout differs");
    }
}

struct Criterion {
    int id;
    const char* title;
    double budget_s;  // 0: no budget
    std::function<void(Outcome&)> body;
};

} // namespace

int main()
{
    const std::vector<Criterion> criteria = {
        {1, "solver validation", 1.0, solver_validation},
        {2, "numerical hygiene", 10.0, numerical_hygiene},
        {3, "functional lead/lag behaviour", 30.0, functional},
        {4, "mutual exclusion", 30.0, mutual_exclusion},
        {5, "dead zone", 120.0, dead_zone},
        {6, "half-period offset", 30.0, half_period},
        {7, "f_max and frequency mismatch", 180.0, fmax_and_mismatch},
        {8, "width-sweep trends", 120.0, width_trends},
        {9, "corner analysis", 60.0, corners},
        {10, "reproducibility of every subcommand", 0.0, reproducibility},
    };

    int failed = 0;
    for (const Criterion& c : criteria) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.body(o);
        } catch (const std::exception& e) {
            o.ok = false;
            o.notes.push_back(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0 && secs > c.budget_s) {
            o.ok = false;
            o.notes.push_back("over budget of " + fmt(c.budget_s) + " s");
        }
        std::printf("%s %d %s (%.2f s)", o.ok ? "PASS" : "FAIL", c.id, c.title, secs);
        for (const std::string& n : o.notes)
            std::printf("; %s", n.c_str());
        std::printf("\n");
        std::fflush(stdout);
        failed += o.ok ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
