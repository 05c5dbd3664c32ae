// pfdsim: command-line front end over the C interface.

#include <pfdsim/pfdsim.h>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

namespace {

enum Exit { kOk = 0, kUsage = 1, kSolver = 2, kCheck = 3 };

int exit_code(pfd_status s)
{
    switch (s) {
    case PFD_OK: return kOk;
    case PFD_ERR_INVALID_ARGUMENT:
    case PFD_ERR_IO: return kUsage;
    case PFD_ERR_CHECK_FAILED: return kCheck;
    case PFD_ERR_SOLVER:
    case PFD_ERR_INTERNAL: return kSolver;
    }
    return kSolver;
}

// A flag forwarded to pfd_session_set when given on the command line.
struct Forward {
    std::string key;
    std::string value;
    CLI::Option* opt = nullptr;
};

class Forwards {
public:
    void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help)
    {
        auto& f = items_.emplace_back(std::make_unique<Forward>());
        f->key = key;
        f->opt = app->add_option(flag, f->value, help);
    }

    void flag(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help)
    {
        auto& f = items_.emplace_back(std::make_unique<Forward>());
        f->key = key;
        f->value = "1";
        f->opt = app->add_flag(flag, help);
    }

    pfd_status apply(pfd_session* s) const
    {
        for (const auto& f : items_) {
            if (f->opt->count() == 0)
                continue;
            if (pfd_status st = pfd_session_set(s, f->key.c_str(), f->value.c_str()); st != PFD_OK)
                return st;
        }
        return PFD_OK;
    }

private:
    std::vector<std::unique_ptr<Forward>> items_;
};

struct SessionDeleter {
    void operator()(pfd_session* s) const { pfd_session_destroy(s); }
};
struct ResultDeleter {
    void operator()(pfd_result* r) const { pfd_result_destroy(r); }
};

int report_error(pfd_status s)
{
    std::cerr << "pfdsim: " << pfd_status_name(s) << ": " << pfd_last_error() << '\n';
    return exit_code(s);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Transistor-level simulator and characterization harness for a 16-FET phase-frequency detector",
                 "pfdsim"};
    app.require_subcommand(0, 1);
    app.fallthrough();

    Forwards fw;
    fw.add(&app, "--width", "width", "transistor width, m");
    fw.add(&app, "--length", "length", "transistor length, m");
    fw.add(&app, "--corner", "corner", "process corner: TT, FF, FS, SF, SS");
    fw.add(&app, "--freq", "freq", "input frequency, Hz");
    fw.add(&app, "--offset", "offset", "phase offset, s (> 0: A leads)");
    fw.add(&app, "--dt", "dt", "base time step, s");
    fw.add(&app, "--integrator", "integrator", "backward_euler or trapezoidal");
    fw.add(&app, "--t-stop", "t_stop", "stop time, s");
    fw.add(&app, "--periods", "periods", "simulated input periods");
    fw.add(&app, "--jobs", "jobs", "parallel workers for sweeps");
    fw.add(&app, "--reltol", "reltol", "Newton relative tolerance");
    fw.add(&app, "--gmin", "gmin", "node-to-ground conductance, S");

    std::string out_dir = "pfdsim_out";
    std::string params;
    bool plot = false;
    app.add_option("--out", out_dir, "output directory (output file for `netlist`)");
    app.add_option("--params", params, "calibration file")->check(CLI::ExistingFile);
    app.add_flag("--plot", plot, "also write plot_*.svg");

    app.add_subcommand("transient", "lead/lag run at one offset");
    auto* deadzone = app.add_subcommand("deadzone", "bisect the smallest resolvable offset");
    fw.add(deadzone, "--lo", "lo", "lower offset bound, s");
    fw.add(deadzone, "--hi", "hi", "upper offset bound, s");
    fw.add(deadzone, "--tol", "tol", "bisection tolerance, s");

    app.add_subcommand("halfperiod", "offset of exactly half a period");
    auto* fmax = app.add_subcommand("fmax", "highest frequency with a correct, resetting decision");
    const auto fmax_opts = [&](CLI::App* sub) {
        fw.add(sub, "--f-lo", "f_lo", "lower frequency bound, Hz");
        fw.add(sub, "--f-hi", "f_hi", "upper frequency bound, Hz");
        fw.add(sub, "--tol-rel", "tol_rel", "relative bisection tolerance");
        fw.add(sub, "--offset-fraction", "offset_fraction", "offset as a fraction of the period");
        fw.add(sub, "--check-periods", "check_periods", "consecutive periods that must pass");
    };
    fmax_opts(fmax);

    auto* mismatch = app.add_subcommand("mismatch", "inputs at different frequencies");
    fw.add(mismatch, "--f-ref", "f_ref", "frequency of A, Hz");
    fw.add(mismatch, "--f-fb", "f_fb", "frequency of B, Hz");

    auto* sweep = app.add_subcommand("sweep-width", "rise time and power against width");
    fw.add(sweep, "--w-lo", "w_lo", "smallest width, m");
    fw.add(sweep, "--w-hi", "w_hi", "largest width, m");
    fw.add(sweep, "--steps", "steps", "number of widths");
    fw.flag(sweep, "--with-fmax", "with_fmax", "also measure f_max per width");
    fmax_opts(sweep);

    auto* corners = app.add_subcommand("corners", "one run per process corner");
    fw.add(corners, "--corners", "corners", "comma-separated corner list");

    auto* report = app.add_subcommand("report", "summary table: merge report.json files, or characterize one design");
    std::vector<std::string> inputs;
    report->add_option("--in", inputs, "report.json files to merge")->check(CLI::ExistingFile);
    fw.add(report, "--lo", "lo", "dead-zone lower bound, s");
    fw.add(report, "--hi", "hi", "dead-zone upper bound, s");
    fw.add(report, "--tol", "tol", "dead-zone tolerance, s");
    fmax_opts(report);

    auto* netlist = app.add_subcommand("netlist", "write the PFD netlist for the design point to --out");
    auto* simulate = app.add_subcommand("simulate", "transient analysis of a netlist file");
    std::string netlist_in;
    double sim_t_stop = 10e-9, sim_dt = 0.5e-12;
    simulate->add_option("netlist", netlist_in, "netlist file")->required()->check(CLI::ExistingFile);
    simulate->add_option("--stop", sim_t_stop, "stop time, s");
    simulate->add_option("--step", sim_dt, "time step, s");

    for (CLI::App* sub : app.get_subcommands({}))
        sub->fallthrough();

    if (argc < 2) {
        std::cerr << app.help();
        return kUsage;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return kUsage;
    }
    CLI::App* cmd = app.get_subcommands().front();

    pfd_session* raw = nullptr;
    if (pfd_status s = pfd_session_create(&raw); s != PFD_OK)
        return report_error(s);
    std::unique_ptr<pfd_session, SessionDeleter> session(raw);
    if (!params.empty())
        if (pfd_status s = pfd_session_load_params(session.get(), params.c_str()); s != PFD_OK)
            return report_error(s);
    if (pfd_status s = fw.apply(session.get()); s != PFD_OK)
        return report_error(s);

    if (cmd == netlist) {
        if (pfd_status s = pfd_session_export_netlist(session.get(), out_dir.c_str()); s != PFD_OK)
            return report_error(s);
        return kOk;
    }

    pfd_result* res_raw = nullptr;
    pfd_status st = PFD_OK;
    if (cmd == simulate) {
        st = pfd_simulate_netlist(session.get(), netlist_in.c_str(), sim_t_stop, sim_dt, &res_raw);
    } else if (cmd == report && !inputs.empty()) {
        std::vector<std::string> texts;
        for (const std::string& path : inputs) {
            std::ifstream f(path);
            if (!f) {
                std::cerr << "pfdsim: cannot read " << path << '\n';
                return kUsage;
            }
            texts.emplace_back(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
        }
        std::vector<const char*> ptrs;
        for (const std::string& t : texts)
            ptrs.push_back(t.c_str());
        st = pfd_summarize(session.get(), ptrs.data(), ptrs.size(), &res_raw);
    } else {
        const std::string experiment = cmd == report ? "characterize" : cmd->get_name();
        st = pfd_session_run(session.get(), experiment.c_str(), &res_raw);
    }
    if (st != PFD_OK)
        return report_error(st);
    std::unique_ptr<pfd_result, ResultDeleter> result(res_raw);

    if (pfd_status s = pfd_result_write(result.get(), out_dir.c_str(), plot ? 1 : 0); s != PFD_OK)
        return report_error(s);
    std::cout << pfd_result_summary(result.get());
    return pfd_result_passed(result.get()) ? kOk : kCheck;
}
