#include "pfdsim/pfdsim.h"

#include "pfdsim/error.hpp"
#include "pfdsim/plot.hpp"
#include "pfdsim/runner.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

struct pfd_session {
    pfdsim::RunConfig config;
};

struct pfd_result {
    pfdsim::RunOutput output;
    std::string json;
    std::string summary;
    std::vector<std::string> probes;
    std::vector<pfdsim::WaveformView> probe_waves;  // into output.waves
};

namespace {

thread_local std::string g_last_error;

pfd_status fail(pfd_status s, const std::string& msg)
{
    g_last_error = msg;
    return s;
}

// Maps the C++ exception hierarchy onto status codes.
template <class F>
pfd_status guarded(F&& f) noexcept
{
    try {
        f();
        g_last_error.clear();
        return PFD_OK;
    } catch (const pfdsim::SolverError& e) {
        std::ostringstream o;
        o << e.what();
        if (!e.worst_node().empty())
            o << " (node " << e.worst_node() << ", t = " << e.time() << " s)";
        return fail(PFD_ERR_SOLVER, o.str());
    } catch (const pfdsim::ExperimentError& e) {
        return fail(PFD_ERR_CHECK_FAILED, e.what());
    } catch (const pfdsim::MeasureError& e) {
        return fail(PFD_ERR_CHECK_FAILED, e.what());
    } catch (const pfdsim::IoError& e) {
        return fail(PFD_ERR_IO, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(PFD_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(PFD_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(PFD_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(PFD_ERR_INTERNAL, "unknown error");
    }
}

pfd_result* make_result(pfdsim::RunOutput out)
{
    auto r = std::make_unique<pfd_result>();
    r->output = std::move(out);
    r->json = r->output.report_json();
    r->summary = r->output.summary();
    if (r->output.waves) {
        const pfdsim::TransientResult& w = *r->output.waves;
        for (const std::string& name : w.probe_names()) {
            r->probes.push_back(name);
            r->probe_waves.emplace_back(w.probe(name));
        }
    }
    return r.release();
}

void require(const void* p, const char* what)
{
    if (!p)
        throw pfdsim::InvalidArgument(std::string(what) + " is null");
}

} // namespace

extern "C" {

const char* pfd_version(void)
{
    return "0.1.0";
}

const char* pfd_last_error(void)
{
    return g_last_error.c_str();
}

const char* pfd_status_name(pfd_status status)
{
    switch (status) {
    case PFD_OK: return "ok";
    case PFD_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PFD_ERR_SOLVER: return "solver error";
    case PFD_ERR_CHECK_FAILED: return "check failed";
    case PFD_ERR_IO: return "i/o error";
    case PFD_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

pfd_status pfd_session_create(pfd_session** out)
{
    return guarded([&] {
        require(out, "out");
        *out = new pfd_session{};
    });
}

void pfd_session_destroy(pfd_session* session)
{
    delete session;
}

pfd_status pfd_session_load_params(pfd_session* session, const char* path)
{
    return guarded([&] {
        require(session, "session");
        require(path, "path");
        session->config.set_calibration(pfdsim::load_calibration(path));
    });
}

pfd_status pfd_session_set(pfd_session* session, const char* key, const char* value)
{
    return guarded([&] {
        require(session, "session");
        require(key, "key");
        require(value, "value");
        pfdsim::set_option(session->config, key, value);
    });
}

pfd_status pfd_session_run(pfd_session* session, const char* experiment, pfd_result** out)
{
    return guarded([&] {
        require(session, "session");
        require(experiment, "experiment");
        require(out, "out");
        *out = nullptr;
        *out = make_result(pfdsim::run_experiment(session->config, experiment));
    });
}

pfd_status pfd_session_export_netlist(const pfd_session* session, const char* path)
{
    return guarded([&] {
        require(session, "session");
        require(path, "path");
        const pfdsim::RunConfig& c = session->config;
        c.point.validate();
        pfdsim::PfdOptions o = pfdsim::pfd_options(c.settings.calibration, c.point.frequency, c.point.offset);
        o.width = c.point.width;
        o.length = c.point.length;
        o.corner = c.point.corner;
        const pfdsim::Netlist n = pfdsim::build_pfd(c.settings.calibration, o);
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f)
            throw pfdsim::IoError(std::string("cannot write '") + path + "'");
        pfdsim::write_netlist(f, n);
        if (!f.flush())
            throw pfdsim::IoError(std::string("write failed for '") + path + "'");
    });
}

pfd_status pfd_simulate_netlist(const pfd_session* session, const char* netlist_path, double t_stop, double dt,
                                pfd_result** out)
{
    return guarded([&] {
        require(session, "session");
        require(netlist_path, "netlist_path");
        require(out, "out");
        *out = nullptr;
        std::ifstream f(netlist_path);
        if (!f)
            throw pfdsim::IoError(std::string("cannot open netlist '") + netlist_path + "'");
        const pfdsim::Netlist n = pfdsim::read_netlist(f);
        pfdsim::SimOptions o = session->config.settings.solver;
        o.t_stop = t_stop;
        o.dt = dt;
        o.validate();
        pfdsim::RunOutput r;
        r.document.experiment = "netlist";
        r.waves = pfdsim::transient(n, o);
        r.plots.emplace_back("plot_waves.svg",
                             pfdsim::render_svg(pfdsim::waveform_chart(*r.waves, std::string("Netlist ") + netlist_path)));
        *out = make_result(std::move(r));
    });
}

pfd_status pfd_summarize(const pfd_session* session, const char* const* json_texts, size_t count, pfd_result** out)
{
    return guarded([&] {
        require(session, "session");
        require(out, "out");
        *out = nullptr;
        if (count > 0)
            require(json_texts, "json_texts");
        std::vector<std::string> texts;
        for (size_t i = 0; i < count; ++i) {
            require(json_texts[i], "json text");
            texts.emplace_back(json_texts[i]);
        }
        *out = make_result(pfdsim::summarize_documents(texts, session->config.settings.calibration.corners));
    });
}

void pfd_result_destroy(pfd_result* result)
{
    delete result;
}

const char* pfd_result_json(const pfd_result* result)
{
    return result ? result->json.c_str() : "";
}

const char* pfd_result_summary(const pfd_result* result)
{
    return result ? result->summary.c_str() : "";
}

int pfd_result_passed(const pfd_result* result)
{
    return result && result->output.document.passed() ? 1 : 0;
}

pfd_status pfd_result_write(const pfd_result* result, const char* dir, int plots)
{
    return guarded([&] {
        require(result, "result");
        require(dir, "dir");
        pfdsim::write_outputs(result->output, dir, plots != 0);
    });
}

size_t pfd_result_sample_count(const pfd_result* result)
{
    return result && result->output.waves ? result->output.waves->size() : 0;
}

size_t pfd_result_probe_count(const pfd_result* result)
{
    return result ? result->probes.size() : 0;
}

const char* pfd_result_probe_name(const pfd_result* result, size_t index)
{
    if (!result || index >= result->probes.size())
        return nullptr;
    return result->probes[index].c_str();
}

pfd_status pfd_result_probe(const pfd_result* result, const char* probe, const double** time, const double** value,
                            size_t* count)
{
    return guarded([&] {
        require(result, "result");
        require(probe, "probe");
        require(time, "time");
        require(value, "value");
        require(count, "count");
        const auto it = std::find(result->probes.begin(), result->probes.end(), probe);
        if (it == result->probes.end())
            throw pfdsim::InvalidArgument(std::string("unknown probe '") + probe + "'");
        const pfdsim::WaveformView w = result->probe_waves[static_cast<std::size_t>(it - result->probes.begin())];
        *time = w.time.data();
        *value = w.value.data();
        *count = w.time.size();
    });
}

} // extern "C"
