#include <pfdsim/pfdsim.h>

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Session {
    pfd_session* s = nullptr;
    Session() { REQUIRE(pfd_session_create(&s) == PFD_OK); }
    ~Session() { pfd_session_destroy(s); }
};

struct Result {
    pfd_result* r = nullptr;
    ~Result() { pfd_result_destroy(r); }
};

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const char* name)
{
    const fs::path p = fs::temp_directory_path() / "pfdsim_capi" / name;
    fs::remove_all(p);
    return p;
}

} // namespace

TEST_CASE("version and status names")
{
    CHECK(std::string(pfd_version()).size() > 0);
    CHECK(std::string(pfd_status_name(PFD_OK)) == "ok");
    CHECK(std::string(pfd_status_name(PFD_ERR_IO)).size() > 0);
}

TEST_CASE("null arguments are rejected")
{
    CHECK(pfd_session_create(nullptr) == PFD_ERR_INVALID_ARGUMENT);
    CHECK(pfd_session_set(nullptr, "width", "1e-7") == PFD_ERR_INVALID_ARGUMENT);
    Session s;
    CHECK(pfd_session_run(s.s, "transient", nullptr) == PFD_ERR_INVALID_ARGUMENT);
    CHECK(std::string(pfd_result_json(nullptr)).empty());
    pfd_result_destroy(nullptr);
    pfd_session_destroy(nullptr);
}

TEST_CASE("bad options report an error message")
{
    Session s;
    CHECK(pfd_session_set(s.s, "width", "wide") == PFD_ERR_INVALID_ARGUMENT);
    CHECK(std::string(pfd_last_error()).size() > 0);
    CHECK(pfd_session_set(s.s, "no_such_key", "1") == PFD_ERR_INVALID_ARGUMENT);
    CHECK(pfd_session_set(s.s, "corner", "QQ") == PFD_ERR_INVALID_ARGUMENT);
    CHECK(pfd_session_load_params(s.s, "/nonexistent/file.params") == PFD_ERR_IO);
    Result r;
    CHECK(pfd_session_run(s.s, "bogus", &r.r) == PFD_ERR_INVALID_ARGUMENT);
    CHECK(r.r == nullptr);
}

TEST_CASE("transient run through the C interface")
{
    Session s;
    REQUIRE(pfd_session_load_params(s.s, PFDSIM_DATA_DIR "/default.params") == PFD_OK);
    REQUIRE(pfd_session_set(s.s, "t_stop", "4e-9") == PFD_OK);
    Result r;
    REQUIRE(pfd_session_run(s.s, "transient", &r.r) == PFD_OK);
    CHECK(pfd_result_passed(r.r) == 1);
    const std::string json = pfd_result_json(r.r);
    CHECK(json.find("\"LeadA\"") != std::string::npos);
    CHECK(std::string(pfd_result_summary(r.r)).find("PASS") != std::string::npos);

    const size_t n = pfd_result_sample_count(r.r);
    CHECK(n > 1000);
    REQUIRE(pfd_result_probe_count(r.r) >= 4);
    bool have_up = false;
    for (size_t i = 0; i < pfd_result_probe_count(r.r); ++i)
        have_up = have_up || std::string(pfd_result_probe_name(r.r, i)) == "UP";
    CHECK(have_up);
    CHECK(pfd_result_probe_name(r.r, 1000) == nullptr);

    const double* t = nullptr;
    const double* v = nullptr;
    size_t count = 0;
    REQUIRE(pfd_result_probe(r.r, "UP", &t, &v, &count) == PFD_OK);
    CHECK(count == n);
    CHECK(t[0] == 0.0);
    CHECK(t[count - 1] == doctest::Approx(4e-9));
    double peak = 0.0;
    for (size_t i = 0; i < count; ++i)
        peak = v[i] > peak ? v[i] : peak;
    CHECK(peak > 1.0);
    CHECK(pfd_result_probe(r.r, "nope", &t, &v, &count) == PFD_ERR_INVALID_ARGUMENT);

    const fs::path dir = scratch("transient");
    REQUIRE(pfd_result_write(r.r, dir.c_str(), 1) == PFD_OK);
    CHECK(read_file(dir / "report.json") == json);
    CHECK(fs::exists(dir / "summary.txt"));
    CHECK(fs::exists(dir / "waves.csv"));
    CHECK(fs::exists(dir / "plot_waves.svg"));
}

TEST_CASE("search failures return no result")
{
    Session s;
    REQUIRE(pfd_session_set(s.s, "f_lo", "30e9") == PFD_OK);
    REQUIRE(pfd_session_set(s.s, "f_hi", "40e9") == PFD_OK);
    Result r;
    CHECK(pfd_session_run(s.s, "fmax", &r.r) == PFD_ERR_CHECK_FAILED);
    CHECK(r.r == nullptr);
    CHECK(std::string(pfd_last_error()).size() > 0);
}

TEST_CASE("netlist export and simulation")
{
    Session s;
    const fs::path dir = scratch("netlist");
    fs::create_directories(dir);
    const fs::path net = dir / "pfd.net";
    REQUIRE(pfd_session_export_netlist(s.s, net.c_str()) == PFD_OK);
    CHECK(read_file(net) == read_file(PFDSIM_DATA_DIR "/pfd_canonical.net"));

    Result r;
    REQUIRE(pfd_simulate_netlist(s.s, net.c_str(), 2e-9, 1e-12, &r.r) == PFD_OK);
    CHECK(pfd_result_sample_count(r.r) >= 2001);
    Result bad;
    CHECK(pfd_simulate_netlist(s.s, (dir / "missing.net").c_str(), 2e-9, 1e-12, &bad.r) == PFD_ERR_IO);
    CHECK(pfd_simulate_netlist(s.s, net.c_str(), -1.0, 1e-12, &bad.r) == PFD_ERR_INVALID_ARGUMENT);
}

TEST_CASE("summaries merge report documents")
{
    Session s;
    REQUIRE(pfd_session_set(s.s, "t_stop", "3e-9") == PFD_OK);
    Result a;
    REQUIRE(pfd_session_run(s.s, "transient", &a.r) == PFD_OK);
    const char* texts[] = {pfd_result_json(a.r), pfd_result_json(a.r)};
    Result m;
    REQUIRE(pfd_summarize(s.s, texts, 2, &m.r) == PFD_OK);
    CHECK(std::string(pfd_result_summary(m.r)).find("out of scope") != std::string::npos);
    const char* junk[] = {"{not json"};
    Result bad;
    CHECK(pfd_summarize(s.s, junk, 1, &bad.r) == PFD_ERR_INVALID_ARGUMENT);
}
