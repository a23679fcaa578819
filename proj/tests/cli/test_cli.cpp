#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(UNIMORPH_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("unimorph_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("missing config file is a config error") {
    CHECK(run("simulate -c /nonexistent/unimorph.conf") == 2);
}

TEST_CASE("unknown config key is a config error") {
    const fs::path dir = scratch("badkey");
    std::ofstream(dir / "bad.conf") << "[simulate]\nfrequency = 1\n";
    CHECK(run("simulate -c " + (dir / "bad.conf").string() + " --out-dir " + dir.string()) == 2);
}

TEST_CASE("bad command line is a config error") {
    CHECK(run("simulate --freq notanumber") == 2);
    CHECK(run("nosuchcommand") == 2);
}

TEST_CASE("load past the fracture threshold is a protocol violation") {
    const fs::path dir = scratch("overload");
    CHECK(run("simulate --load-mN 2.0 --out-dir " + dir.string()) == 3);
}

TEST_CASE("simulate writes a trace and a plot") {
    const fs::path dir = scratch("simulate");
    REQUIRE(run("simulate --duration-s 1 --out-dir " + dir.string()) == 0);
    const std::string csv = slurp(dir / "trace.csv");
    CHECK(csv.rfind("t,V,I,T,xi,delta\n", 0) == 0);
    CHECK(fs::exists(dir / "deflection.svg"));
}

TEST_CASE("identical config and seed give byte-identical output") {
    const fs::path a = scratch("det_a");
    const fs::path b = scratch("det_b");
    REQUIRE(run("crawl --freq-set 1,40 --seed 3 --out-dir " + a.string()) == 0);
    REQUIRE(run("crawl --freq-set 1,40 --seed 3 --threads 2 --out-dir " + b.string()) == 0);
    for (const char* f : {"crawl_summary.csv", "crawl_1hz.csv", "crawl_40hz.csv", "crawl_speed.svg"}) {
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK_FALSE(slurp(a / f).empty());
    }
}

TEST_CASE("oracle passes with the shipped config") {
    const fs::path dir = scratch("oracle");
    CHECK(run("oracle -c " UNIMORPH_SOURCE_DIR "/configs/bench.conf --duration-s 1 --out-dir " + dir.string()) == 0);
    CHECK(slurp(dir / "oracle.csv").rfind("freq_hz,duty_pct,max_divergence_pct,energy_residual_pct,pass\n", 0) == 0);
}

TEST_CASE("an impossible oracle tolerance is an oracle failure") {
    const fs::path dir = scratch("oracle_fail");
    CHECK(run("oracle --duration-s 1 --tolerance-pct 1e-15 --out-dir " + dir.string()) == 4);
}
