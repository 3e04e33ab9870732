// End-to-end checks of the carnot binary: exit codes, CSV/JSON payloads,
// config round trips, and agreement with direct library evaluation.  The
// binary path arrives in CARNOT_BIN (set by the test harness).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "carnot/asymptotics.hpp"
#include "carnot/kernel.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace carnot;
using doctest::Approx;

namespace {

struct RunResult {
    int rc = -1;
    std::string out;
};

// Runs the binary with the given arguments, capturing stdout; stderr is
// folded in when merge_stderr is set (for error-path checks).
RunResult run_cli(const std::string& args, bool merge_stderr = false) {
    const char* bin = std::getenv("CARNOT_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "CARNOT_BIN must point at the carnot binary");
    const std::string cmd =
        std::string(bin) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    size_t got = 0;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

const fs::path& tmp_dir() {
    static const fs::path dir = [] {
        std::string tmpl = (fs::temp_directory_path() / "carnot-cli-XXXXXX").string();
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        REQUIRE(mkdtemp(buf.data()) != nullptr);
        return fs::path(buf.data());
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Parses the kernel subcommand's "x,y,z,P,estErr" CSV payload.
std::vector<std::vector<double>> parse_kernel_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream is(text);
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "x,y,z,P,estErr");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) row.push_back(std::stod(tok));
        REQUIRE(row.size() == 5);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

TEST_CASE("help, usage errors, and validation exit codes") {
    RunResult help = run_cli("--help");
    CHECK(help.rc == 0);
    CHECK(help.out.find("groupcheck") != std::string::npos);
    CHECK(help.out.find("asymptotics") != std::string::npos);

    CHECK(run_cli("--no-such-flag", true).rc == 2);
    CHECK(run_cli("", true).rc == 2);  // no subcommand is a usage error
    CHECK(run_cli("kernel --t -1 --points 0,0,0", true).rc == 2);
    CHECK(run_cli("kernel --t 1 --points 0,0,0 --deriv 5", true).rc == 2);
    CHECK(run_cli("kernel --t 1", true).rc == 2);  // points are required
    CHECK(run_cli("moments", true).rc == 2);       // --f0 is required
    CHECK(run_cli("moments --f0 builtin:no_such_datum", true).rc == 2);
    CHECK(run_cli("convolve --f0 builtin:gaussian_bump --out-box R=2:2", true).rc == 2);
    RunResult bad = run_cli("kernel --t -1 --points 0,0,0", true);
    CHECK(bad.out.find("error:") != std::string::npos);
}

TEST_CASE("kernel subcommand matches direct library evaluation") {
    KernelSpec spec;
    RunResult r = run_cli("kernel --t 1 --points '1,0,0;0.5,0.3,0.2;0,0,0'");
    REQUIRE(r.rc == 0);
    auto rows = parse_kernel_csv(r.out);
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
        const KernelValue v = eval_kernel(spec, 1.0, GroupPoint({row[0], row[1], row[2]}));
        CHECK(row[3] == Approx(v.value).epsilon(1e-12));
        CHECK(row[4] > 0.0);
    }
    CHECK(rows[2][3] == Approx(1.0 / 16.0).epsilon(1e-8));

    // derivative route
    FrameCoefficients fr = left_invariant_frame(heisenberg());
    RunResult rd = run_cli("kernel --t 1 --points 0.5,0.3,0.2 --deriv 0");
    REQUIRE(rd.rc == 0);
    auto drows = parse_kernel_csv(rd.out);
    REQUIRE(drows.size() == 1);
    const double want =
        eval_kernel_derivative(spec, fr, 0, 1.0, GroupPoint({0.5, 0.3, 0.2})).value;
    CHECK(drows[0][3] == Approx(want).epsilon(1e-12));

    // euclidean kernel has a closed form
    RunResult re = run_cli("kernel --kernel euclidean --t 2 --points 0.3,-0.2,0.5");
    REQUIRE(re.rc == 0);
    auto erows = parse_kernel_csv(re.out);
    REQUIRE(erows.size() == 1);
    const double r2 = 0.09 + 0.04 + 0.25;
    CHECK(erows[0][3] ==
          Approx(std::pow(8.0 * M_PI, -1.5) * std::exp(-r2 / 8.0)).epsilon(1e-12));
}

TEST_CASE("kernel subcommand reads point files and writes csv files") {
    const fs::path pts = tmp_dir() / "points.csv";
    {
        std::ofstream out(pts);
        out << "x,y,z\n# a comment row\n1,0,0\n0.5,0.3,0.2\n";
    }
    const fs::path csv = tmp_dir() / "kernel_out.csv";
    RunResult rf =
        run_cli("kernel --t 1 --points " + pts.string() + " --csv " + csv.string());
    REQUIRE(rf.rc == 0);
    RunResult ri = run_cli("kernel --t 1 --points '1,0,0;0.5,0.3,0.2'");
    REQUIRE(ri.rc == 0);
    CHECK(slurp(csv) == ri.out);  // file payload identical to the stdout route
}

TEST_CASE("groupcheck json is deterministic and reports passing suites") {
    const fs::path j1 = tmp_dir() / "gc1.json";
    const fs::path j2 = tmp_dir() / "gc2.json";
    CHECK(run_cli("groupcheck --seed 4242 --json " + j1.string()).rc == 0);
    CHECK(run_cli("groupcheck --seed 4242 --json " + j2.string()).rc == 0);
    const std::string b1 = slurp(j1);
    CHECK(b1 == slurp(j2));  // same seed, byte-identical report

    const json rep = json::parse(b1);
    CHECK(rep["algebra"] == "heisenberg");
    CHECK(rep["seed"] == 4242);
    CHECK(rep["passed"] == true);
    REQUIRE(rep["suites"].is_array());
    CHECK(rep["suites"].size() >= 3);
    for (const auto& s : rep["suites"]) {
        CHECK(s["passed"] == true);
        CHECK(s["failures"] == 0);
        CHECK(s["trials"].get<int>() > 0);
        CHECK(s["max_err"].get<double>() <= s["tol"].get<double>());
    }

    CHECK(run_cli("groupcheck --algebra euclidean:4 --seed 9 --trials 60").rc == 0);
}

TEST_CASE("moments subcommand reports mass and first-layer moments") {
    RunResult rg = run_cli("moments --f0 'builtin:gaussian_bump(h=0.25)'");
    REQUIRE(rg.rc == 0);
    const json jg = json::parse(rg.out);
    CHECK(jg["a0"].get<double>() == Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(jg["a1"].get<double>()) <= 1e-10);
    CHECK(std::abs(jg["a2"].get<double>()) <= 1e-10);
    // only the first layer carries moment entries
    CHECK_FALSE(jg.contains("a3"));

    RunResult rs = run_cli("moments --f0 'builtin:shifted_bump(h=0.25)'");
    REQUIRE(rs.rc == 0);
    const json js = json::parse(rs.out);
    CHECK(js["a0"].get<double>() == Approx(1.0).epsilon(1e-9));
    CHECK(js["a1"].get<double>() > 0.1);   // center sits at positive x
    CHECK(js["a2"].get<double>() < -0.05); // and negative y
}

TEST_CASE("config emission round trips through --config") {
    const fs::path cfg1 = tmp_dir() / "run1.toml";
    const fs::path cfg2 = tmp_dir() / "run2.toml";
    RunResult r1 = run_cli("--emit-config " + cfg1.string() +
                           " groupcheck --seed 77 --trials 5");
    REQUIRE(r1.rc == 0);
    RunResult r2 = run_cli("--config " + cfg1.string() + " --emit-config " +
                           cfg2.string() + " groupcheck");
    REQUIRE(r2.rc == 0);
    // the config file carried seed and trials into the second run
    const json rep2 = json::parse(r2.out);
    CHECK(rep2["seed"] == 77);
    CHECK(r2.out == r1.out);
    // and re-emitting the effective options reproduces the file
    CHECK(slurp(cfg1) == slurp(cfg2));
}

TEST_CASE("convolve subcommand writes a grid csv the library can read back") {
    const fs::path csv = tmp_dir() / "heat.csv";
    RunResult r = run_cli("convolve --f0 'builtin:gaussian_bump(h=0.4)' --t 1"
                          " --out-box R=3:3 res=9 --csv " +
                          csv.string());
    REQUIRE(r.rc == 0);
    const json summary = json::parse(r.out);
    CHECK(summary["t"] == 1.0);
    CHECK(summary["mass"].get<double>() > 0.2);
    CHECK(summary["mass"].get<double>() < 1.0);
    CHECK(summary["est_abs_err"].get<double>() > 0.0);
    CHECK(summary["est_abs_err"].get<double>() < 1e-4);

    std::ifstream in(csv);
    REQUIRE(in.good());
    const GridFunction g = read_grid_csv(in, heisenberg());
    CHECK(g.geom.shape == std::vector<int>{9, 9, 9});

    // spot-check stored values against the direct point solver
    GridFunction f0 = builtin_datum("gaussian_bump", {{"h", 0.4}});
    KernelSpec spec;
    std::vector<GroupPoint> nodes;
    std::vector<size_t> flats = {0, 364, 400, 728};  // corners and center
    for (size_t flat : flats) nodes.push_back(g.node(flat));
    ConvolveResult direct = solve_cauchy(f0, spec, 1.0, nodes);
    for (size_t k = 0; k < flats.size(); ++k)
        CHECK(std::abs(g.values[flats[k]] - direct.values[k]) <=
              1e-15 + 1e-10 * std::abs(direct.values[k]));
}

TEST_CASE("decompose subcommand writes field grids and a residual report") {
    const fs::path dir = tmp_dir() / "fields";
    const fs::path rep = tmp_dir() / "decomp.json";
    RunResult r = run_cli("decompose --f0 'builtin:gaussian_bump(h=0.25)' --order 1"
                          " --radial-nodes 32 --outdir " +
                          dir.string() + " --max-residual 0.05 --json " + rep.string());
    REQUIRE(r.rc == 0);
    const json j = json::parse(slurp(rep));
    CHECK(j["order"] == 1);
    CHECK(j["pass"] == true);
    CHECK(j["residual"].get<double>() > 0.0);
    CHECK(j["residual"].get<double>() <= 0.05);
    REQUIRE(j["files"].is_array());
    // heisenberg order 1: six pair fields (i <= j) plus one vertical single
    CHECK(j["files"].size() == 7);
    for (const auto& nm : j["files"]) {
        const fs::path p = dir / nm.get<std::string>();
        REQUIRE(fs::exists(p));
        std::ifstream in(p);
        const GridFunction g = read_grid_csv(in, heisenberg());
        CHECK(g.values.size() == g.geom.node_count());
    }

    // an unreachable residual bound flips pass and the exit code
    RunResult tight = run_cli("decompose --f0 'builtin:gaussian_bump(h=0.4)'"
                              " --order 0 --radial-nodes 24 --max-residual 1e-12",
                              true);
    CHECK(tight.rc == 1);
}

TEST_CASE("asymptotics subcommand fits decay rates and flags degenerate fits") {
    // euclidean data: off-center gaussian written as a grid csv
    StratifiedAlgebra alg = euclidean(2);
    GridGeometry gg;
    gg.origin = {0.8 - 2.4, -0.5 - 2.4};
    gg.spacing = {0.12, 0.12};
    gg.shape = {41, 41};
    GridFunction f0 = sample_on_grid(alg, gg, [](const GroupPoint& x) {
        const double u = x[0] - 0.8, v = x[1] + 0.5;
        return std::exp(-(u * u + v * v) / 0.36);
    });
    const fs::path f0csv = tmp_dir() / "e2_datum.csv";
    {
        std::ofstream out(f0csv);
        write_grid_csv(out, f0);
    }
    const fs::path rep = tmp_dir() / "decay.json";
    RunResult r = run_cli("asymptotics --f0 " + f0csv.string() +
                          " --algebra euclidean:2 --kernel euclidean"
                          " --times 1:4:5 --radii 6 --res 17 --order 0 --q inf"
                          " --json " +
                          rep.string());
    REQUIRE(r.rc == 0);
    const json j = json::parse(slurp(rep));
    CHECK(j["predicted"] == Approx(-1.5).epsilon(1e-12));
    CHECK(j["fitted_slope"].get<double>() == Approx(-1.497).epsilon(0.02));
    CHECK(j["pass"] == true);
    CHECK(j["q"] == "inf");
    CHECK(j["order"] == 0);
    REQUIRE(j["times"].size() == 5);
    CHECK(j["times"][4] == 256.0);
    REQUIRE(j["residual_norms"].size() == 5);
    for (size_t k = 1; k < 5; ++k)
        CHECK(j["residual_norms"][k].get<double>() <
              j["residual_norms"][k - 1].get<double>());

    // four times spanning less than two decades of residual: degenerate fit
    RunResult deg = run_cli("asymptotics --f0 " + f0csv.string() +
                            " --algebra euclidean:2 --kernel euclidean"
                            " --times 1:2:4 --radii 6 --res 17 --order 0 --q inf",
                            true);
    CHECK(deg.rc == 3);
    CHECK(deg.out.find("error:") != std::string::npos);
}
