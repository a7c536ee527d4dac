#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "csfs/cli.hpp"
#include "csfs/io.hpp"

using namespace csfs;
using nlohmann::json;

namespace {

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv = {"csfs"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    return cli_main(int(argv.size()), argv.data());
}

// capture stdout produced by the CLI report
std::string run_capturing(const std::vector<std::string>& args, int& code) {
    std::fflush(stdout);
    std::string path = "cli_capture.tmp";
    FILE* saved = stdout;
    stdout = std::fopen(path.c_str(), "w");
    code = run(args);
    std::fflush(stdout);
    std::fclose(stdout);
    stdout = saved;
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::remove(path.c_str());
    return ss.str();
}

std::size_t count_lines(const std::string& path) {
    std::ifstream in(path);
    std::size_t n = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++n;
    return n;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("grid subcommand row counts match the cell counts") {
    int code;
    run_capturing({"grid", "--kind", "icosahedral", "--level", "4", "-o", "g.csv"}, code);
    CHECK(code == 0);
    CHECK(count_lines("g.csv") == 2562 + 1);  // header + rows
    std::ifstream in("g.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,y,z,area");
    std::remove("g.csv");
}

TEST_CASE("sum against the built-in direct reference") {
    int code;
    const std::string out = run_capturing(
        {"sum", "--method", "csfmm", "--kernel", "laplace", "--grid", "icosahedral:4",
         "--reference", "direct", "--report", "sum_report.json"},
        code);
    CHECK(code == 0);
    const json report = json::parse(slurp("sum_report.json"));
    CHECK(report["N"] == 2562);
    CHECK(report["relative_l2_error"].get<double>() < 1e-5);
    CHECK(report["timings"]["total"].get<double>() > 0.0);
    // phase times cover the total
    const auto& t = report["timings"];
    const double phases = t["tree_build"].get<double>() + t["upward"].get<double>() +
                          t["traversal"].get<double>() + t["downward"].get<double>();
    CHECK(phases >= 0.9 * t["total"].get<double>());
    std::remove("sum_report.json");
}

TEST_CASE("unknown kernel exits with E_KERNEL") {
    int code;
    run_capturing({"sum", "--kernel", "helmholtz", "--grid", "icosahedral:3"}, code);
    CHECK(code == exit_code_for("E_KERNEL"));
}

TEST_CASE("bad flags and bad configs use distinct exit codes") {
    int code;
    run_capturing({"sum", "--nonsense-flag", "1"}, code);
    CHECK(code == exit_code_for("E_FLAGS"));
    run_capturing({"sum", "--kernel", "laplace", "--grid", "icosahedral:3", "--mac", "1.5"}, code);
    CHECK(code == exit_code_for("E_CONFIG"));
    run_capturing({"grid", "--kind", "hexagonal", "--level", "3", "-o", "x.csv"}, code);
    CHECK(code == exit_code_for("E_CONFIG"));
    run_capturing({"sum", "--kernel", "laplace"}, code);  // neither --grid nor --particles
    CHECK(code == exit_code_for("E_FLAGS"));
}

TEST_CASE("malformed CSV input exits with E_CSV") {
    {
        std::ofstream bad("bad.csv");
        bad << "x,y,z,weight\n1,0,0\n";
    }
    int code;
    run_capturing({"sum", "--kernel", "laplace", "--particles", "bad.csv"}, code);
    CHECK(code == exit_code_for("E_CSV"));
    {
        std::ofstream bad("bad.csv");
        bad << "x,y,z,weight\n1,0,zero,1\n";
    }
    run_capturing({"sum", "--kernel", "laplace", "--particles", "bad.csv"}, code);
    CHECK(code == exit_code_for("E_CSV"));
    std::remove("bad.csv");
    run_capturing({"sum", "--kernel", "laplace", "--particles", "missing.csv"}, code);
    CHECK(code == exit_code_for("E_IO"));
}

TEST_CASE("particle CSV formats are auto-detected and round-trip") {
    {
        std::ofstream f("pts.csv");
        f << "x,y,z,weight\n1,0,0,2.5\n0,1,0,-1\n0,0,1,0.25\n";
    }
    const ParticleSet a = read_particles_csv("pts.csv");
    REQUIRE(a.size() == 3);
    CHECK(a.weights[0] == 2.5);
    {
        std::ofstream f("pts.csv");
        f << "lon,lat,area,value\n0,0,0.5,3\n90,0,0.5,1\n";
    }
    const ParticleSet b = read_particles_csv("pts.csv");
    REQUIRE(b.size() == 2);
    CHECK(b.positions[0].x == doctest::Approx(1.0));
    CHECK(b.positions[1].y == doctest::Approx(1.0));
    CHECK(b.weights[0] == doctest::Approx(1.5));  // value * area
    std::remove("pts.csv");
}

TEST_CASE("floats are written with 17 significant digits") {
    CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
    CHECK(format_double(2562.0) == "2562");
    const double pi = 3.14159265358979323846;
    CHECK(std::stod(format_double(pi)) == pi);  // round-trip exact
}

TEST_CASE("reference potentials can come from a CSV file") {
    int code;
    run_capturing({"sum", "--method", "direct", "--kernel", "laplace", "--grid", "icosahedral:2",
                   "-o", "ref.csv"},
                  code);
    REQUIRE(code == 0);
    run_capturing({"sum", "--method", "csfmm", "--kernel", "laplace", "--grid", "icosahedral:2",
                   "--reference", "ref.csv", "--report", "ref_report.json"},
                  code);
    CHECK(code == 0);
    const json report = json::parse(slurp("ref_report.json"));
    CHECK(report["relative_l2_error"].get<double>() < 1e-5);
    // row-count mismatch is a dimension error
    run_capturing({"sum", "--method", "csfmm", "--kernel", "laplace", "--grid", "icosahedral:3",
                   "--reference", "ref.csv"},
                  code);
    CHECK(code == exit_code_for("E_DIM"));
    std::remove("ref.csv");
    std::remove("ref_report.json");
}

TEST_CASE("solve reports the eigenfunction error") {
    int code;
    run_capturing({"solve", "--kernel", "biharmonic", "--grid", "icosahedral:3", "--report",
                   "solve.json", "-o", "phi.csv"},
                  code);
    CHECK(code == 0);
    const json report = json::parse(slurp("solve.json"));
    CHECK(report["relative_l2_error_vs_exact"].get<double>() < 5e-3);
    CHECK(report["mean_warning"] == false);
    CHECK(count_lines("phi.csv") == 642 + 1);
    std::remove("solve.json");
    std::remove("phi.csv");
}

TEST_CASE("serial runs are bitwise reproducible") {
    int code;
    for (const char* name : {"conv_a", "conv_b"}) {
        run_capturing({"convergence", "--kernel", "laplace", "--grid-kind", "icosahedral",
                       "--levels", "2,3", "--threads", "1", "--out-prefix", name},
                      code);
        CHECK(code == 0);
    }
    CHECK(slurp("conv_a.csv") == slurp("conv_b.csv"));
    CHECK(slurp("conv_a.csv").find("level,N,E_DS_EX,E_FS_EX,E_FS_DS") == 0);
    for (const char* f : {"conv_a.csv", "conv_a.json", "conv_b.csv", "conv_b.json"})
        std::remove(f);
}

TEST_CASE("convergence needs two levels unless sweeping degrees") {
    int code;
    run_capturing({"convergence", "--kernel", "laplace", "--levels", "3", "--out-prefix", "c1"},
                  code);
    CHECK(code == exit_code_for("E_CONFIG"));
    run_capturing({"convergence", "--kernel", "laplace", "--levels", "3", "--degrees", "2,4",
                   "--out-prefix", "c1"},
                  code);
    CHECK(code == 0);
    CHECK(slurp("c1.csv").find("degree,N,E_FS_DS") == 0);
    std::remove("c1.csv");
    std::remove("c1.json");
}

TEST_CASE("bench emits one row per method and level, no exponent for one level") {
    int code;
    run_capturing({"bench", "--kernel", "laplace", "--levels", "3", "--methods", "direct,csfmm",
                   "--out-prefix", "b1"},
                  code);
    CHECK(code == 0);
    CHECK(count_lines("b1.csv") == 2 + 1);
    const json report = json::parse(slurp("b1.json"));
    CHECK(report["exponents"].empty());
    std::remove("b1.csv");
    std::remove("b1.json");
}

TEST_CASE("bve subcommand runs and logs the vorticity error") {
    int code;
    run_capturing({"bve", "--grid", "icosahedral:2", "--initial", "rh", "--dt", "0.01", "--steps",
                   "2", "--report", "bve.json"},
                  code);
    CHECK(code == 0);
    const json report = json::parse(slurp("bve.json"));
    REQUIRE(report["E_zeta"].size() == 3);  // step 0, 1, 2
    CHECK(report["E_zeta"][0].get<double>() == 0.0);
    std::remove("bve.json");
    run_capturing({"bve", "--grid", "icosahedral:2", "--initial", "vortex-sheet"}, code);
    CHECK(code == exit_code_for("E_CONFIG"));
}

TEST_CASE("sal subcommand reports the norm ratio") {
    int code;
    run_capturing({"sal", "--grid", "icosahedral:3", "--degree", "2", "--report", "sal.json",
                   "-o", "sal.csv"},
                  code);
    CHECK(code == 0);
    const json report = json::parse(slurp("sal.json"));
    const double ratio = report["l2_norm_ratio"].get<double>();
    CHECK(ratio > 0.01);
    CHECK(ratio < 0.5);
    CHECK(count_lines("sal.csv") == 642 + 1);
    std::ifstream in("sal.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "lon,lat,area,value");
    std::remove("sal.json");
    std::remove("sal.csv");
    run_capturing({"sal", "--degree", "2"}, code);  // neither --ssh nor --grid
    CHECK(code == exit_code_for("E_FLAGS"));
}
