#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spme/cli.hpp"
#include "spme/report.hpp"

using namespace spme;
namespace fs = std::filesystem;

namespace {

struct TempFile {
    fs::path path;
    explicit TempFile(const std::string& name)
        : path(fs::temp_directory_path() / ("spme_cli_" + name)) {}
    ~TempFile() {
        std::error_code ec;
        fs::remove(path, ec);
    }
    std::string str() const { return path.string(); }
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

struct ForcesFile {
    std::vector<std::array<double, 3>> forces;
    double energy = 0.0;
};

ForcesFile parse_forces(const fs::path& p) {
    ForcesFile ff;
    std::ifstream in(p.string());
    REQUIRE(bool(in));
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("energy ", 0) == 0) {
            ff.energy = std::stod(line.substr(7));
        } else if (!line.empty()) {
            std::istringstream ls(line);
            std::array<double, 3> f{};
            REQUIRE(bool(ls >> f[0] >> f[1] >> f[2]));
            ff.forces.push_back(f);
        }
    }
    return ff;
}

} // namespace

TEST_CASE("fft-verify happy path with a distributed run") {
    FftVerifyOptions opt;
    opt.dims = 16;
    opt.nodes = 2;
    TempFile report("fft_report.json");
    opt.report_path = report.str();
    std::ostringstream out, err;
    int rc = cmd_fft_verify(opt, out, err);
    CHECK(rc == kExitOk);
    CHECK(err.str().empty());
    const std::string text = out.str();
    CHECK(text.find("PASS direct-dft") != std::string::npos);
    CHECK(text.find("PASS round-trip") != std::string::npos);
    CHECK(text.find("bitwise-equal=yes") != std::string::npos);
    CHECK(text.find("messages=2") != std::string::npos);
    CHECK(text.find("result: PASS") != std::string::npos);

    RunReport rep = report_from_json(read_file(report.path));
    CHECK(rep.command == "fft-verify");
    CHECK(rep.metrics.count("direct_dft_rel") == 1);
    CHECK(std::isfinite(rep.metrics.at("direct_dft_rel")));
    CHECK(rep.metrics.at("messages") == 2.0);
    CHECK(!rep.stages.empty());
    CHECK(!rep.lines.empty());
}

TEST_CASE("fft-verify rejects bad requests") {
    std::ostringstream out, err;
    SUBCASE("non-power-of-two dims") {
        FftVerifyOptions opt;
        opt.dims = 12;
        CHECK(cmd_fft_verify(opt, out, err) == kExitUsage);
        CHECK(err.str().find("power of two") != std::string::npos);
    }
    SUBCASE("dims below the volume floor") {
        FftVerifyOptions opt;
        opt.dims = 4;
        CHECK(cmd_fft_verify(opt, out, err) == kExitUsage);
    }
    SUBCASE("non-power-of-two node count") {
        FftVerifyOptions opt;
        opt.nodes = 3;
        CHECK(cmd_fft_verify(opt, out, err) == kExitUsage);
        CHECK(err.str().find("power of two") != std::string::npos);
    }
    SUBCASE("workers exceeding the slab count") {
        FftVerifyOptions opt;
        opt.dims = 16;
        opt.nodes = 32;
        CHECK(cmd_fft_verify(opt, out, err) == kExitUsage);
    }
}

TEST_CASE("pme-run with the built-in random system and oracle check") {
    PmeRunOptions opt;
    opt.random_atoms = 32;
    opt.dims = 16;
    opt.check = true;
    TempFile report("pme_report.json");
    opt.report_path = report.str();
    std::ostringstream out, err;
    int rc = cmd_pme_run(opt, out, err);
    CHECK(rc == kExitOk);
    const std::string text = out.str();
    CHECK(text.find("energy=") != std::string::npos);
    CHECK(text.find("max-force=") != std::string::npos);
    CHECK(text.find("PASS check kmax=8") != std::string::npos);
    CHECK(text.find("result: PASS") != std::string::npos);

    RunReport rep = report_from_json(read_file(report.path));
    CHECK(rep.command == "pme-run");
    CHECK(rep.metrics.at("beta") == doctest::Approx(1.6).epsilon(1e-12));
    CHECK(rep.metrics.at("check_force_rel") < 1e-3);
    CHECK(std::isfinite(rep.metrics.at("energy")));
}

TEST_CASE("pme-run force file layout") {
    PmeRunOptions opt;
    opt.random_atoms = 16;
    opt.dims = 16;
    TempFile forces("forces.txt");
    opt.out_path = forces.str();
    std::ostringstream out, err;
    REQUIRE(cmd_pme_run(opt, out, err) == kExitOk);
    CHECK(out.str().find("wrote " + forces.str()) != std::string::npos);

    ForcesFile ff = parse_forces(forces.path);
    CHECK(ff.forces.size() == 16);
    for (const auto& f : ff.forces)
        for (double c : f) CHECK(std::isfinite(c));
    // The printed energy= line agrees with the file's full-precision value.
    const std::string text = out.str();
    auto pos = text.find("energy=");
    REQUIRE(pos != std::string::npos);
    double printed = std::stod(text.substr(pos + 7));
    CHECK(std::abs(printed - ff.energy) <= 1e-9 * std::abs(ff.energy));
}

TEST_CASE("pme-run distributed output matches single-node output") {
    TempFile single("forces_single.txt"), quad("forces_quad.txt");
    PmeRunOptions opt;
    opt.random_atoms = 32;
    opt.dims = 16;
    opt.out_path = single.str();
    std::ostringstream out1, err1;
    REQUIRE(cmd_pme_run(opt, out1, err1) == kExitOk);

    opt.nodes = 4;
    opt.out_path = quad.str();
    std::ostringstream out4, err4;
    REQUIRE(cmd_pme_run(opt, out4, err4) == kExitOk);
    CHECK(out4.str().find("boundary-atoms=") != std::string::npos);
    CHECK(out4.str().find("turn-messages=12/12") != std::string::npos);

    ForcesFile a = parse_forces(single.path);
    ForcesFile b = parse_forces(quad.path);
    REQUIRE(a.forces.size() == b.forces.size());
    CHECK(a.energy == b.energy); // gathered grids are bitwise equal
    double scale = 0.0;
    for (const auto& f : a.forces)
        scale = std::max(scale, std::sqrt(f[0] * f[0] + f[1] * f[1] + f[2] * f[2]));
    for (std::size_t i = 0; i < a.forces.size(); ++i)
        for (int d = 0; d < 3; ++d)
            CHECK(std::abs(a.forces[i][std::size_t(d)] - b.forces[i][std::size_t(d)]) <=
                  1e-12 * scale);
}

TEST_CASE("pme-run input validation") {
    std::ostringstream out, err;
    SUBCASE("no atom source") {
        PmeRunOptions opt;
        CHECK(cmd_pme_run(opt, out, err) == kExitUsage);
        CHECK(err.str().find("provide an atom file or --random-atoms") != std::string::npos);
    }
    SUBCASE("two atom sources") {
        PmeRunOptions opt;
        opt.atom_file = "whatever.txt";
        opt.random_atoms = 4;
        CHECK(cmd_pme_run(opt, out, err) == kExitUsage);
        CHECK(err.str().find("not both") != std::string::npos);
    }
    SUBCASE("file without atoms") {
        TempFile atoms("empty_atoms.txt");
        write_file(atoms.path, "# only a comment\n");
        PmeRunOptions opt;
        opt.atom_file = atoms.str();
        CHECK(cmd_pme_run(opt, out, err) == kExitUsage);
        CHECK(err.str().find("no atoms") != std::string::npos);
    }
    SUBCASE("malformed line is reported with its number") {
        TempFile atoms("bad_atoms.txt");
        write_file(atoms.path, "0.1 0.2 0.3 1.0\n0.4 0.5 oops 1.0\n");
        PmeRunOptions opt;
        opt.atom_file = atoms.str();
        CHECK(cmd_pme_run(opt, out, err) == kExitUsage);
        CHECK(err.str().find("line 2") != std::string::npos);
    }
    SUBCASE("unknown topology") {
        PmeRunOptions opt;
        opt.random_atoms = 4;
        opt.topology = "banyan";
        CHECK(cmd_pme_run(opt, out, err) == kExitUsage);
        CHECK(err.str().find("unknown topology") != std::string::npos);
    }
    SUBCASE("non-positive box") {
        PmeRunOptions opt;
        opt.random_atoms = 4;
        opt.box = 0.0;
        CHECK(cmd_pme_run(opt, out, err) == kExitUsage);
    }
    SUBCASE("dims not a power of two") {
        PmeRunOptions opt;
        opt.random_atoms = 4;
        opt.dims = 24;
        CHECK(cmd_pme_run(opt, out, err) == kExitUsage);
    }
}

TEST_CASE("pme-run atom file round trip") {
    TempFile atoms("atoms_ok.txt");
    write_file(atoms.path,
               "# two opposite charges\n"
               "0.30 0.40 0.50  1.0\n"
               "0.70 0.60 0.50 -1.0\n");
    PmeRunOptions opt;
    opt.atom_file = atoms.str();
    opt.dims = 16;
    std::ostringstream out, err;
    CHECK(cmd_pme_run(opt, out, err) == kExitOk);
    CHECK(out.str().find("pme-run atoms=2") != std::string::npos);
}

TEST_CASE("perf-table subcommand") {
    std::ostringstream err;
    SUBCASE("fft table") {
        PerfTableOptions opt;
        std::ostringstream out;
        CHECK(cmd_perf_table(opt, out, err) == kExitOk);
        CHECK(out.str().rfind("size,units,", 0) == 0);
    }
    SUBCASE("a2a table honors the bandwidth flag") {
        PerfTableOptions opt;
        opt.which = "a2a";
        std::ostringstream out;
        CHECK(cmd_perf_table(opt, out, err) == kExitOk);
        CHECK(out.str().rfind("nodes,topology,", 0) == 0);
        CHECK(out.str().find("107.546") != std::string::npos);

        PerfTableOptions fast = opt;
        fast.bandwidth_gbps = 156;
        std::ostringstream out2;
        CHECK(cmd_perf_table(fast, out2, err) == kExitOk);
        CHECK(out2.str().find("53.773") != std::string::npos);
    }
    SUBCASE("balance table honors the threshold flag") {
        PerfTableOptions opt;
        opt.which = "balance";
        std::ostringstream all, tight;
        CHECK(cmd_perf_table(opt, all, err) == kExitOk);
        CHECK(all.str().rfind("units,nodes,", 0) == 0);
        opt.threshold = 0.05;
        CHECK(cmd_perf_table(opt, tight, err) == kExitOk);
        auto count_lines = [](const std::string& s) {
            return std::count(s.begin(), s.end(), '\n');
        };
        CHECK(count_lines(tight.str()) < count_lines(all.str()));
    }
    SUBCASE("gflops table") {
        PerfTableOptions opt;
        opt.which = "gflops";
        std::ostringstream out;
        CHECK(cmd_perf_table(opt, out, err) == kExitOk);
        CHECK(out.str().rfind("size,system,", 0) == 0);
    }
    SUBCASE("unknown table") {
        PerfTableOptions opt;
        opt.which = "latency";
        std::ostringstream out, err2;
        CHECK(cmd_perf_table(opt, out, err2) == kExitUsage);
        CHECK(err2.str().find("unknown table") != std::string::npos);
    }
    SUBCASE("non-positive parameters") {
        PerfTableOptions opt;
        opt.fmax_mhz = 0.0;
        std::ostringstream out, err2;
        CHECK(cmd_perf_table(opt, out, err2) == kExitUsage);
    }
}

TEST_CASE("schedule subcommand") {
    std::ostringstream err;
    SUBCASE("single node has nothing to send") {
        ScheduleOptions opt;
        opt.nodes = 1;
        std::ostringstream out;
        CHECK(cmd_schedule(opt, out, err) == kExitOk);
        CHECK(out.str().empty());
    }
    SUBCASE("four nodes, three rounds") {
        ScheduleOptions opt;
        std::ostringstream out;
        CHECK(cmd_schedule(opt, out, err) == kExitOk);
        const std::string text = out.str();
        CHECK(text.rfind("round 1: 0->1, 1->2, 2->3, 3->0\n", 0) == 0);
        CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    }
    SUBCASE("message sizes") {
        ScheduleOptions opt;
        opt.bytes = 2048;
        std::ostringstream out;
        CHECK(cmd_schedule(opt, out, err) == kExitOk);
        CHECK(out.str().find("0->1[2048]") != std::string::npos);
    }
    SUBCASE("multihop packing report") {
        ScheduleOptions opt;
        opt.nodes = 8;
        opt.multihop = true;
        opt.topology = "hypercube";
        std::ostringstream out;
        CHECK(cmd_schedule(opt, out, err) == kExitOk);
        CHECK(out.str().find("# multihop hypercube nodes=8") != std::string::npos);
    }
    SUBCASE("bad multihop topology") {
        ScheduleOptions opt;
        opt.multihop = true;
        opt.topology = "ring";
        std::ostringstream out, err2;
        CHECK(cmd_schedule(opt, out, err2) == kExitUsage);
        CHECK(err2.str().find("unknown topology") != std::string::npos);
    }
    SUBCASE("bad node count") {
        ScheduleOptions opt;
        opt.nodes = 0;
        std::ostringstream out, err2;
        CHECK(cmd_schedule(opt, out, err2) == kExitUsage);
    }
}

TEST_CASE("run report serialization") {
    RunReport rep;
    rep.command = "fft-verify";
    rep.config = {{"dims", "16"}, {"note", "quotes \" and backslash \\ survive"}};
    rep.stages = {{"fft-forward", 0.001}, {"direct-dft", 0.5}};
    rep.metrics = {{"direct_dft_rel", 1.25e-12}, {"messages", 2.0}};
    rep.lines = {"result: PASS"};
    RunReport back = report_from_json(rep.to_json());
    CHECK(back == rep);

    RunReport bad = rep;
    bad.metrics["direct_dft_rel"] = std::nan("");
    CHECK_THROWS(bad.validate());
    CHECK_THROWS(bad.to_json());
}
