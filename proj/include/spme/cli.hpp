// Command implementations behind the `spme` executable.  Each command takes
// a plain options struct and writes human-readable lines to a stream so the
// test-suite can drive it in-process; the thin main() in tools/ only parses
// flags.  Exit status is 0 iff every requested check passed.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "spme/report.hpp"

namespace spme {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

struct FftVerifyOptions {
    int dims = 16;
    int nodes = 1;
    int pipes = 1;
    int threads = 1;
    std::uint64_t seed = 1;
    std::string report_path; // empty: no JSON report written
};
int cmd_fft_verify(const FftVerifyOptions& opt, std::ostream& out, std::ostream& err);

struct PmeRunOptions {
    std::string atom_file;   // mutually exclusive with random_atoms > 0
    int random_atoms = 0;
    std::uint64_t seed = 1;
    int dims = 32;
    double beta = 0.0; // <= 0: default rule
    double box = 1.0;  // cubic box edge length
    int nodes = 1;
    int pipes = 1;
    std::string topology = "switched";
    bool check = false; // compare against the direct reciprocal oracle
    int threads = 1;
    std::string out_path;    // forces + energy; empty: main stream
    std::string report_path; // empty: no JSON report written
};
int cmd_pme_run(const PmeRunOptions& opt, std::ostream& out, std::ostream& err);

struct PerfTableOptions {
    std::string which = "fft"; // fft | a2a | balance | gflops
    double bandwidth_gbps = 78.0;
    double fmax_mhz = 300.0;
    double threshold = 0.25; // balance mismatch ceiling
};
int cmd_perf_table(const PerfTableOptions& opt, std::ostream& out, std::ostream& err);

struct ScheduleOptions {
    int nodes = 4;
    std::int64_t bytes = 0;  // per-message payload annotation; 0 = omit
    bool multihop = false;   // append a packing report as '#' comment lines
    std::string topology = "switched";
};
int cmd_schedule(const ScheduleOptions& opt, std::ostream& out, std::ostream& err);

} // namespace spme
