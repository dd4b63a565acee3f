#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "spme/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Mesh-based long-range solver, simulated-cluster transforms, "
                 "and the analytic performance model"};
    app.require_subcommand(1);
    int rc = spme::kExitOk;

    spme::FftVerifyOptions fft;
    CLI::App* fft_cmd = app.add_subcommand(
        "fft-verify", "Check the 3-D transform against a direct DFT, a round "
                      "trip, and a distributed run");
    fft_cmd->add_option("--dims", fft.dims, "Cubic grid extent (power of two)")
        ->capture_default_str();
    fft_cmd->add_option("--nodes", fft.nodes, "Simulated node count")->capture_default_str();
    fft_cmd->add_option("--pipes", fft.pipes, "Pipelines per node")->capture_default_str();
    fft_cmd->add_option("--threads", fft.threads, "Host threads")->capture_default_str();
    fft_cmd->add_option("--seed", fft.seed, "Random volume seed")->capture_default_str();
    fft_cmd->add_option("--report", fft.report_path, "Write a JSON run report here");
    fft_cmd->callback([&] { rc = spme::cmd_fft_verify(fft, std::cout, std::cerr); });

    spme::PmeRunOptions pme;
    CLI::App* pme_cmd = app.add_subcommand(
        "pme-run", "Run the long-range pipeline on an atom set and write forces");
    pme_cmd->add_option("atoms", pme.atom_file, "Atom text file (x y z q per line)");
    pme_cmd->add_option("--random-atoms", pme.random_atoms,
                        "Generate this many random neutral atoms instead");
    pme_cmd->add_option("--seed", pme.seed, "Random system seed")->capture_default_str();
    pme_cmd->add_option("--dims", pme.dims, "Cubic grid extent (power of two)")
        ->capture_default_str();
    pme_cmd->add_option("--beta", pme.beta,
                        "Splitting parameter (default: mesh-coupled rule)");
    pme_cmd->add_option("--box", pme.box, "Cubic box edge length")->capture_default_str();
    pme_cmd->add_option("--nodes", pme.nodes, "Simulated node count")->capture_default_str();
    pme_cmd->add_option("--pipes", pme.pipes, "Pipelines per node")->capture_default_str();
    pme_cmd->add_option("--topology", pme.topology,
                        "ptop | torus2d | torus3d | hypercube | hypercubepp | switched")
        ->capture_default_str();
    pme_cmd->add_flag("--check", pme.check,
                      "Compare energy and forces against the direct reciprocal sum");
    pme_cmd->add_option("--threads", pme.threads, "Host threads")->capture_default_str();
    pme_cmd->add_option("--out", pme.out_path, "Write forces + energy to this file");
    pme_cmd->add_option("--report", pme.report_path, "Write a JSON run report here");
    pme_cmd->callback([&] { rc = spme::cmd_pme_run(pme, std::cout, std::cerr); });

    spme::PerfTableOptions perf;
    CLI::App* perf_cmd =
        app.add_subcommand("perf-table", "Emit a model-vs-reference CSV table");
    perf_cmd->add_option("--which", perf.which, "fft | a2a | balance | gflops")
        ->capture_default_str();
    perf_cmd->add_option("--bandwidth-gbps", perf.bandwidth_gbps, "Link bandwidth")
        ->capture_default_str();
    perf_cmd->add_option("--fmax-mhz", perf.fmax_mhz, "Pipeline clock")->capture_default_str();
    perf_cmd->add_option("--threshold", perf.threshold, "Balance mismatch ceiling")
        ->capture_default_str();
    perf_cmd->callback([&] { rc = spme::cmd_perf_table(perf, std::cout, std::cerr); });

    spme::ScheduleOptions sched;
    CLI::App* sched_cmd =
        app.add_subcommand("schedule", "Dump the round-robin all-to-all schedule");
    sched_cmd->add_option("--nodes", sched.nodes, "Node count")->capture_default_str();
    sched_cmd->add_option("--bytes", sched.bytes, "Per-message payload annotation")
        ->capture_default_str();
    sched_cmd->add_flag("--multihop", sched.multihop,
                        "Append a static multihop packing report");
    sched_cmd->add_option("--topology", sched.topology, "Topology for --multihop")
        ->capture_default_str();
    sched_cmd->callback([&] { rc = spme::cmd_schedule(sched, std::cout, std::cerr); });

    CLI11_PARSE(app, argc, argv);
    return rc;
}
