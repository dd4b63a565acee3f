#include "spme/cli.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

#include "spme/cluster.hpp"
#include "spme/fft.hpp"
#include "spme/perf.hpp"
#include "spme/pme.hpp"
#include "spme/volume.hpp"

namespace spme {

namespace {

constexpr double kFftTol = 1e-10;   // direct-DFT and round-trip ceilings
constexpr double kCheckTol = 1e-3;  // pipeline-vs-oracle ceilings

struct StageClock {
    std::chrono::steady_clock::time_point last = std::chrono::steady_clock::now();
    double lap() {
        auto now = std::chrono::steady_clock::now();
        double s = std::chrono::duration<double>(now - last).count();
        last = now;
        return s;
    }
};

std::string fmt(const char* f, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Volume3D random_volume(int n, std::uint64_t seed) {
    Volume3D v(n, n, n);
    std::mt19937_64 rng(seed);
    auto unit = [&] { return double(rng() >> 11) * 0x1.0p-53; };
    for (cplx& c : v.data) {
        double re = 2.0 * unit() - 1.0;
        double im = 2.0 * unit() - 1.0;
        c = cplx(re, im);
    }
    return v;
}

// Plain quadratic-time transforms, independent of the radix-2 engine: the
// 3-D forward DFT as three separable direct 1-D sums.
std::vector<cplx> direct_dft_1d(const std::vector<cplx>& in) {
    const int n = int(in.size());
    const double pi = std::acos(-1.0);
    std::vector<cplx> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        cplx acc(0.0, 0.0);
        for (int j = 0; j < n; ++j)
            acc += in[size_t(j)] *
                   std::polar(1.0, -2.0 * pi * double(j) * double(k) / double(n));
        out[size_t(k)] = acc;
    }
    return out;
}

void direct_pass(Volume3D& v, Axis axis) {
    const int n = axis == Axis::X ? v.nx : axis == Axis::Y ? v.ny : v.nz;
    std::vector<cplx> pencil(static_cast<std::size_t>(n));
    auto cell = [&](int i, int a, int b) -> cplx& {
        switch (axis) {
            case Axis::X: return v.at(i, a, b);
            case Axis::Y: return v.at(a, i, b);
            default: return v.at(a, b, i);
        }
    };
    const int ea = axis == Axis::X ? v.ny : v.nx;
    const int eb = axis == Axis::Z ? v.ny : v.nz;
    for (int b = 0; b < eb; ++b)
        for (int a = 0; a < ea; ++a) {
            for (int i = 0; i < n; ++i) pencil[size_t(i)] = cell(i, a, b);
            std::vector<cplx> t = direct_dft_1d(pencil);
            for (int i = 0; i < n; ++i) cell(i, a, b) = t[size_t(i)];
        }
}

Volume3D direct_forward_3d(Volume3D v) {
    direct_pass(v, Axis::X);
    direct_pass(v, Axis::Y);
    direct_pass(v, Axis::Z);
    return v;
}

double max_mag(const Volume3D& v) {
    double m = 0.0;
    for (const cplx& c : v.data) m = std::max(m, std::abs(c));
    return m;
}

double rel_error(const Volume3D& got, const Volume3D& want) {
    double scale = max_mag(want);
    if (scale == 0.0) return max_abs_diff(got, want);
    return max_abs_diff(got, want) / scale;
}

int write_report(const RunReport& report, const std::string& path, std::ostream& err) {
    if (path.empty()) return kExitOk;
    std::ofstream f(path);
    if (!f) {
        err << "error: cannot write report file '" << path << "'\n";
        return kExitUsage;
    }
    f << report.to_json() << '\n';
    return kExitOk;
}

void emit(RunReport& report, std::ostream& out, const std::string& line) {
    report.lines.push_back(line);
    out << line << '\n';
}

void write_forces_text(std::ostream& os, const PipelineResult& result) {
    char buf[160];
    for (const auto& f : result.forces.f) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", f[0], f[1], f[2]);
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "energy %.17g\n", result.energy);
    os << buf;
}

} // namespace

int cmd_fft_verify(const FftVerifyOptions& opt, std::ostream& out, std::ostream& err) {
    if (!is_pow2(opt.dims)) {
        err << "error: --dims must be a power of two (got " << opt.dims << ")\n";
        return kExitUsage;
    }
    ClusterConfig cfg;
    cfg.nodes = opt.nodes;
    cfg.pipes_per_node = opt.pipes;
    try {
        validate_extents(opt.dims, opt.dims, opt.dims);
        cfg.validate();
        cfg.validate_dims(opt.dims, opt.dims);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    RunReport report;
    report.command = "fft-verify";
    report.config = {{"dims", std::to_string(opt.dims)},
                     {"nodes", std::to_string(opt.nodes)},
                     {"pipes", std::to_string(opt.pipes)},
                     {"threads", std::to_string(opt.threads)},
                     {"seed", std::to_string(opt.seed)}};

    emit(report, out,
         "fft-verify dims=" + std::to_string(opt.dims) + " nodes=" +
             std::to_string(opt.nodes) + " pipes=" + std::to_string(opt.pipes) +
             " workers=" + std::to_string(cfg.workers()));

    StageClock clock;
    const Volume3D input = random_volume(opt.dims, opt.seed);

    Volume3D fast = input;
    fft_3d(fast, FftDirection::forward, FftScaling::inverse_over_n, opt.threads);
    report.stages.push_back({"fft-forward", clock.lap()});

    Volume3D direct = direct_forward_3d(input);
    report.stages.push_back({"direct-dft", clock.lap()});

    bool all_ok = true;
    double direct_rel = rel_error(fast, direct);
    bool ok = direct_rel <= kFftTol;
    all_ok = all_ok && ok;
    emit(report, out,
         std::string(ok ? "PASS" : "FAIL") + " direct-dft max-rel=" +
             fmt("%.3g", direct_rel) + " tol=" + fmt("%g", kFftTol));
    report.metrics["direct_dft_rel"] = direct_rel;

    Volume3D back = fast;
    fft_3d(back, FftDirection::inverse, FftScaling::inverse_over_n, opt.threads);
    report.stages.push_back({"fft-inverse", clock.lap()});
    double round_rel = rel_error(back, input);
    ok = round_rel <= kFftTol;
    all_ok = all_ok && ok;
    emit(report, out,
         std::string(ok ? "PASS" : "FAIL") + " round-trip max-rel=" +
             fmt("%.3g", round_rel) + " tol=" + fmt("%g", kFftTol));
    report.metrics["round_trip_rel"] = round_rel;

    CornerTurnStats stats;
    Volume3D dist = distributed_fft3d(input, cfg, FftDirection::forward,
                                      FftScaling::inverse_over_n, opt.threads, &stats);
    report.stages.push_back({"distributed", clock.lap()});
    ok = bit_equal(dist, fast);
    all_ok = all_ok && ok;
    emit(report, out,
         std::string(ok ? "PASS" : "FAIL") + " distributed bitwise-equal=" +
             (ok ? "yes" : "no") + " messages=" + std::to_string(stats.messages) +
             " offnode-samples=" + std::to_string(stats.offnode_samples));
    report.metrics["messages"] = double(stats.messages);
    report.metrics["offnode_samples"] = double(stats.offnode_samples);

    emit(report, out, std::string("result: ") + (all_ok ? "PASS" : "FAIL"));
    int rc = write_report(report, opt.report_path, err);
    if (rc != kExitOk) return rc;
    return all_ok ? kExitOk : kExitCheckFailed;
}

int cmd_pme_run(const PmeRunOptions& opt, std::ostream& out, std::ostream& err) {
    if (!opt.atom_file.empty() && opt.random_atoms > 0) {
        err << "error: give either an atom file or --random-atoms, not both\n";
        return kExitUsage;
    }
    AtomSet atoms;
    if (!opt.atom_file.empty()) {
        try {
            atoms = load_atoms(std::filesystem::path(opt.atom_file));
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return kExitUsage;
        }
    } else if (opt.random_atoms > 0) {
        atoms = random_neutral_atoms(opt.random_atoms, opt.seed);
    } else {
        err << "error: provide an atom file or --random-atoms\n";
        return kExitUsage;
    }
    if (atoms.count() == 0) {
        err << "error: no atoms\n";
        return kExitUsage;
    }

    ClusterConfig cfg;
    cfg.nodes = opt.nodes;
    cfg.pipes_per_node = opt.pipes;
    try {
        cfg.topology = parse_topology(opt.topology);
        validate_extents(opt.dims, opt.dims, opt.dims);
        cfg.validate();
        cfg.validate_dims(opt.dims, opt.dims);
        if (!(opt.box > 0.0)) throw std::invalid_argument("box edge must be positive");
        atoms.validate();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    const Box box{opt.box, opt.box, opt.box};
    const double beta =
        opt.beta > 0.0 ? opt.beta : default_beta(box, opt.dims, opt.dims, opt.dims);

    RunReport report;
    report.command = "pme-run";
    report.config = {{"atoms", opt.atom_file.empty() ? "random" : opt.atom_file},
                     {"count", std::to_string(atoms.count())},
                     {"dims", std::to_string(opt.dims)},
                     {"beta", fmt("%.12g", beta)},
                     {"box", fmt("%.12g", opt.box)},
                     {"nodes", std::to_string(opt.nodes)},
                     {"pipes", std::to_string(opt.pipes)},
                     {"topology", to_string(cfg.topology)},
                     {"threads", std::to_string(opt.threads)},
                     {"seed", std::to_string(opt.seed)}};

    emit(report, out,
         "pme-run atoms=" + std::to_string(atoms.count()) + " dims=" +
             std::to_string(opt.dims) + " beta=" + fmt("%.6g", beta) +
             " workers=" + std::to_string(cfg.workers()) + " topology=" +
             to_string(cfg.topology));

    StageClock clock;
    const GreensVolume greens = make_greens(opt.dims, opt.dims, opt.dims, box, beta);
    report.stages.push_back({"greens", clock.lap()});

    PipelineResult result;
    DistPipelineStats dstats;
    if (cfg.workers() == 1) {
        result = lr_pipeline(atoms, box, greens, opt.threads);
    } else {
        result = distributed_lr_pipeline(atoms, box, greens, cfg, opt.threads, &dstats);
    }
    report.stages.push_back({"pipeline", clock.lap()});

    std::array<double, 3> net = net_force(result.forces);
    double net_norm = std::sqrt(net[0] * net[0] + net[1] * net[1] + net[2] * net[2]);
    report.metrics["energy"] = result.energy;
    report.metrics["max_force"] = max_force_norm(result.forces);
    report.metrics["net_force_norm"] = net_norm;
    report.metrics["beta"] = beta;
    emit(report, out, "energy=" + fmt("%.12g", result.energy));
    emit(report, out,
         "max-force=" + fmt("%.6g", max_force_norm(result.forces)) +
             " net-force=" + fmt("%.3g", net_norm));
    if (cfg.workers() > 1) {
        emit(report, out,
             "boundary-atoms=" + std::to_string(dstats.boundary_atoms) +
                 " turn-messages=" + std::to_string(dstats.turn_forward.messages) +
                 "/" + std::to_string(dstats.turn_inverse.messages));
        report.metrics["boundary_atoms"] = double(dstats.boundary_atoms);
    }

    bool all_ok = true;
    if (opt.check) {
        const int kmax = opt.dims / 2;
        OracleResult oracle = direct_recip_oracle(atoms, box, beta, kmax);
        report.stages.push_back({"oracle", clock.lap()});
        double energy_rel = std::abs(result.energy - oracle.energy) /
                            std::max(std::abs(oracle.energy), 1e-300);
        double force_rel = max_rel_force_error(result.forces, oracle.forces);
        bool ok = energy_rel <= kCheckTol && force_rel <= kCheckTol;
        all_ok = ok;
        emit(report, out,
             std::string(ok ? "PASS" : "FAIL") + " check kmax=" + std::to_string(kmax) +
                 " energy-rel=" + fmt("%.3g", energy_rel) + " force-rel=" +
                 fmt("%.3g", force_rel) + " tol=" + fmt("%g", kCheckTol));
        report.metrics["check_energy_rel"] = energy_rel;
        report.metrics["check_force_rel"] = force_rel;
    }

    if (!opt.out_path.empty()) {
        std::ofstream f(opt.out_path);
        if (!f) {
            err << "error: cannot write output file '" << opt.out_path << "'\n";
            return kExitUsage;
        }
        write_forces_text(f, result);
        emit(report, out, "wrote " + opt.out_path);
    } else {
        write_forces_text(out, result);
    }
    report.stages.push_back({"write", clock.lap()});

    emit(report, out, std::string("result: ") + (all_ok ? "PASS" : "FAIL"));
    int rc = write_report(report, opt.report_path, err);
    if (rc != kExitOk) return rc;
    return all_ok ? kExitOk : kExitCheckFailed;
}

int cmd_perf_table(const PerfTableOptions& opt, std::ostream& out, std::ostream& err) {
    if (!(opt.bandwidth_gbps > 0.0) || !(opt.fmax_mhz > 0.0) || !(opt.threshold >= 0.0)) {
        err << "error: bandwidth, fmax, and threshold must be positive\n";
        return kExitUsage;
    }
    const double bandwidth = opt.bandwidth_gbps * 1e9;
    const double fmax = opt.fmax_mhz * 1e6;
    if (opt.which == "fft") {
        out << perf::fft_table_csv(fmax);
    } else if (opt.which == "a2a") {
        out << perf::a2a_table_csv(bandwidth);
    } else if (opt.which == "balance") {
        out << perf::balance_csv(opt.threshold, fmax, bandwidth);
    } else if (opt.which == "gflops") {
        out << perf::gflops_csv();
    } else {
        err << "error: unknown table '" << opt.which
            << "' (expected fft, a2a, balance, or gflops)\n";
        return kExitUsage;
    }
    return kExitOk;
}

int cmd_schedule(const ScheduleOptions& opt, std::ostream& out, std::ostream& err) {
    if (opt.nodes < 1) {
        err << "error: --nodes must be >= 1\n";
        return kExitUsage;
    }
    try {
        A2ASchedule sched = make_schedule(opt.nodes);
        sched.validate();
        out << schedule_to_text(sched, opt.bytes);
        if (opt.multihop) {
            TopologyKind kind = parse_topology(opt.topology);
            out << multihop_to_text(pack_multihop(sched, kind));
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitOk;
}

} // namespace spme
