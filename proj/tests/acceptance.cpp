// Acceptance gate: one generously-budgeted end-to-end check per shipping
// claim, each printed as a single [PASS]/[FAIL] line with the measured
// value and the tolerance it was held to.  Exit code is the number of
// failed criteria, so CI can gate on this binary alone.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "spme/cluster.hpp"
#include "spme/fft.hpp"
#include "spme/perf.hpp"
#include "spme/pme.hpp"
#include "spme/volume.hpp"

#include "naive_dft.hpp"

using namespace spme;

namespace {

// Pinned acceptance tolerances.
constexpr double kTolDft = 1e-10;      // fast transform vs direct DFT
constexpr double kTolOracle = 1e-3;    // mesh pipeline vs reciprocal oracle
constexpr double kTolGradient = 1e-5;  // analytic force vs numerical gradient
constexpr double kTolTableUs = 0.05;   // model vs published cell, half-ulp of print
constexpr double kTolGflops = 0.05;    // model vs published GFlops, relative
// Wall budgets for the numerical criteria (seconds).
constexpr double kBudgetC1 = 10.0;
constexpr double kBudgetC2 = 30.0;
constexpr double kBudgetC3 = 60.0;

struct Outcome {
    bool ok = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

int g_failures = 0;

template <typename Fn>
void criterion(int id, const char* name, double budget_s, Fn&& fn) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o.ok = false;
        o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                      .count();
    bool in_budget = budget_s <= 0.0 || secs < budget_s;
    bool ok = o.ok && in_budget;
    if (!ok) ++g_failures;
    std::string budget_note =
        budget_s > 0.0 ? fmt(", budget %.0fs", budget_s) + (in_budget ? "" : " EXCEEDED")
                       : std::string();
    std::printf("[%s] C%d %s: %s [%.2fs%s]\n", ok ? "PASS" : "FAIL", id, name,
                o.detail.c_str(), secs, budget_note.c_str());
}

double wrap01(double x) { return x - std::floor(x); }

} // namespace

int main() {
    criterion(1, "transform-vs-direct-dft", kBudgetC1, [] {
        double worst = 0.0, worst_round = 0.0;
        for (int n : {8, 16}) {
            Volume3D vol = testutil::random_volume(n, n, n, std::uint64_t(100 + n));
            Volume3D fast = vol;
            fft_3d(fast, FftDirection::forward, FftScaling::none);
            worst = std::max(worst, testutil::rel_err(fast, testutil::naive_dft3d(vol)));
            Volume3D back = fast;
            fft_3d(back, FftDirection::inverse, FftScaling::inverse_over_n);
            worst_round = std::max(worst_round, testutil::rel_err(back, vol));
        }
        Outcome o;
        o.ok = worst <= kTolDft && worst_round <= kTolDft;
        o.detail = "max-rel=" + fmt("%.3g", worst) + " round-trip=" +
                   fmt("%.3g", worst_round) + " (tol " + fmt("%g", kTolDft) + ")";
        return o;
    });

    criterion(2, "distributed-bitwise-equality", kBudgetC2, [] {
        int checked = 0;
        bool all = true;
        for (int dims : {16, 32}) {
            Volume3D vol = testutil::random_volume(dims, dims, dims, std::uint64_t(dims));
            Volume3D fwd_ref = vol;
            fft_3d(fwd_ref, FftDirection::forward, FftScaling::none);
            Volume3D inv_ref = fwd_ref;
            fft_3d(inv_ref, FftDirection::inverse, FftScaling::inverse_over_n);
            for (int nodes : {1, 2, 4, 8}) {
                ClusterConfig cfg;
                cfg.nodes = nodes;
                Volume3D fwd = distributed_fft3d(vol, cfg, FftDirection::forward,
                                                 FftScaling::none);
                Volume3D inv = distributed_fft3d(fwd, cfg, FftDirection::inverse,
                                                 FftScaling::inverse_over_n);
                all = all && bit_equal(fwd, fwd_ref) && bit_equal(inv, inv_ref);
                checked += 2;
            }
        }
        Outcome o;
        o.ok = all && checked == 16;
        o.detail = std::string("bitwise-equal=") + (all ? "yes" : "NO") + " over " +
                   std::to_string(checked) + " transforms (nodes 1,2,4,8 x 16^3,32^3)";
        return o;
    });

    criterion(3, "mesh-pipeline-vs-oracle", kBudgetC3, [] {
        // Accuracy at the default splitting parameter on a 32^3 mesh.
        AtomSet atoms = random_neutral_atoms(64, 1);
        Box box{};
        double beta = default_beta(box, 32, 32, 32);
        GreensVolume g32 = make_greens(32, 32, 32, box, beta);
        PipelineResult mesh = lr_pipeline(atoms, box, g32);
        OracleResult exact = direct_recip_oracle(atoms, box, beta, 16);
        double force_rel = max_rel_force_error(mesh.forces, exact.forces);
        double energy_rel = std::abs(mesh.energy - exact.energy) / std::abs(exact.energy);

        // Mesh refinement at fixed splitting parameter strictly reduces the
        // force error on an independent random system.
        AtomSet probe = random_neutral_atoms(32, 2);
        double beta_fixed = default_beta(box, 16, 16, 16);
        OracleResult probe_exact = direct_recip_oracle(probe, box, beta_fixed, 16);
        double err16 = max_rel_force_error(
            lr_pipeline(probe, box, make_greens(16, 16, 16, box, beta_fixed)).forces,
            probe_exact.forces);
        double err32 = max_rel_force_error(
            lr_pipeline(probe, box, make_greens(32, 32, 32, box, beta_fixed)).forces,
            probe_exact.forces);

        Outcome o;
        o.ok = force_rel <= kTolOracle && energy_rel <= kTolOracle && err32 < err16;
        o.detail = "force-rel=" + fmt("%.3g", force_rel) + " energy-rel=" +
                   fmt("%.3g", energy_rel) + " (tol " + fmt("%g", kTolOracle) +
                   "); refinement " + fmt("%.3g", err16) + " -> " + fmt("%.3g", err32) +
                   (err32 < err16 ? " strictly-decreasing" : " NOT-DECREASING");
        return o;
    });

    criterion(4, "force-equals-negative-gradient", 0.0, [] {
        const int n = 32;
        AtomSet atoms = random_neutral_atoms(10, 23);
        Box box{};
        GreensVolume greens = make_greens(n, n, n, box, default_beta(box, n, n, n));
        PipelineResult r = lr_pipeline(atoms, box, greens);
        double fscale = max_force_norm(r.forces);
        const double h = 1e-5;
        double worst = 0.0;
        for (int a = 0; a < atoms.count(); ++a)
            for (int d = 0; d < 3; ++d) {
                AtomSet plus = atoms, minus = atoms;
                plus.positions[std::size_t(a)][std::size_t(d)] =
                    wrap01(plus.positions[std::size_t(a)][std::size_t(d)] + h);
                minus.positions[std::size_t(a)][std::size_t(d)] =
                    wrap01(minus.positions[std::size_t(a)][std::size_t(d)] - h);
                double fd = -(lr_pipeline(plus, box, greens).energy -
                              lr_pipeline(minus, box, greens).energy) /
                            (2.0 * h);
                worst = std::max(
                    worst,
                    std::abs(r.forces.f[std::size_t(a)][std::size_t(d)] - fd) / fscale);
            }
        Outcome o;
        o.ok = worst <= kTolGradient;
        o.detail = "max-rel=" + fmt("%.3g", worst) + " over 30 components (tol " +
                   fmt("%g", kTolGradient) + ")";
        return o;
    });

    criterion(5, "pass-time-table", 0.0, [] {
        int cells = 0;
        double worst = 0.0;
        for (const auto& row : perf::fft_time_reference())
            for (std::size_t c = 0; c < perf::kUnitCounts.size(); ++c) {
                double model_us =
                    perf::fft_pass_time(row.size, perf::kUnitCounts[c]) * 1e6;
                worst = std::max(worst, std::abs(model_us - row.ref_us[c]));
                ++cells;
            }
        Outcome o;
        o.ok = cells == 40 && worst <= kTolTableUs;
        o.detail = std::to_string(cells) + " cells, worst-delta=" + fmt("%.3f", worst) +
                   "us (tol " + fmt("%g", kTolTableUs) + "us)";
        return o;
    });

    criterion(6, "exchange-time-table", 0.0, [] {
        int cells = 0;
        double worst = 0.0;
        for (const auto& row : perf::a2a_reference())
            for (int c = 0; c < 5; ++c) {
                worst = std::max(
                    worst, std::abs(perf::a2a_model_us(row, c) - row.ref_us[std::size_t(c)]));
                ++cells;
            }
        bool flag_present =
            perf::a2a_table_csv().find("links-override=6") != std::string::npos;
        Outcome o;
        o.ok = cells == 95 && worst <= kTolTableUs && flag_present;
        o.detail = std::to_string(cells) + " cells, worst-delta=" + fmt("%.3f", worst) +
                   "us (tol " + fmt("%g", kTolTableUs) + "us), inconsistent cell " +
                   (flag_present ? "flagged" : "NOT FLAGGED");
        return o;
    });

    criterion(7, "gflops-conversion", 0.0, [] {
        double worst = 0.0;
        int checked = 0;
        for (const auto& row : perf::gflops_reference()) {
            if (row.measured_us <= 0.0) continue;
            double model =
                perf::gflops(perf::fft_flops(row.size.nx), row.measured_us * 1e-6);
            worst = std::max(worst, std::abs(model - row.ref_gflops) / row.ref_gflops);
            ++checked;
        }
        Outcome o;
        o.ok = checked == 2 && worst <= kTolGflops;
        o.detail = std::to_string(checked) + " rows, worst-rel=" + fmt("%.3g", worst) +
                   " (tol " + fmt("%g", kTolGflops) + ")";
        return o;
    });

    criterion(8, "balance-solution-points", 0.0, [] {
        std::set<int> ids;
        double worst = 0.0;
        auto matches = perf::balance_search();
        for (const auto& m : matches) {
            if (m.marker != 0) ids.insert(m.marker);
            worst = std::max(worst, m.mismatch);
        }
        Outcome o;
        o.ok = ids == std::set<int>{1, 2, 3, 4, 5} && worst <= 0.25;
        o.detail = "markers recovered=" + std::to_string(ids.size()) + "/5 across " +
                   std::to_string(matches.size()) + " matches, worst-mismatch=" +
                   fmt("%.1f", worst * 100.0) + "% (threshold 25%)";
        return o;
    });

    criterion(9, "exchange-schedules", 0.0, [] {
        bool all = true;
        int checked = 0;
        for (int n = 1; n <= 64; ++n) {
            A2ASchedule sched = make_schedule(n);
            sched.validate();
            // Independent re-check: every round a perfect matching, every
            // ordered pair exactly once.
            std::set<std::pair<int, int>> seen;
            for (const auto& round : sched.rounds) {
                std::set<int> srcs, dsts;
                all = all && int(round.size()) == n;
                for (auto [s, d] : round) {
                    all = all && s != d && srcs.insert(s).second && dsts.insert(d).second;
                    all = all && seen.insert({s, d}).second;
                }
            }
            all = all && std::int64_t(seen.size()) == std::int64_t(n) * (n - 1);
            ++checked;
        }
        Outcome o;
        o.ok = all && checked == 64;
        o.detail = std::string("nodes 1..64 ") +
                   (all ? "all perfect matchings, each ordered pair exactly once"
                        : "VIOLATION FOUND");
        return o;
    });

    criterion(10, "scope", 0.0, [] {
        Outcome o;
        o.ok = true;
        o.detail =
            "published end-to-end and single-board runtimes (e.g. 206us for a "
            "65536-atom step) are hardware measurements outside desk-scale "
            "reproduction; this build reproduces their analytic ideal "
            "counterparts (C5-C8) and validates the mesh numerics against "
            "exact oracles (C1-C4)";
        return o;
    });

    if (g_failures == 0) std::printf("acceptance: all 10 criteria passed\n");
    else std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return g_failures;
}
