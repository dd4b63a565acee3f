// Analytic performance model for the streaming FFT engine and the
// all-to-all exchange: cycle-count timing for pencil passes, the
// bandwidth/hopcount network formula, flop conversions, and the search for
// balanced compute/network solution points.  Reference tables are embedded
// so every model value can be diffed against the published number it
// reproduces; rows the formula cannot reproduce carry an explicit flag and
// an override instead of a silent fudge.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "spme/cluster.hpp"

namespace spme::perf {

inline constexpr double kDefaultBandwidthBps = 78e9;  // preliminary link speed
inline constexpr double kNominalBandwidthBps = 100e9; // nameplate link speed
inline constexpr double kDefaultFmaxHz = 300e6;
inline constexpr int kLanesPerUnit = 8;
inline constexpr int kWireBitsPerSample = 64; // single-precision complex

struct FftSize {
    int nx = 0, ny = 0, nz = 0;
    std::int64_t points() const { return std::int64_t(nx) * ny * nz; }
    std::int64_t bits() const { return points() * kWireBitsPerSample; }
    std::string label() const; // e.g. "64x64x128"
};

// One full set of 1-D transforms along one axis: points/(8*units) cycles.
double fft_pass_time(const FftSize& size, int units, double fmax_hz = kDefaultFmaxHz);
double fft_pass_time(int n, int units, double fmax_hz = kDefaultFmaxHz); // cubic

// D * ((N-1)/N) * H / (B*N*L); zero for a single node.
double a2a_time(std::int64_t data_bits, int nodes, double hopcount, int links,
                double bandwidth_bps = kDefaultBandwidthBps);

// Flop convention for a complex cubic transform: 15 * n^3 * lg(n).
std::int64_t fft_flops(int n);
double gflops(std::int64_t flops, double seconds);

// Once-per-pass pipeline latencies (cycles).
struct LatencyConstants {
    int mem_fetch = 175; // quoted range 150-200
    int transpose = 134;
    int fft = 11;
    int per_pass() const { return mem_fetch + transpose + fft; }
};

// passes * (points/(8*units) [+ latency]) / fmax.  Pass counts in use:
// 2 = forward 3-D transform (fused XY pass + Z pass), 3 = BRAM forward or
// the fused forward+inverse long-range flow, 6 = unfused forward+inverse.
double pipeline_ideal_time(std::int64_t points, int units, double fmax_hz, int passes,
                           bool with_latency = false, LatencyConstants lat = {});

// Published (topology, node count) -> average hopcount / links-per-node
// pairs; the averages include the zero-length self path.  Throws
// std::invalid_argument for pairs outside the published set.
double hopcount(TopologyKind kind, int nodes);
int links_for(TopologyKind kind, int nodes);

// --- Embedded reference tables ---------------------------------------------

// Column sizes shared by the timing tables, in published order.
const std::array<FftSize, 5>& reference_sizes();

// Pass times (us) per size row and unit-count column at 300 MHz.
struct FftTimeRow {
    FftSize size;
    std::array<double, 8> ref_us;  // units 1,2,4,8,16,32,64,128
    std::array<int, 8> marker;     // 0 = none, else solution-point id 1..5
};
inline constexpr std::array<int, 8> kUnitCounts{1, 2, 4, 8, 16, 32, 64, 128};
const std::vector<FftTimeRow>& fft_time_reference();

// All-to-all times (us) per (nodes, topology) row and size column at 78 Gbps.
struct A2ARow {
    int nodes = 0;
    TopologyKind topo = TopologyKind::switched;
    double hopcount = 1.0;
    int links = 0;
    std::array<double, 5> ref_us{};
    std::array<int, 5> marker{};         // solution-point ids
    std::array<int, 5> links_override{}; // nonzero: effective links for that cell
};
const std::vector<A2ARow>& a2a_reference();
// Model value for one cell, honoring any per-cell links override.
double a2a_model_us(const A2ARow& row, int col, double bandwidth_bps = kDefaultBandwidthBps);

// Published single-board runtimes: measured and ideal, with compile fmax.
struct IdealRow {
    FftSize size;
    int units = 1;
    std::string config;       // pipeline layout, e.g. "16" or "2_1"
    double fmax_mhz = 0.0;
    double measured_us = 0.0;
    double ideal_us = 0.0;    // published ideal
    bool flagged = false;     // published ideal not reproduced by the model
};
// Forward-only in-chip runs (3 passes).
const std::vector<IdealRow>& bram_ideal_reference();
// Fused forward+inverse long-range runs (3 passes), boards_pipes configs.
const std::vector<IdealRow>& lr_ideal_reference();

// GFlops conversions of the in-chip runs (flops formula over measured time).
struct GflopsRow {
    FftSize size;
    std::string system;       // published row label
    double ref_gflops = 0.0;
    double measured_us = 0.0; // source timing; 0 when not published
};
const std::vector<GflopsRow>& gflops_reference();

// --- Balance search ---------------------------------------------------------

struct BalanceMatch {
    int units = 0;
    int nodes = 0;
    TopologyKind topo = TopologyKind::switched;
    double fft_us = 0.0;
    double a2a_us = 0.0;
    double mismatch = 0.0; // |fft - a2a| / max(fft, a2a)
    int marker = 0;        // nonzero when both sides carry the same id
};

// Pairs every unit count with every network row for `size` (default: the
// largest reference size, where the published solution points live) and
// keeps pairs whose compute and network times agree within `threshold`.
std::vector<BalanceMatch> balance_search(double threshold = 0.25,
                                         const FftSize* size = nullptr,
                                         double fmax_hz = kDefaultFmaxHz,
                                         double bandwidth_bps = kDefaultBandwidthBps);

// --- CSV emitters -----------------------------------------------------------

// All emit a header row; ref_us keeps the published single-decimal print,
// model_us carries three decimals, delta_us is model - ref at print scale.
std::string fft_table_csv(double fmax_hz = kDefaultFmaxHz);
std::string a2a_table_csv(double bandwidth_bps = kDefaultBandwidthBps);
std::string balance_csv(double threshold = 0.25, double fmax_hz = kDefaultFmaxHz,
                        double bandwidth_bps = kDefaultBandwidthBps);
std::string gflops_csv();

} // namespace spme::perf
