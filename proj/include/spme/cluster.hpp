// Deterministic simulation of the multi-node pipeline: Z-slab decomposition
// across simulated workers, per-worker pencil transforms, all-to-all corner
// turns driven by a round-robin schedule, and exact accounting of the bits
// each turn moves between nodes.  No real networking is involved; workers
// exchange fragments through in-memory copies at round barriers, so results
// are identical regardless of execution interleaving.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spme/bitperm.hpp"
#include "spme/fft.hpp"
#include "spme/pme.hpp"
#include "spme/volume.hpp"

namespace spme {

enum class TopologyKind { ptop, torus2d, torus3d, hypercube, hypercubepp, switched };

std::string to_string(TopologyKind kind);
TopologyKind parse_topology(std::string_view name); // throws on unknown name

struct ClusterConfig {
    int nodes = 1;          // power of two >= 1
    int pipes_per_node = 1; // >= 1; pipes multiply the slab count
    TopologyKind topology = TopologyKind::switched;

    int workers() const { return nodes * pipes_per_node; }
    // Worker -> node map: contiguous blocks of pipes per node.
    int node_of(int worker) const { return worker / pipes_per_node; }
    void validate() const;
    // Slab divisibility: workers() must divide both nz and ny.
    void validate_dims(int ny, int nz) const;
};

// Round-robin all-to-all: N-1 rounds, round with shift i pairing every
// source n with destination (n+i) mod N.  Each round is a perfect matching
// and over all rounds every ordered pair appears exactly once.
struct A2ASchedule {
    int nodes = 1;
    std::vector<std::vector<std::pair<int, int>>> rounds; // rounds[i-1]: shift i

    void validate() const; // matching + exactly-once coverage
};

A2ASchedule make_schedule(int nodes);

// One line per round: `round i: src->dst, src->dst, ...`; with
// bytes_per_message > 0 each pair is printed as `src->dst[bytes]`.
std::string schedule_to_text(const A2ASchedule& sched,
                             std::int64_t bytes_per_message = 0);

// Wire accounting for one corner turn.  Samples cross the wire in the
// 64-bit single-precision complex format regardless of the f64 math.
struct CornerTurnStats {
    static constexpr int wire_bits_per_sample = 64;
    int nodes = 1;
    int workers = 1;
    std::int64_t total_samples = 0;    // whole volume, repartitioned
    std::int64_t offnode_samples = 0;  // fraction (N-1)/N of the total
    std::int64_t offnode_bits = 0;     // offnode_samples * wire bits
    std::int64_t messages = 0;         // worker->other-worker fragments
    std::int64_t local_fragments = 0;  // same node (pipe loopback or self)
};

// A volume partitioned into contiguous slabs along Z or Y, one per worker.
struct SlabSet {
    Axis axis = Axis::Z;        // slab normal: Z or Y
    int nx = 0, ny = 0, nz = 0; // global extents
    int planes_per_worker = 0;
    std::vector<Volume3D> slabs;

    int workers() const { return int(slabs.size()); }
};

SlabSet scatter_slabs(const Volume3D& vol, Axis axis, int workers);
Volume3D gather_slabs(const SlabSet& set);

// Re-partitions Z-slabs into Y-slabs (or back), exchanging equal-size
// fragments between every worker pair: local fragments first, then the
// schedule's rounds in order.  Global content is unchanged.
SlabSet corner_turn(const SlabSet& in, const ClusterConfig& cfg,
                    const A2ASchedule& sched, CornerTurnStats* stats = nullptr);

// Distributed transform: scatter -> per-worker X,Y pencil passes -> corner
// turn -> per-worker Z pass -> gather (forward); the inverse runs Z first
// on Y-slabs, turns, then Y and X.  Output is bitwise identical to fft_3d
// on the same input for every worker count.
Volume3D distributed_fft3d(const Volume3D& vol, const ClusterConfig& cfg,
                           FftDirection direction = FftDirection::forward,
                           FftScaling scaling = FftScaling::inverse_over_n,
                           int threads = 1, CornerTurnStats* stats = nullptr);

struct DistPipelineStats {
    int workers = 1;
    std::int64_t boundary_atoms = 0; // supports straddling a slab boundary
    CornerTurnStats turn_forward;    // Z-slabs -> Y-slabs
    CornerTurnStats turn_inverse;    // Y-slabs -> Z-slabs
};

// Full distributed long-range pipeline.  Charge spreading masks each
// atom's 4x4x4 deposit to the worker's owned Z rows (atoms touching
// several slabs are processed by each affected worker), the influence
// multiply happens on Y-slabs, and force interpolation sums the per-worker
// partial forces in ascending worker order.  Forces match the single-node
// pipeline within 1e-9 relative; grids match it bitwise.
PipelineResult distributed_lr_pipeline(const AtomSet& atoms, const Box& box,
                                       const GreensVolume& greens,
                                       const ClusterConfig& cfg, int threads = 1,
                                       DistPipelineStats* stats = nullptr);

// Static multihop packing report for the mesh-like topologies: every
// schedule message is routed along a deterministic shortest path and
// first-fit packed into time slots so no directed link is used twice in
// one slot.  Reporting only; no timing model consumes this.
struct MultihopReport {
    TopologyKind topology = TopologyKind::switched;
    int nodes = 1;
    int slots = 0;            // time slots after packing
    int directed_links = 0;   // edges in the routing graph
    int max_link_slots = 0;   // busiest link's occupied slot count
    double mean_path_hops = 0.0;
};

MultihopReport pack_multihop(const A2ASchedule& sched, TopologyKind kind);
std::string multihop_to_text(const MultihopReport& rep);

} // namespace spme
