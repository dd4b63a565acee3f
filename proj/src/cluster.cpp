#include "spme/cluster.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "spme/exec.hpp"
#include "spme/spline.hpp"

namespace spme {

std::string to_string(TopologyKind kind) {
    switch (kind) {
        case TopologyKind::ptop: return "ptop";
        case TopologyKind::torus2d: return "torus2d";
        case TopologyKind::torus3d: return "torus3d";
        case TopologyKind::hypercube: return "hypercube";
        case TopologyKind::hypercubepp: return "hypercubepp";
        case TopologyKind::switched: return "switched";
    }
    return "?";
}

TopologyKind parse_topology(std::string_view name) {
    for (TopologyKind k : {TopologyKind::ptop, TopologyKind::torus2d,
                           TopologyKind::torus3d, TopologyKind::hypercube,
                           TopologyKind::hypercubepp, TopologyKind::switched})
        if (name == to_string(k)) return k;
    throw std::invalid_argument("unknown topology: " + std::string(name));
}

void ClusterConfig::validate() const {
    if (nodes < 1 || !is_pow2(unsigned(nodes)))
        throw std::invalid_argument("cluster nodes must be a power of two >= 1, got " +
                                    std::to_string(nodes));
    if (pipes_per_node < 1)
        throw std::invalid_argument("pipes_per_node must be >= 1, got " +
                                    std::to_string(pipes_per_node));
}

void ClusterConfig::validate_dims(int ny, int nz) const {
    validate();
    int p = workers();
    if (nz % p != 0 || ny % p != 0)
        throw std::invalid_argument("worker count " + std::to_string(p) +
                                    " must divide both nz=" + std::to_string(nz) +
                                    " and ny=" + std::to_string(ny));
}

A2ASchedule make_schedule(int nodes) {
    if (nodes < 1) throw std::invalid_argument("make_schedule: nodes must be >= 1");
    A2ASchedule sched;
    sched.nodes = nodes;
    for (int shift = 1; shift < nodes; ++shift) {
        std::vector<std::pair<int, int>> round;
        round.reserve(size_t(nodes));
        for (int n = 0; n < nodes; ++n) round.emplace_back(n, (n + shift) % nodes);
        sched.rounds.push_back(std::move(round));
    }
    return sched;
}

void A2ASchedule::validate() const {
    if (nodes < 1) throw std::invalid_argument("schedule: nodes must be >= 1");
    std::set<std::pair<int, int>> seen;
    for (size_t r = 0; r < rounds.size(); ++r) {
        std::set<int> srcs, dsts;
        for (auto [s, d] : rounds[r]) {
            if (s < 0 || s >= nodes || d < 0 || d >= nodes || s == d)
                throw std::invalid_argument("schedule: invalid pair in round " +
                                            std::to_string(r + 1));
            if (!srcs.insert(s).second || !dsts.insert(d).second)
                throw std::invalid_argument("schedule: round " + std::to_string(r + 1) +
                                            " is not a matching");
            if (!seen.insert({s, d}).second)
                throw std::invalid_argument("schedule: duplicate pair " +
                                            std::to_string(s) + "->" + std::to_string(d));
        }
    }
    if (std::int64_t(seen.size()) != std::int64_t(nodes) * (nodes - 1))
        throw std::invalid_argument("schedule: does not cover every ordered pair");
}

std::string schedule_to_text(const A2ASchedule& sched, std::int64_t bytes_per_message) {
    std::ostringstream out;
    for (size_t r = 0; r < sched.rounds.size(); ++r) {
        out << "round " << (r + 1) << ":";
        bool first = true;
        for (auto [s, d] : sched.rounds[r]) {
            out << (first ? " " : ", ") << s << "->" << d;
            if (bytes_per_message > 0) out << '[' << bytes_per_message << ']';
            first = false;
        }
        out << '\n';
    }
    return out.str();
}

SlabSet scatter_slabs(const Volume3D& vol, Axis axis, int workers) {
    if (axis == Axis::X) throw std::invalid_argument("scatter_slabs: slabs are along Z or Y");
    if (workers < 1) throw std::invalid_argument("scatter_slabs: workers must be >= 1");
    int extent = axis == Axis::Z ? vol.nz : vol.ny;
    if (extent % workers != 0)
        throw std::invalid_argument("scatter_slabs: workers must divide the slab axis");
    SlabSet set;
    set.axis = axis;
    set.nx = vol.nx;
    set.ny = vol.ny;
    set.nz = vol.nz;
    set.planes_per_worker = extent / workers;
    int pp = set.planes_per_worker;
    for (int w = 0; w < workers; ++w) {
        if (axis == Axis::Z) {
            Volume3D slab(vol.nx, vol.ny, pp);
            std::memcpy(slab.data.data(), vol.data.data() + slab.size() * size_t(w),
                        slab.size() * sizeof(cplx));
            set.slabs.push_back(std::move(slab));
        } else {
            Volume3D slab(vol.nx, pp, vol.nz);
            for (int z = 0; z < vol.nz; ++z)
                for (int yl = 0; yl < pp; ++yl)
                    std::memcpy(&slab.at(0, yl, z), &vol.at(0, w * pp + yl, z),
                                size_t(vol.nx) * sizeof(cplx));
            set.slabs.push_back(std::move(slab));
        }
    }
    return set;
}

Volume3D gather_slabs(const SlabSet& set) {
    Volume3D vol(set.nx, set.ny, set.nz);
    int pp = set.planes_per_worker;
    for (int w = 0; w < set.workers(); ++w) {
        const Volume3D& slab = set.slabs[size_t(w)];
        if (set.axis == Axis::Z) {
            std::memcpy(vol.data.data() + slab.size() * size_t(w), slab.data.data(),
                        slab.size() * sizeof(cplx));
        } else {
            for (int z = 0; z < set.nz; ++z)
                for (int yl = 0; yl < pp; ++yl)
                    std::memcpy(&vol.at(0, w * pp + yl, z), &slab.at(0, yl, z),
                                size_t(set.nx) * sizeof(cplx));
        }
    }
    return vol;
}

namespace {

// Moves one worker-pair fragment between a Z-slab and a Y-slab (either
// direction); fragments are nx * yp * zp samples for every pair.
void copy_fragment(const SlabSet& in, SlabSet& out, int ws, int wd, int yp, int zp) {
    if (in.axis == Axis::Z) {
        const Volume3D& src = in.slabs[size_t(ws)]; // (nx, ny, zp)
        Volume3D& dst = out.slabs[size_t(wd)];      // (nx, yp, nz)
        for (int zl = 0; zl < zp; ++zl)
            for (int yl = 0; yl < yp; ++yl)
                std::memcpy(&dst.at(0, yl, ws * zp + zl), &src.at(0, wd * yp + yl, zl),
                            size_t(in.nx) * sizeof(cplx));
    } else {
        const Volume3D& src = in.slabs[size_t(ws)]; // (nx, yp, nz)
        Volume3D& dst = out.slabs[size_t(wd)];      // (nx, ny, zp)
        for (int zl = 0; zl < zp; ++zl)
            for (int yl = 0; yl < yp; ++yl)
                std::memcpy(&dst.at(0, ws * yp + yl, zl), &src.at(0, yl, wd * zp + zl),
                            size_t(in.nx) * sizeof(cplx));
    }
}

} // namespace

SlabSet corner_turn(const SlabSet& in, const ClusterConfig& cfg,
                    const A2ASchedule& sched, CornerTurnStats* stats) {
    cfg.validate_dims(in.ny, in.nz);
    if (in.axis == Axis::X) throw std::invalid_argument("corner_turn: slabs are along Z or Y");
    int p = cfg.workers();
    if (in.workers() != p)
        throw std::invalid_argument("corner_turn: slab set has " +
                                    std::to_string(in.workers()) + " workers, config has " +
                                    std::to_string(p));
    if (sched.nodes != cfg.nodes)
        throw std::invalid_argument("corner_turn: schedule/config node mismatch");
    for (const Volume3D& s : in.slabs)
        if (!s.same_dims(in.slabs[0]))
            throw std::invalid_argument("corner_turn: inconsistent slab shapes");
    int yp = in.ny / p;
    int zp = in.nz / p;
    SlabSet out;
    out.axis = in.axis == Axis::Z ? Axis::Y : Axis::Z;
    out.nx = in.nx;
    out.ny = in.ny;
    out.nz = in.nz;
    out.planes_per_worker = out.axis == Axis::Y ? yp : zp;
    for (int w = 0; w < p; ++w)
        out.slabs.emplace_back(out.axis == Axis::Y ? Volume3D(in.nx, yp, in.nz)
                                                   : Volume3D(in.nx, in.ny, zp));
    CornerTurnStats st;
    st.nodes = cfg.nodes;
    st.workers = p;
    st.total_samples = std::int64_t(in.nx) * in.ny * in.nz;
    std::int64_t fragment = std::int64_t(in.nx) * yp * zp;
    // Fragments that stay on a node move outside the wire schedule.
    for (int ws = 0; ws < p; ++ws)
        for (int wd = 0; wd < p; ++wd)
            if (cfg.node_of(ws) == cfg.node_of(wd)) {
                copy_fragment(in, out, ws, wd, yp, zp);
                ++st.local_fragments;
            }
    // Off-node fragments follow the round-robin rounds in order.
    for (const auto& round : sched.rounds)
        for (auto [n, m] : round)
            for (int ws = n * cfg.pipes_per_node; ws < (n + 1) * cfg.pipes_per_node; ++ws)
                for (int wd = m * cfg.pipes_per_node; wd < (m + 1) * cfg.pipes_per_node; ++wd) {
                    copy_fragment(in, out, ws, wd, yp, zp);
                    ++st.messages;
                    st.offnode_samples += fragment;
                }
    st.offnode_bits = st.offnode_samples * CornerTurnStats::wire_bits_per_sample;
    if (stats) *stats = st;
    return out;
}

namespace {

void worker_pencil_pass(SlabSet& set, Axis axis, const FftPlan& plan, int threads) {
    parallel_for(set.workers(), threads, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t w = begin; w < end; ++w)
            fft_pencils(set.slabs[size_t(w)], axis, plan, 1);
    });
}

} // namespace

Volume3D distributed_fft3d(const Volume3D& vol, const ClusterConfig& cfg,
                           FftDirection direction, FftScaling scaling, int threads,
                           CornerTurnStats* stats) {
    validate_extents(vol.nx, vol.ny, vol.nz);
    cfg.validate_dims(vol.ny, vol.nz);
    A2ASchedule sched = make_schedule(cfg.nodes);
    FftPlan px(vol.nx, direction, std::min(8, vol.nx), scaling);
    FftPlan py(vol.ny, direction, std::min(8, vol.ny), scaling);
    FftPlan pz(vol.nz, direction, std::min(8, vol.nz), scaling);
    if (direction == FftDirection::forward) {
        SlabSet zset = scatter_slabs(vol, Axis::Z, cfg.workers());
        worker_pencil_pass(zset, Axis::X, px, threads);
        worker_pencil_pass(zset, Axis::Y, py, threads);
        SlabSet yset = corner_turn(zset, cfg, sched, stats);
        worker_pencil_pass(yset, Axis::Z, pz, threads);
        return gather_slabs(yset);
    }
    SlabSet yset = scatter_slabs(vol, Axis::Y, cfg.workers());
    worker_pencil_pass(yset, Axis::Z, pz, threads);
    SlabSet zset = corner_turn(yset, cfg, sched, stats);
    worker_pencil_pass(zset, Axis::Y, py, threads);
    worker_pencil_pass(zset, Axis::X, px, threads);
    return gather_slabs(zset);
}

namespace {

// Charge deposits masked to one worker's owned Z rows.  Every worker scans
// the full atom stream in input order, so each grid cell accumulates its
// deposits in exactly the single-node order and the gathered grid is
// bitwise identical to single-node spreading.
void spread_masked(const AtomSet& atoms, int nx, int ny, int nz, int z0, int z1,
                   Volume3D& slab) {
    for (int a = 0; a < atoms.count(); ++a) {
        const auto& pos = atoms.positions[size_t(a)];
        double q = atoms.charges[size_t(a)];
        SplineWeights sw = spline_weights(pos[0], pos[1], pos[2], nx, ny, nz, 1.0, 1.0, 1.0);
        for (int k = 0; k < 4; ++k) {
            int gz = sw.base[2] + k;
            if (gz >= nz) gz -= nz;
            if (gz < z0 || gz >= z1) continue;
            for (int j = 0; j < 4; ++j) {
                int gy = sw.base[1] + j;
                if (gy >= ny) gy -= ny;
                double qyz = q * sw.sy.w[size_t(j)] * sw.sz.w[size_t(k)];
                for (int i = 0; i < 4; ++i) {
                    int gx = sw.base[0] + i;
                    if (gx >= nx) gx -= nx;
                    slab.at(gx, gy, gz - z0) += qyz * sw.sx.w[size_t(i)];
                }
            }
        }
    }
}

// Force partials over one worker's owned Z rows; the ijk loop shape matches
// single-node interpolation so interior atoms reproduce it bitwise.
void interpolate_masked(const RealVolume3D& phi, const AtomSet& atoms, const Box& box,
                        int z0, int z1, std::vector<std::array<double, 3>>& partial) {
    double sx = double(phi.nx) / box.lx;
    double sy = double(phi.ny) / box.ly;
    double sz = double(phi.nz) / box.lz;
    for (int a = 0; a < atoms.count(); ++a) {
        const auto& p = atoms.positions[size_t(a)];
        SplineWeights sw =
            spline_weights(p[0], p[1], p[2], phi.nx, phi.ny, phi.nz, 1.0, 1.0, 1.0);
        double gx = 0.0, gy = 0.0, gz = 0.0;
        for (int k = 0; k < 4; ++k) {
            int iz = sw.base[2] + k;
            if (iz >= phi.nz) iz -= phi.nz;
            if (iz < z0 || iz >= z1) continue;
            for (int j = 0; j < 4; ++j) {
                int iy = sw.base[1] + j;
                if (iy >= phi.ny) iy -= phi.ny;
                double wyz = sw.sy.w[size_t(j)] * sw.sz.w[size_t(k)];
                double dyz = sw.sy.dw[size_t(j)] * sw.sz.w[size_t(k)];
                double wdz = sw.sy.w[size_t(j)] * sw.sz.dw[size_t(k)];
                for (int i = 0; i < 4; ++i) {
                    int ix = sw.base[0] + i;
                    if (ix >= phi.nx) ix -= phi.nx;
                    double v = phi.at(ix, iy, iz);
                    gx += v * sw.sx.dw[size_t(i)] * wyz;
                    gy += v * sw.sx.w[size_t(i)] * dyz;
                    gz += v * sw.sx.w[size_t(i)] * wdz;
                }
            }
        }
        double q = atoms.charges[size_t(a)];
        partial[size_t(a)] = {-q * gx * sx, -q * gy * sy, -q * gz * sz};
    }
}

} // namespace

PipelineResult distributed_lr_pipeline(const AtomSet& atoms, const Box& box,
                                       const GreensVolume& greens,
                                       const ClusterConfig& cfg, int threads,
                                       DistPipelineStats* stats) {
    atoms.validate();
    validate_extents(greens.nx, greens.ny, greens.nz);
    cfg.validate_dims(greens.ny, greens.nz);
    int nx = greens.nx, ny = greens.ny, nz = greens.nz;
    int p = cfg.workers();
    int zp = nz / p;
    int yp = ny / p;
    A2ASchedule sched = make_schedule(cfg.nodes);

    DistPipelineStats st;
    st.workers = p;
    for (int a = 0; a < atoms.count(); ++a) {
        const auto& pos = atoms.positions[size_t(a)];
        SplineWeights sw = spline_weights(pos[0], pos[1], pos[2], nx, ny, nz, 1.0, 1.0, 1.0);
        std::set<int> owners;
        for (int k = 0; k < 4; ++k) {
            int gz = sw.base[2] + k;
            if (gz >= nz) gz -= nz;
            owners.insert(gz / zp);
        }
        if (owners.size() > 1) ++st.boundary_atoms;
    }

    // Spread, masked per worker; the gathered grid is bitwise identical to
    // single-node spread_charges.
    SlabSet zset;
    zset.axis = Axis::Z;
    zset.nx = nx;
    zset.ny = ny;
    zset.nz = nz;
    zset.planes_per_worker = zp;
    zset.slabs.assign(size_t(p), Volume3D());
    parallel_for(p, threads, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t w = begin; w < end; ++w) {
            Volume3D slab(nx, ny, zp);
            spread_masked(atoms, nx, ny, nz, int(w) * zp, int(w + 1) * zp, slab);
            zset.slabs[size_t(w)] = std::move(slab);
        }
    });
    Volume3D charge_grid = gather_slabs(zset);

    FftPlan fwd_x(nx, FftDirection::forward, std::min(8, nx), FftScaling::none);
    FftPlan fwd_y(ny, FftDirection::forward, std::min(8, ny), FftScaling::none);
    FftPlan fwd_z(nz, FftDirection::forward, std::min(8, nz), FftScaling::none);
    FftPlan inv_x(nx, FftDirection::inverse, std::min(8, nx), FftScaling::none);
    FftPlan inv_y(ny, FftDirection::inverse, std::min(8, ny), FftScaling::none);
    FftPlan inv_z(nz, FftDirection::inverse, std::min(8, nz), FftScaling::none);

    worker_pencil_pass(zset, Axis::X, fwd_x, threads);
    worker_pencil_pass(zset, Axis::Y, fwd_y, threads);
    SlabSet yset = corner_turn(zset, cfg, sched, &st.turn_forward);
    worker_pencil_pass(yset, Axis::Z, fwd_z, threads);
    // Influence multiply on Y-slabs, partitioned exactly like the slabs.
    parallel_for(p, threads, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t w = begin; w < end; ++w) {
            Volume3D& slab = yset.slabs[size_t(w)];
            for (int z = 0; z < nz; ++z)
                for (int yl = 0; yl < yp; ++yl)
                    for (int x = 0; x < nx; ++x)
                        slab.at(x, yl, z) *= greens.at(x, int(w) * yp + yl, z);
        }
    });
    worker_pencil_pass(yset, Axis::Z, inv_z, threads);
    SlabSet zset2 = corner_turn(yset, cfg, sched, &st.turn_inverse);
    worker_pencil_pass(zset2, Axis::Y, inv_y, threads);
    worker_pencil_pass(zset2, Axis::X, inv_x, threads);
    Volume3D phi_grid = gather_slabs(zset2);

    PipelineResult res;
    for (size_t i = 0; i < phi_grid.data.size(); ++i)
        res.energy += charge_grid.data[i].real() * phi_grid.data[i].real();
    res.energy *= 0.5;

    RealVolume3D phi = real_part(phi_grid);
    std::vector<std::vector<std::array<double, 3>>> partials(
        size_t(p), std::vector<std::array<double, 3>>(size_t(atoms.count())));
    parallel_for(p, threads, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t w = begin; w < end; ++w)
            interpolate_masked(phi, atoms, box, int(w) * zp, int(w + 1) * zp,
                               partials[size_t(w)]);
    });
    res.forces.f.assign(size_t(atoms.count()), {0.0, 0.0, 0.0});
    for (int w = 0; w < p; ++w)
        for (int a = 0; a < atoms.count(); ++a)
            for (int d = 0; d < 3; ++d)
                res.forces.f[size_t(a)][size_t(d)] += partials[size_t(w)][size_t(a)][size_t(d)];

    if (stats) *stats = st;
    return res;
}

namespace {

struct Lattice {
    std::vector<int> dims; // per-dimension extents, product = nodes
};

Lattice torus_dims(int nodes, int rank) {
    int bits = log2_exact(unsigned(nodes));
    Lattice lat;
    lat.dims.assign(size_t(rank), 1);
    for (int b = 0; b < bits; ++b) lat.dims[size_t(b % rank)] *= 2;
    std::sort(lat.dims.begin(), lat.dims.end(), std::greater<int>());
    return lat;
}

std::vector<int> coords_of(int node, const Lattice& lat) {
    std::vector<int> c(lat.dims.size());
    for (size_t d = 0; d < lat.dims.size(); ++d) {
        c[d] = node % lat.dims[d];
        node /= lat.dims[d];
    }
    return c;
}

int node_of_coords(const std::vector<int>& c, const Lattice& lat) {
    int node = 0;
    for (size_t d = lat.dims.size(); d-- > 0;) node = node * lat.dims[d] + c[d];
    return node;
}

// Deterministic shortest path from s to t as a list of directed hops.
std::vector<std::pair<int, int>> route(int s, int t, TopologyKind kind, int nodes) {
    std::vector<std::pair<int, int>> hops;
    if (s == t) return hops;
    switch (kind) {
        case TopologyKind::ptop:
        case TopologyKind::switched:
            hops.emplace_back(s, t);
            return hops;
        case TopologyKind::hypercube:
        case TopologyKind::hypercubepp: {
            if (kind == TopologyKind::hypercubepp && t == (nodes - 1 - s) &&
                nodes > 2) {
                hops.emplace_back(s, t); // antipodal shortcut link
                return hops;
            }
            int cur = s;
            int diff = s ^ t;
            for (int b = 0; diff >> b; ++b)
                if ((diff >> b) & 1) {
                    int next = cur ^ (1 << b);
                    hops.emplace_back(cur, next);
                    cur = next;
                }
            return hops;
        }
        case TopologyKind::torus2d:
        case TopologyKind::torus3d: {
            Lattice lat = torus_dims(nodes, kind == TopologyKind::torus2d ? 2 : 3);
            std::vector<int> cur = coords_of(s, lat);
            std::vector<int> dst = coords_of(t, lat);
            for (size_t d = 0; d < lat.dims.size(); ++d) {
                int n = lat.dims[d];
                while (cur[d] != dst[d]) {
                    int fwd = (dst[d] - cur[d] + n) % n;
                    int step = fwd <= n - fwd ? 1 : n - 1; // shortest wrap direction
                    int from = node_of_coords(cur, lat);
                    cur[d] = (cur[d] + step) % n;
                    hops.emplace_back(from, node_of_coords(cur, lat));
                }
            }
            return hops;
        }
    }
    return hops;
}

} // namespace

MultihopReport pack_multihop(const A2ASchedule& sched, TopologyKind kind) {
    MultihopReport rep;
    rep.topology = kind;
    rep.nodes = sched.nodes;
    std::map<std::pair<int, int>, std::vector<char>> link_busy; // link -> per-slot flags
    std::set<std::pair<int, int>> links;
    std::int64_t total_hops = 0, messages = 0;
    for (const auto& round : sched.rounds)
        for (auto [s, d] : round) {
            auto hops = route(s, d, kind, sched.nodes);
            total_hops += std::int64_t(hops.size());
            ++messages;
            for (auto& h : hops) links.insert(h);
            // First-fit: earliest slot where every hop link is free.
            int slot = 0;
            for (;; ++slot) {
                bool free = true;
                for (auto& h : hops) {
                    auto& busy = link_busy[h];
                    if (int(busy.size()) > slot && busy[size_t(slot)]) { free = false; break; }
                }
                if (free) break;
            }
            for (auto& h : hops) {
                auto& busy = link_busy[h];
                if (int(busy.size()) <= slot) busy.resize(size_t(slot) + 1, 0);
                busy[size_t(slot)] = 1;
            }
            rep.slots = std::max(rep.slots, slot + 1);
        }
    rep.directed_links = int(links.size());
    for (auto& [link, busy] : link_busy)
        rep.max_link_slots =
            std::max(rep.max_link_slots, int(std::count(busy.begin(), busy.end(), 1)));
    rep.mean_path_hops = messages > 0 ? double(total_hops) / double(messages) : 0.0;
    return rep;
}

std::string multihop_to_text(const MultihopReport& rep) {
    std::ostringstream out;
    out << "# multihop " << to_string(rep.topology) << " nodes=" << rep.nodes
        << " slots=" << rep.slots << " links=" << rep.directed_links
        << " max-link-slots=" << rep.max_link_slots << " mean-hops=" << rep.mean_path_hops
        << '\n';
    return out.str();
}

} // namespace spme
