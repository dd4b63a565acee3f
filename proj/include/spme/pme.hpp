// Long-range electrostatics on a periodic mesh: charge spreading with
// order-4 B-splines, reciprocal-space solve through the influence volume,
// analytic-derivative force interpolation, and a direct reciprocal-sum
// reference implementation used for validation.
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "spme/volume.hpp"

namespace spme {

struct Box {
    double lx = 1.0, ly = 1.0, lz = 1.0;
    double volume() const { return lx * ly * lz; }
    std::array<double, 3> lengths() const { return {lx, ly, lz}; }
};

// Atom positions are fractional box coordinates in [0,1)^3.
struct AtomSet {
    std::vector<std::array<double, 3>> positions;
    std::vector<double> charges;

    int count() const { return int(positions.size()); }
    double total_charge() const;
    void validate() const; // throws std::invalid_argument on violation
};

// Text format: one atom per line, `x y z q` (fractional coordinates),
// `#` starts a comment, blank lines ignored.  Parse failures carry the
// 1-based line number.  Positions are wrapped into [0,1).
AtomSet load_atoms(std::istream& in);
AtomSet load_atoms(const std::filesystem::path& path);
void save_atoms(std::ostream& out, const AtomSet& atoms);

// Deterministic random system: uniform positions, alternating +1/-1 charges
// shifted to exact neutrality.  Identical output for identical (count, seed)
// on every platform (no distribution objects involved).
AtomSet random_neutral_atoms(int count, std::uint64_t seed);

struct ForceSet {
    std::vector<std::array<double, 3>> f;
    int count() const { return int(f.size()); }
};

std::array<double, 3> net_force(const ForceSet& fs);
double max_force_norm(const ForceSet& fs);
// max_j |a_j - b_j| / max_j |b_j| with Euclidean norms.
double max_rel_force_error(const ForceSet& a, const ForceSet& b);

// Splitting parameter so the Gaussian tail at the mesh Nyquist frequency is
// far below every tolerance used here; h_max is the coarsest grid spacing.
double default_beta(const Box& box, int nx, int ny, int nz);

// Deposits q * wx*wy*wz onto each atom's 4x4x4 support with periodic wrap.
// Accumulation order is fixed (atoms in input order), so the result is
// bitwise reproducible.
RealVolume3D spread_charges(const AtomSet& atoms, int nx, int ny, int nz);

// Influence volume: zero at the DC bin, exp(-pi^2|m|^2/beta^2)/(pi*V*|m|^2)
// times the squared B-spline Euler factors elsewhere, with signed frequency
// m_d/L_d per axis.
using GreensVolume = RealVolume3D;
GreensVolume make_greens(int nx, int ny, int nz, const Box& box, double beta);
// Validates a candidate influence volume (finite, non-negative, zero DC bin,
// symmetric under index negation mod extents); throws on violation.
void validate_greens(const GreensVolume& g);
GreensVolume greens_from_volume(const Volume3D& v); // real part + validation

// F_atom = -q * sum over the 4x4x4 support of
//   phi[ijk] * (dwx*wy*wz, wx*dwy*wz, wx*wy*dwz) * (n_axis / L_axis).
// Read-only on the grid; parallelizes over atoms bitwise-deterministically.
ForceSet interpolate_forces(const RealVolume3D& phi, const AtomSet& atoms,
                            const Box& box, int threads = 1);

struct PipelineResult {
    double energy = 0.0;
    ForceSet forces;
};

// spread -> forward FFT -> multiply by greens -> unscaled inverse FFT ->
// interpolate.  The potential grid is the unscaled inverse transform; by
// Parseval this makes energy = 1/2 * sum(charge grid * potential grid)
// close against the direct reciprocal sum with no further normalization.
PipelineResult lr_pipeline(const AtomSet& atoms, const Box& box,
                           const GreensVolume& greens, int threads = 1);

struct OracleResult {
    double energy = 0.0;
    ForceSet forces;
};

// Direct reciprocal sum over integer modes 0 < |m| <= kmax via exact
// structure factors: E = sum c(m)|S(m)|^2 with
// c = exp(-pi^2 m~^2/beta^2)/(2 pi V m~^2), m~_d = m_d/L_d, and forces by
// the analytic gradient.  Independent of meshes and splines.
OracleResult direct_recip_oracle(const AtomSet& atoms, const Box& box,
                                 double beta, int kmax);

struct ReorderResult {
    std::vector<int> order; // permutation of [0, count)
    int stalls = 0;         // bubbles inserted when no atom was eligible
};

// Greedy hazard avoidance: emit atoms so that no two atoms whose 4x4x4
// supports share a grid cell fall within `window` consecutive pipeline
// slots; first-fit by original index, inserting a bubble (counted stall)
// when every pending atom conflicts.  Reordering never changes numerical
// results; spreading is order-independent addition.
ReorderResult reorder_atoms(const AtomSet& atoms, int nx, int ny, int nz,
                            int window);

} // namespace spme
