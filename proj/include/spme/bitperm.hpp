// Generalized sample-address bit permutations.
//
// A flat sequence of 2^w elements is addressed by w bits. Each address bit
// carries a named dimension bit (X3, Y0, Z4, ...). A PermutationSpec gives the
// label carried by every address bit of the input layout and of the output
// layout, both written lowest-order bit first. Applying the permutation moves
// the element whose label coordinates are fixed from its input address to its
// output address; data is only relocated, never transformed.
#pragma once

#include "spme/volume.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace spme {

enum class Axis { X = 0, Y = 1, Z = 2 };

struct BitLabel {
    Axis axis = Axis::X;
    int index = 0;
    bool operator==(const BitLabel&) const = default;
};

std::string to_string(BitLabel l);

struct PermutationSpec {
    std::vector<BitLabel> in;  // in[i]  = label carried by input address bit i
    std::vector<BitLabel> out; // out[j] = label carried by output address bit j

    int width() const { return int(in.size()); }
    // Throws std::invalid_argument unless in/out are duplicate-free
    // rearrangements of the same label set with width <= 31.
    void validate() const;
    bool is_identity() const { return in == out; }
};

// Control-file parse error, carrying the 1-based line and column.
struct PermParseError : std::runtime_error {
    int line = 0, col = 0;
    PermParseError(int line_, int col_, const std::string& what);
};

// Control-file format: one `in:` line and one `out:` line, tokens like X0 Y12
// separated by whitespace, `#` starts a comment, blank lines ignored.
PermutationSpec parse_perm_file(std::string_view text);
std::string format_perm_file(const PermutationSpec& spec);

// The inverse permutation (swap the two layouts).
PermutationSpec inverse(const PermutationSpec& spec);

// For each output address bit j, the input address bit carrying the same label.
std::vector<int> source_bit_map(const PermutationSpec& spec);

// Relocate a flat 2^w sequence. out[dst(a)] = v[a] where dst relabels bits.
template <class T>
std::vector<T> apply_permutation(std::span<const T> v, const PermutationSpec& spec) {
    spec.validate();
    const int w = spec.width();
    const std::size_t n = std::size_t(1) << w;
    if (v.size() != n)
        throw std::invalid_argument("apply_permutation: sequence length " +
                                    std::to_string(v.size()) + " != 2^" + std::to_string(w));
    std::vector<int> src = source_bit_map(spec);
    std::vector<T> out(n);
    for (std::size_t a = 0; a < n; ++a) {
        std::size_t d = 0;
        for (int j = 0; j < w; ++j) d |= ((a >> src[j]) & 1u) << j;
        out[d] = v[a];
    }
    return out;
}

template <class T>
std::vector<T> apply_permutation(const std::vector<T>& v, const PermutationSpec& spec) {
    return apply_permutation(std::span<const T>(v.data(), v.size()), spec);
}

// Volume overload: checks the permutation's label widths against the volume extents.
std::vector<cplx> apply_permutation(const Volume3D& v, const PermutationSpec& spec);

// Label-list builders.
std::vector<BitLabel> axis_labels(Axis axis, int count);
// X0..Xa Y0..Yb Z0..Zc for a (nx, ny, nz) volume, lowest-order bit first.
std::vector<BitLabel> natural_labels(int nx, int ny, int nz);

// 1D full bit reversal over log2(n) X bits.
PermutationSpec bit_reversal_spec(int n);

// Lane presentation order for an n-point transform fed lanes samples per step:
// reverses the low log2(lanes) address bits, leaves the high bits in order.
PermutationSpec lane_input_order(int n, int lanes);

// Natural (nx, ny, nz) layout rearranged so `axis` becomes the fastest index;
// the other two axes keep their relative order. Used to present pencils
// contiguously for 1D transforms.
PermutationSpec axis_front_spec(int nx, int ny, int nz, Axis axis);

} // namespace spme
