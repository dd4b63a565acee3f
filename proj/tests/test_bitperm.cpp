#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "naive_dft.hpp"
#include "spme/bitperm.hpp"

using namespace spme;

namespace {

// Independent predictor: relabel address bits from input positions to
// output positions, written from the label lists alone.
std::vector<cplx> brute_force_apply(const std::vector<cplx>& v,
                                    const PermutationSpec& spec) {
    const int w = spec.width();
    std::vector<cplx> out(v.size());
    for (std::size_t a = 0; a < v.size(); ++a) {
        std::size_t d = 0;
        for (int j = 0; j < w; ++j) {
            // Destination bit j carries the label spec.out[j]; find where that
            // label sits in the input ordering and read the source bit there.
            auto it = std::find(spec.in.begin(), spec.in.end(), spec.out[std::size_t(j)]);
            int src = int(it - spec.in.begin());
            if (a >> src & 1u) d |= std::size_t(1) << j;
        }
        out[d] = v[a];
    }
    return out;
}

std::vector<cplx> iota_values(int count) {
    std::vector<cplx> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) v[std::size_t(i)] = cplx(double(i), -double(i));
    return v;
}

} // namespace

TEST_CASE("labels and natural ordering") {
    CHECK(to_string(BitLabel{Axis::X, 0}) == "X0");
    CHECK(to_string(BitLabel{Axis::Z, 4}) == "Z4");
    auto labels = natural_labels(8, 16, 8);
    REQUIRE(labels.size() == 3 + 4 + 3);
    CHECK(labels[0] == BitLabel{Axis::X, 0});
    CHECK(labels[2] == BitLabel{Axis::X, 2});
    CHECK(labels[3] == BitLabel{Axis::Y, 0});
    CHECK(labels[6] == BitLabel{Axis::Y, 3});
    CHECK(labels[7] == BitLabel{Axis::Z, 0});
    CHECK(labels[9] == BitLabel{Axis::Z, 2});
}

TEST_CASE("parse: three-bit reversal") {
    PermutationSpec spec = parse_perm_file("in: X0 X1 X2\nout: X2 X1 X0");
    spec.validate();
    CHECK(spec.width() == 3);
    CHECK(spec.in == axis_labels(Axis::X, 3));
    CHECK(spec.out[0] == BitLabel{Axis::X, 2});
    CHECK(spec.out[2] == BitLabel{Axis::X, 0});
}

TEST_CASE("parse: comments, blank lines, and formatting round trip") {
    PermutationSpec spec = parse_perm_file(
        "# corner turn control\n\nin: X0 X1 Y0 Y1 # trailing note\nout: Y1 Y0 X1 X0\n");
    CHECK(spec.width() == 4);
    PermutationSpec again = parse_perm_file(format_perm_file(spec));
    CHECK(again.in == spec.in);
    CHECK(again.out == spec.out);
}

TEST_CASE("parse errors carry line and column") {
    SUBCASE("duplicate label") {
        try {
            parse_perm_file("in: X0 X0\nout: X0 X0");
            FAIL("expected PermParseError");
        } catch (const PermParseError& e) {
            CHECK(e.line == 1);
            CHECK(e.col > 1);
        }
    }
    SUBCASE("malformed token") {
        try {
            parse_perm_file("in: X0 Q1\nout: Q1 X0");
            FAIL("expected PermParseError");
        } catch (const PermParseError& e) {
            CHECK(e.line == 1);
        }
    }
    SUBCASE("missing out line") {
        try {
            parse_perm_file("in: X0 X1");
            FAIL("expected PermParseError");
        } catch (const PermParseError& e) {
            CHECK(e.line == 2);
        }
    }
    SUBCASE("label sets differ") {
        CHECK_THROWS(parse_perm_file("in: X0 X1\nout: X0 Y1"));
    }
    SUBCASE("stray line") {
        try {
            parse_perm_file("in: X0\nnonsense\nout: X0");
            FAIL("expected PermParseError");
        } catch (const PermParseError& e) {
            CHECK(e.line == 2);
            CHECK(e.col == 1);
        }
    }
}

TEST_CASE("three-bit reversal sends [v0..v7] to [0,4,2,6,1,5,3,7]") {
    std::vector<cplx> v = iota_values(8);
    std::vector<cplx> out = apply_permutation(v, bit_reversal_spec(8));
    const int want[8] = {0, 4, 2, 6, 1, 5, 3, 7};
    for (int i = 0; i < 8; ++i) CHECK(out[std::size_t(i)].real() == double(want[i]));
}

TEST_CASE("identity spec leaves input unchanged") {
    PermutationSpec spec;
    spec.in = axis_labels(Axis::X, 4);
    spec.out = spec.in;
    CHECK(spec.is_identity());
    std::vector<cplx> v = iota_values(16);
    CHECK(apply_permutation(v, spec) == v);
}

TEST_CASE("bit0<->bit3 swap equals the brute-force remap table") {
    PermutationSpec spec = parse_perm_file("in: X0 X1 X2 X3\nout: X3 X1 X2 X0");
    std::vector<cplx> v = iota_values(16);
    std::vector<cplx> got = apply_permutation(v, spec);
    std::vector<cplx> want = brute_force_apply(v, spec);
    CHECK(got == want);
    // Spot-check one address by hand: input address 1 (bit0 set) must land at
    // the address whose bit carrying label X0 is set, i.e. output bit 3.
    CHECK(got[8] == v[1]);
}

TEST_CASE("round trip through the inverse and multiset preservation") {
    std::mt19937_64 rng(99);
    auto labels = natural_labels(8, 4, 2); // width 6, 64 elements
    for (int trial = 0; trial < 25; ++trial) {
        PermutationSpec spec;
        spec.in = labels;
        spec.out = labels;
        std::shuffle(spec.out.begin(), spec.out.end(), rng);
        spec.validate();
        std::vector<cplx> v(64);
        for (cplx& c : v)
            c = cplx(double(rng() >> 40), double(rng() >> 40));
        std::vector<cplx> fwd = apply_permutation(v, spec);
        CHECK(apply_permutation(fwd, inverse(spec)) == v);
        CHECK(fwd == brute_force_apply(v, spec));
        auto sorted = [](std::vector<cplx> s) {
            std::sort(s.begin(), s.end(), [](const cplx& a, const cplx& b) {
                return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
            });
            return s;
        };
        CHECK(sorted(fwd) == sorted(v));
    }
}

TEST_CASE("bit reversal is an involution") {
    std::vector<cplx> v = iota_values(64);
    PermutationSpec spec = bit_reversal_spec(64);
    CHECK(apply_permutation(apply_permutation(v, spec), spec) == v);
}

TEST_CASE("corner-turn control file") {
    const char* text =
        "in: Y4 Y3 Y2 Y1 Y0 X0 X1 X2 X3 X4 Z0 Z1 Z2 Z3 Z4\n"
        "out: Z4 Z3 Z2 Y1 Y0 X0 X1 X2 X3 X4 Z0 Z1 Y2 Y3 Y4\n";
    PermutationSpec spec = parse_perm_file(text);
    spec.validate();
    REQUIRE(spec.width() == 15);
    CHECK_FALSE(spec.is_identity());

    // Applied to a 32^3 volume, every sample must land exactly where the
    // independent bit-remap predicts; this sweeps all 1024 (x,y) pencils.
    Volume3D v = testutil::random_volume(32, 32, 32, 5);
    std::vector<cplx> got = apply_permutation(v, spec);
    std::vector<cplx> want = brute_force_apply(v.data, spec);
    CHECK(got == want);
}

TEST_CASE("lane input order reverses only the low lane bits") {
    SUBCASE("n=32, lanes=8") {
        PermutationSpec spec = lane_input_order(32, 8);
        REQUIRE(spec.width() == 5);
        CHECK(spec.in == axis_labels(Axis::X, 5));
        CHECK(spec.out[0] == BitLabel{Axis::X, 2});
        CHECK(spec.out[1] == BitLabel{Axis::X, 1});
        CHECK(spec.out[2] == BitLabel{Axis::X, 0});
        CHECK(spec.out[3] == BitLabel{Axis::X, 3});
        CHECK(spec.out[4] == BitLabel{Axis::X, 4});
    }
    SUBCASE("n=8, lanes=8 is the full reversal") {
        PermutationSpec spec = lane_input_order(8, 8);
        CHECK(spec.out == bit_reversal_spec(8).out);
    }
    SUBCASE("n=64, lanes=8 against brute-force index arithmetic") {
        PermutationSpec spec = lane_input_order(64, 8);
        std::vector<cplx> v = iota_values(64);
        std::vector<cplx> got = apply_permutation(v, spec);
        for (int a = 0; a < 64; ++a) {
            int lane = a & 7;
            int rev = (lane & 1) << 2 | (lane & 2) | (lane & 4) >> 2;
            int d = (a & ~7) | rev;
            CHECK(got[std::size_t(d)] == v[std::size_t(a)]);
        }
    }
    SUBCASE("validation") {
        CHECK_THROWS(lane_input_order(12, 4));
        CHECK_THROWS(lane_input_order(8, 16));
    }
}

TEST_CASE("axis-front specs present a contiguous pencil axis") {
    PermutationSpec spec = axis_front_spec(8, 16, 32, Axis::Y);
    REQUIRE(spec.width() == 3 + 4 + 5);
    CHECK(spec.out[0] == BitLabel{Axis::Y, 0});
    CHECK(spec.out[3] == BitLabel{Axis::Y, 3});
    CHECK(spec.out[4] == BitLabel{Axis::X, 0});
    CHECK(spec.out[7] == BitLabel{Axis::Z, 0});
    Volume3D v = testutil::random_volume(8, 16, 32, 21);
    std::vector<cplx> flat = apply_permutation(v, spec);
    // After the permutation, Y varies fastest: walking 16 consecutive
    // outputs at offset 0 must reproduce the (x=0, z=0) Y-pencil.
    for (int y = 0; y < 16; ++y) CHECK(flat[std::size_t(y)] == v.at(0, y, 0));
    // X-front on a natural volume is the identity.
    CHECK(axis_front_spec(8, 16, 32, Axis::X).is_identity());
}

TEST_CASE("apply_permutation validates widths") {
    std::vector<cplx> v = iota_values(8);
    CHECK_THROWS(apply_permutation(v, bit_reversal_spec(16)));
    Volume3D vol(8, 8, 8);
    CHECK_THROWS(apply_permutation(vol, bit_reversal_spec(8))); // width 3 vs 9
}
