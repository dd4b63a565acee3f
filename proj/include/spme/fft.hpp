// Radix-2 decimation-in-time FFT for power-of-two lengths, plus a 3-D
// transform built from contiguous pencil passes.
//
// Conventions (fixed across the whole code base):
//   forward:  X[k] = sum_a x[a] * exp(-2*pi*i*a*k/n)
//   inverse:  x[a] = sum_k X[k] * exp(+2*pi*i*a*k/n), optionally scaled by 1/n
//
// Scaling is explicit: FftScaling::inverse_over_n divides by n after an
// inverse pass (the 3-D inverse then carries 1/(nx*ny*nz) in total);
// FftScaling::none leaves the raw sums untouched.  Forward passes are never
// scaled.
//
// The streaming engine this models presents input samples to an n-point FFT
// in lane order: the low log2(lanes) address bits reversed, the remaining
// high bits untouched.  FftInputOrder::lane_presented accepts data in that
// order; FftOutputOrder::bit_reversed emits the classic DIT bit-reversed
// layout instead of natural order.
#pragma once

#include <complex>
#include <span>
#include <vector>

#include "spme/bitperm.hpp"
#include "spme/volume.hpp"

namespace spme {

enum class FftDirection { forward, inverse };
enum class FftScaling { none, inverse_over_n };
enum class FftInputOrder { natural, lane_presented };
enum class FftOutputOrder { natural, bit_reversed };

struct FftPlan {
    int n = 0;
    FftDirection direction = FftDirection::forward;
    int lanes = 8;
    FftScaling scaling = FftScaling::none;
    std::vector<cplx> twiddle; // twiddle[k] = exp(sign * 2*pi*i*k/n), k < n/2

    FftPlan(int n, FftDirection direction, int lanes = 8,
            FftScaling scaling = FftScaling::none);
};

// Transforms `data` in place; `data.size()` must equal `plan.n`.  Input is
// taken in natural order and output is produced in natural order.
void fft_1d_inplace(const FftPlan& plan, std::span<cplx> data);

// Out-of-place transform with explicit input/output orderings.
std::vector<cplx> fft_1d(const FftPlan& plan, std::span<const cplx> input,
                         FftInputOrder in_order = FftInputOrder::natural,
                         FftOutputOrder out_order = FftOutputOrder::natural);

// Transforms every pencil of `vol` along `axis` in place; `plan.n` must
// equal the axis extent (other extents may be arbitrary powers of two, so
// thin slabs are fine).  This is the single building block shared by
// fft_3d and the distributed engine — sharing it is what makes the two
// paths bitwise identical.  `threads` chunks the pencil loop statically;
// results do not depend on the thread count.
void fft_pencils(Volume3D& vol, Axis axis, const FftPlan& plan, int threads = 1);

// Full 3-D transform: pencils along X, then Y, then Z for the forward
// direction and Z, then Y, then X for the inverse.  With
// FftScaling::inverse_over_n the inverse applies 1/n per axis (1/(nx*ny*nz)
// in total).  `threads` > 1 splits the pencil loop into static chunks; the
// result is bitwise identical for every thread count.
void fft_3d(Volume3D& vol, FftDirection direction,
            FftScaling scaling = FftScaling::inverse_over_n, int threads = 1);

} // namespace spme
