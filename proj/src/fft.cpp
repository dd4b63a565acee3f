#include "spme/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "spme/bitperm.hpp"
#include "spme/exec.hpp"

namespace spme {

FftPlan::FftPlan(int n_, FftDirection direction_, int lanes_, FftScaling scaling_)
    : n(n_), direction(direction_), lanes(lanes_), scaling(scaling_) {
    if (n < 2 || !is_pow2(unsigned(n)))
        throw std::invalid_argument("fft length must be a power of two >= 2, got " +
                                    std::to_string(n));
    if (lanes < 1 || !is_pow2(unsigned(lanes)) || lanes > n)
        throw std::invalid_argument("fft lanes must be a power of two <= n, got " +
                                    std::to_string(lanes));
    double sign = direction == FftDirection::forward ? -1.0 : 1.0;
    twiddle.resize(size_t(n) / 2);
    for (int k = 0; k < n / 2; ++k) {
        double ang = sign * 2.0 * std::numbers::pi * double(k) / double(n);
        twiddle[size_t(k)] = cplx(std::cos(ang), std::sin(ang));
    }
}

namespace {

// In-place iterative DIT: bit-reverse reorder, then log2(n) butterfly passes.
void dit_passes(const FftPlan& plan, std::span<cplx> data) {
    int n = plan.n;
    int bits = log2_exact(unsigned(n));
    for (int a = 0; a < n; ++a) {
        int r = 0;
        for (int j = 0; j < bits; ++j) r |= ((a >> j) & 1) << (bits - 1 - j);
        if (r > a) std::swap(data[size_t(a)], data[size_t(r)]);
    }
    for (int len = 2; len <= n; len *= 2) {
        int stride = n / len; // twiddle index step for this pass
        for (int block = 0; block < n; block += len) {
            for (int j = 0; j < len / 2; ++j) {
                cplx w = plan.twiddle[size_t(j) * size_t(stride)];
                cplx& lo = data[size_t(block + j)];
                cplx& hi = data[size_t(block + j + len / 2)];
                cplx t = w * hi;
                hi = lo - t;
                lo += t;
            }
        }
    }
    if (plan.direction == FftDirection::inverse &&
        plan.scaling == FftScaling::inverse_over_n) {
        double inv = 1.0 / double(n);
        for (auto& v : data) v *= inv;
    }
}

} // namespace

void fft_1d_inplace(const FftPlan& plan, std::span<cplx> data) {
    if (int(data.size()) != plan.n)
        throw std::invalid_argument("fft_1d_inplace: data length " +
                                    std::to_string(data.size()) +
                                    " does not match plan length " +
                                    std::to_string(plan.n));
    dit_passes(plan, data);
}

std::vector<cplx> fft_1d(const FftPlan& plan, std::span<const cplx> input,
                         FftInputOrder in_order, FftOutputOrder out_order) {
    if (int(input.size()) != plan.n)
        throw std::invalid_argument("fft_1d: input length " +
                                    std::to_string(input.size()) +
                                    " does not match plan length " +
                                    std::to_string(plan.n));
    std::vector<cplx> work(input.begin(), input.end());
    if (in_order == FftInputOrder::lane_presented) {
        // Samples arrive with the low log2(lanes) address bits reversed;
        // undo that presentation before transforming.
        auto spec = inverse(lane_input_order(plan.n, plan.lanes));
        work = apply_permutation(work, spec);
    }
    dit_passes(plan, work);
    if (out_order == FftOutputOrder::bit_reversed)
        work = apply_permutation(work, bit_reversal_spec(plan.n));
    return work;
}

// Permute `axis` to the fastest-varying position, run contiguous pencil
// transforms, then permute back.  Pencils are independent, so the loop can
// be chunked statically without changing any result bit.
void fft_pencils(Volume3D& vol, Axis axis, const FftPlan& plan, int threads) {
    int extent = axis == Axis::X ? vol.nx : axis == Axis::Y ? vol.ny : vol.nz;
    if (plan.n != extent)
        throw std::invalid_argument("fft_pencils: plan length " + std::to_string(plan.n) +
                                    " does not match axis extent " + std::to_string(extent));
    auto to_front = axis_front_spec(vol.nx, vol.ny, vol.nz, axis);
    std::vector<cplx> work = apply_permutation(vol.data, to_front);
    std::int64_t pencils = std::int64_t(vol.size()) / plan.n;
    parallel_for(pencils, threads, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t p = begin; p < end; ++p) {
            std::span<cplx> pencil(work.data() + p * plan.n, size_t(plan.n));
            dit_passes(plan, pencil);
        }
    });
    vol.data = apply_permutation(work, inverse(to_front));
}

void fft_3d(Volume3D& vol, FftDirection direction, FftScaling scaling, int threads) {
    validate_extents(vol.nx, vol.ny, vol.nz);
    FftPlan px(vol.nx, direction, std::min(8, vol.nx), scaling);
    FftPlan py(vol.ny, direction, std::min(8, vol.ny), scaling);
    FftPlan pz(vol.nz, direction, std::min(8, vol.nz), scaling);
    if (direction == FftDirection::forward) {
        fft_pencils(vol, Axis::X, px, threads);
        fft_pencils(vol, Axis::Y, py, threads);
        fft_pencils(vol, Axis::Z, pz, threads);
    } else {
        fft_pencils(vol, Axis::Z, pz, threads);
        fft_pencils(vol, Axis::Y, py, threads);
        fft_pencils(vol, Axis::X, px, threads);
    }
}

} // namespace spme
