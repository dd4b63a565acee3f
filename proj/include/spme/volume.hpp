// Dense 3D complex volumes (X-fastest layout) and the PMEV binary container.
#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace spme {

using cplx = std::complex<double>;

constexpr bool is_pow2(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

// Exact log2 of a power of two; throws std::invalid_argument otherwise.
int log2_exact(std::int64_t v);

// Real scalar field on a power-of-two grid, X index fastest.
struct RealVolume3D {
    int nx = 0, ny = 0, nz = 0;
    std::vector<double> data;

    RealVolume3D() = default;
    RealVolume3D(int nx_, int ny_, int nz_);

    std::int64_t size() const { return std::int64_t(nx) * ny * nz; }
    std::int64_t index(int x, int y, int z) const {
        return x + std::int64_t(nx) * (y + std::int64_t(ny) * z);
    }
    double& at(int x, int y, int z) { return data[index(x, y, z)]; }
    const double& at(int x, int y, int z) const { return data[index(x, y, z)]; }
};

// Complex field, same layout.  The container accepts any positive extents
// (slab fragments can be thin); full problem volumes are checked against
// validate_extents at the API boundaries that accept them.
struct Volume3D {
    int nx = 0, ny = 0, nz = 0;
    std::vector<cplx> data;

    Volume3D() = default;
    Volume3D(int nx_, int ny_, int nz_);

    std::int64_t size() const { return std::int64_t(nx) * ny * nz; }
    std::int64_t index(int x, int y, int z) const {
        return x + std::int64_t(nx) * (y + std::int64_t(ny) * z);
    }
    cplx& at(int x, int y, int z) { return data[index(x, y, z)]; }
    const cplx& at(int x, int y, int z) const { return data[index(x, y, z)]; }

    bool same_dims(const Volume3D& o) const {
        return nx == o.nx && ny == o.ny && nz == o.nz;
    }
};

void validate_extents(int nx, int ny, int nz);

Volume3D real_to_complex_wrap(const RealVolume3D& r);
RealVolume3D real_part(const Volume3D& v);
double max_abs_imag(const Volume3D& v);

// Bitwise equality (no tolerance).
bool bit_equal(const Volume3D& a, const Volume3D& b);
// max_i |a_i - b_i| over complex elements.
double max_abs_diff(const Volume3D& a, const Volume3D& b);

// PMEV container: magic "PMEV", u32 version=1, u32 nx, ny, nz, u32 dtype,
// then nx*ny*nz little-endian (re, im) pairs, X index fastest.
// dtype 0 = float32 pairs (casting mode), dtype 1 = float64 pairs.
enum class VolumeDtype : std::uint32_t { f32 = 0, f64 = 1 };

void save_volume(std::ostream& os, const Volume3D& v, VolumeDtype dtype = VolumeDtype::f64);
void save_volume(const std::string& path, const Volume3D& v, VolumeDtype dtype = VolumeDtype::f64);
Volume3D load_volume(std::istream& is);
Volume3D load_volume(const std::string& path);

} // namespace spme
