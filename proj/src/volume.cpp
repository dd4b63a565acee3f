#include "spme/volume.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "PMEV I/O writes host-order scalars and requires a little-endian host");

namespace spme {

int log2_exact(std::int64_t v) {
    if (!is_pow2(v)) throw std::invalid_argument("log2_exact: not a power of two");
    int b = 0;
    while ((std::int64_t(1) << b) < v) ++b;
    return b;
}

void validate_extents(int nx, int ny, int nz) {
    for (int n : {nx, ny, nz}) {
        if (n < 8 || !is_pow2(n))
            throw std::invalid_argument("volume extents must be powers of two >= 8, got " +
                                        std::to_string(n));
    }
}

namespace {

void require_positive(int nx, int ny, int nz) {
    if (nx < 1 || ny < 1 || nz < 1)
        throw std::invalid_argument("volume extents must be positive");
}

} // namespace

RealVolume3D::RealVolume3D(int nx_, int ny_, int nz_) : nx(nx_), ny(ny_), nz(nz_) {
    require_positive(nx, ny, nz);
    data.assign(size(), 0.0);
}

Volume3D::Volume3D(int nx_, int ny_, int nz_) : nx(nx_), ny(ny_), nz(nz_) {
    require_positive(nx, ny, nz);
    data.assign(size(), cplx(0.0, 0.0));
}

Volume3D real_to_complex_wrap(const RealVolume3D& r) {
    Volume3D v(r.nx, r.ny, r.nz);
    for (std::int64_t i = 0; i < r.size(); ++i) v.data[i] = cplx(r.data[i], 0.0);
    return v;
}

RealVolume3D real_part(const Volume3D& v) {
    RealVolume3D r(v.nx, v.ny, v.nz);
    for (std::int64_t i = 0; i < v.size(); ++i) r.data[i] = v.data[i].real();
    return r;
}

double max_abs_imag(const Volume3D& v) {
    double m = 0.0;
    for (const cplx& c : v.data) m = std::max(m, std::abs(c.imag()));
    return m;
}

bool bit_equal(const Volume3D& a, const Volume3D& b) {
    if (!a.same_dims(b)) return false;
    return std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(cplx)) == 0;
}

double max_abs_diff(const Volume3D& a, const Volume3D& b) {
    if (!a.same_dims(b)) throw std::invalid_argument("max_abs_diff: dimension mismatch");
    double m = 0.0;
    for (std::int64_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

namespace {

constexpr char kMagic[4] = {'P', 'M', 'E', 'V'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& is, const char* what) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw std::runtime_error(std::string("PMEV: truncated header reading ") + what);
    return v;
}

} // namespace

void save_volume(std::ostream& os, const Volume3D& v, VolumeDtype dtype) {
    validate_extents(v.nx, v.ny, v.nz); // files always hold full volumes
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u32(os, std::uint32_t(v.nx));
    put_u32(os, std::uint32_t(v.ny));
    put_u32(os, std::uint32_t(v.nz));
    put_u32(os, std::uint32_t(dtype));
    if (dtype == VolumeDtype::f64) {
        os.write(reinterpret_cast<const char*>(v.data.data()),
                 std::streamsize(v.data.size() * sizeof(cplx)));
    } else {
        std::vector<float> buf(v.data.size() * 2);
        for (size_t i = 0; i < v.data.size(); ++i) {
            buf[2 * i] = float(v.data[i].real());
            buf[2 * i + 1] = float(v.data[i].imag());
        }
        os.write(reinterpret_cast<const char*>(buf.data()),
                 std::streamsize(buf.size() * sizeof(float)));
    }
    if (!os) throw std::runtime_error("PMEV: write failed");
}

void save_volume(const std::string& path, const Volume3D& v, VolumeDtype dtype) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("PMEV: cannot open for write: " + path);
    save_volume(os, v, dtype);
}

Volume3D load_volume(std::istream& is) {
    char magic[4] = {};
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("PMEV: bad magic");
    std::uint32_t version = get_u32(is, "version");
    if (version != kVersion)
        throw std::runtime_error("PMEV: unsupported version " + std::to_string(version));
    std::uint32_t nx = get_u32(is, "nx");
    std::uint32_t ny = get_u32(is, "ny");
    std::uint32_t nz = get_u32(is, "nz");
    std::uint32_t dt = get_u32(is, "dtype");
    if (dt > 1) throw std::runtime_error("PMEV: unknown dtype " + std::to_string(dt));
    if (nx > (1u << 30) || ny > (1u << 30) || nz > (1u << 30))
        throw std::runtime_error("PMEV: extents out of range");
    validate_extents(int(nx), int(ny), int(nz)); // files always hold full volumes
    Volume3D v{int(nx), int(ny), int(nz)};
    if (VolumeDtype(dt) == VolumeDtype::f64) {
        is.read(reinterpret_cast<char*>(v.data.data()),
                std::streamsize(v.data.size() * sizeof(cplx)));
    } else {
        std::vector<float> buf(v.data.size() * 2);
        is.read(reinterpret_cast<char*>(buf.data()),
                std::streamsize(buf.size() * sizeof(float)));
        for (size_t i = 0; i < v.data.size(); ++i)
            v.data[i] = cplx(double(buf[2 * i]), double(buf[2 * i + 1]));
    }
    if (!is) throw std::runtime_error("PMEV: truncated payload");
    return v;
}

Volume3D load_volume(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("PMEV: cannot open: " + path);
    return load_volume(is);
}

} // namespace spme
