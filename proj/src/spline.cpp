#include "spme/spline.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spme {

Spline4 bspline4(double u) {
    if (!(u >= 0.0 && u < 1.0))
        throw std::invalid_argument("bspline4: fractional offset must lie in [0,1), got " +
                                    std::to_string(u));
    Spline4 s{};
    // Order 2 (hat function sampled at the covered points).
    double d0 = 1.0 - u;
    double d1 = u;
    // Order 3: M3 values at u+2, u+1, u.
    double e2 = 0.5 * u * d1;
    double e1 = 0.5 * ((u + 1.0) * d0 + (2.0 - u) * d1);
    double e0 = 0.5 * (1.0 - u) * d0;
    // Derivatives before the final lift: dM4(v)/dv = M3(v) - M3(v-1).
    s.dw[0] = -e0;
    s.dw[1] = e0 - e1;
    s.dw[2] = e1 - e2;
    s.dw[3] = e2;
    // Order 4: w[j] = M4(u + 3 - j).
    double third = 1.0 / 3.0;
    s.w[3] = third * u * e2;
    s.w[2] = third * ((u + 1.0) * e1 + (3.0 - u) * e2);
    s.w[1] = third * ((u + 2.0) * e0 + (2.0 - u) * e1);
    s.w[0] = third * (1.0 - u) * e0;
    return s;
}

namespace {

int wrap_index(long long i, int n) {
    long long r = i % n;
    if (r < 0) r += n;
    return int(r);
}

struct AxisSupport {
    int base;
    double frac;
};

AxisSupport axis_support(double coord, int n, double length) {
    double u = coord / length * double(n);
    double f = std::floor(u);
    double frac = u - f;
    if (frac >= 1.0) { // guard against rounding at exact grid points
        f += 1.0;
        frac = 0.0;
    }
    return {wrap_index((long long)f - 3, n), frac};
}

} // namespace

SplineWeights spline_weights(double x, double y, double z, int nx, int ny, int nz,
                             double lx, double ly, double lz) {
    if (nx < 1 || ny < 1 || nz < 1 || !(lx > 0.0) || !(ly > 0.0) || !(lz > 0.0))
        throw std::invalid_argument("spline_weights: mesh extents and box lengths must be positive");
    SplineWeights sw{};
    auto ax = axis_support(x, nx, lx);
    auto ay = axis_support(y, ny, ly);
    auto az = axis_support(z, nz, lz);
    sw.base = {ax.base, ay.base, az.base};
    sw.sx = bspline4(ax.frac);
    sw.sy = bspline4(ay.frac);
    sw.sz = bspline4(az.frac);
    return sw;
}

} // namespace spme
