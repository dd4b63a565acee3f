// Order-4 (cubic) cardinal B-spline weights and derivatives for mesh
// charge assignment.
#pragma once

#include <array>

namespace spme {

struct Spline4 {
    std::array<double, 4> w;  // M4 values at the four covered grid points
    std::array<double, 4> dw; // dM4/du at the same points
};

// Weights for fractional offset u in [0, 1): w[j] multiplies the grid point
// base + j, where base = floor(u_abs) - 3 and u_abs is the absolute mesh
// coordinate.  Evaluated by the stable recurrence
//   M_k(u) = (u * M_{k-1}(u) + (k - u) * M_{k-1}(u - 1)) / (k - 1)
// and the derivative identity dM4(u)/du = M3(u) - M3(u - 1).
Spline4 bspline4(double u);

struct SplineWeights {
    std::array<int, 3> base; // lowest covered grid index per axis, wrapped into [0, n)
    Spline4 sx, sy, sz;
};

// Spline support for one atom: position in box coordinates, mesh extents
// (nx, ny, nz), box lengths (lx, ly, lz).  Coordinates may lie outside the
// box; they are wrapped onto the mesh.
SplineWeights spline_weights(double x, double y, double z, int nx, int ny, int nz,
                             double lx, double ly, double lz);

} // namespace spme
