#pragma once

#include <vector>

namespace stablelab {

/// Radial integrals of (1 - cos u) / u^{1+alpha} that drive every stable
/// characteristic-function computation here.
namespace trig {

/// H(z) = int_0^z (1-cos u) u^{-1-alpha} du, alpha in (0,2), z >= 0.
double partial(double z, double alpha);

/// int_0^inf (1-cos u) u^{-1-alpha} du, evaluated by quadrature plus an
/// integration-by-parts tail (no closed form used).
double total(double alpha);

/// G(z) = int_z^inf (1-cos u) u^{-1-alpha} du = total - partial.
double upper(double z, double alpha);

/// Oscillatory tails int_Y^inf cos(u) u^{-s} du and the sine analogue,
/// Y > 0, s > 1. Repeated integration by parts with a rigorous remainder.
double cos_tail(double y, double s);
double sin_tail(double y, double s);

/// Cumulative table of H over [0, z_max] for fast repeated evaluation on
/// large frequency grids (cubic Hermite between nodes; exact derivative is
/// known at every node).
class PartialTable {
public:
    PartialTable(double alpha, double z_max, int nodes_per_unit = 256);
    double operator()(double z) const;  // falls back to direct eval beyond z_max
    double alpha() const { return alpha_; }

private:
    double alpha_;
    double dz_;
    double z_max_;
    std::vector<double> h_;  // H at i*dz
};

}  // namespace trig
}  // namespace stablelab
