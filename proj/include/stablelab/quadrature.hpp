#pragma once

#include <functional>

namespace stablelab {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;  // estimated
    int evaluations = 0;
    bool converged = true;
};

/// Adaptive Gauss-Kronrod (15-point) on a finite interval. Splits until the
/// local error estimate meets tol_abs + tol_rel*|whole|, throws numeric_error
/// if the recursion budget is exhausted while the estimate is still above
/// tolerance.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double tol_rel = 1e-10, double tol_abs = 1e-14,
                              int max_depth = 48);

/// Non-throwing variant: returns whatever was achieved, converged flag set.
QuadResult integrate_adaptive_nothrow(const std::function<double(double)>& f, double a, double b,
                                      double tol_rel = 1e-10, double tol_abs = 1e-14,
                                      int max_depth = 48);

/// Fixed-order Gauss-Legendre over [a,b] split into n equal panels.
double integrate_panels(const std::function<double(double)>& f, double a, double b, int panels);

/// 16-point Gauss-Legendre nodes/weights on (-1,1), positive half; nodes are
/// mirrored internally.
struct GaussLegendre16 {
    static const double nodes[8];
    static const double weights[8];
};

}  // namespace stablelab
