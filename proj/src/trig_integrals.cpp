#include "stablelab/trig_integrals.hpp"

#include <cmath>

#include "stablelab/errors.hpp"
#include "stablelab/quadrature.hpp"

namespace stablelab {
namespace trig {

namespace {

constexpr double kSeriesCut = 4.0;
constexpr double kTailStart = 64.0;

// (1-cos u)/u^{1+a}, stable near zero.
double integrand(double u, double a) {
    if (u < 1e-8) return 0.5 * std::pow(u, 1.0 - a);
    return (1.0 - std::cos(u)) / std::pow(u, 1.0 + a);
}

// Alternating series: sum_{k>=1} (-1)^{k+1} z^{2k-a} / ((2k)! (2k-a)).
double partial_series(double z, double a) {
    if (z <= 0.0) return 0.0;
    const double zma = std::pow(z, -a);
    double term = z * z / 2.0;  // z^{2k}/(2k)! at k=1
    double sum = 0.0;
    const double z2 = z * z;
    for (int k = 1; k < 60; ++k) {
        const double contrib = term * zma / (2.0 * k - a);
        sum += (k % 2 == 1) ? contrib : -contrib;
        term *= z2 / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
        if (term * zma / (2.0 * k + 2.0 - a) < 1e-18 * std::fabs(sum) + 1e-300) return sum;
    }
    return sum;
}

}  // namespace

double partial(double z, double alpha) {
    if (alpha <= 0.0 || alpha >= 2.0) throw domain_error("alpha must be in (0,2)");
    if (z <= 0.0) return 0.0;
    if (z <= kSeriesCut) return partial_series(z, alpha);
    double acc = partial_series(kSeriesCut, alpha);
    // Gauss panels of length <= pi/2 resolve the oscillation far below 1e-14.
    const int panels = static_cast<int>(std::ceil((z - kSeriesCut) / 1.5));
    acc += integrate_panels([alpha](double u) { return integrand(u, alpha); }, kSeriesCut, z,
                            panels);
    return acc;
}

double cos_tail(double y, double s) {
    // int_y^inf cos(u) u^{-s}: IBP ladder
    //   C(s) = -sin(y) y^{-s} + s * S(s+1),   S(s) = cos(y) y^{-s} - s * C(s+1)
    // truncated after 8 boundary terms; remainder <= s(s+1)...(s+7) y^{-s-7}/(s+7).
    const double siny = std::sin(y), cosy = std::cos(y);
    double coef = 1.0, sign = 1.0, sc = s, ypow = std::pow(y, -s);
    double acc = 0.0;
    bool expanding_c = true;
    for (int k = 0; k < 8; ++k) {
        acc += sign * coef * (expanding_c ? -siny : cosy) * ypow;
        coef *= sc;
        if (!expanding_c) sign = -sign;
        sc += 1.0;
        ypow /= y;
        expanding_c = !expanding_c;
    }
    return acc;
}

double sin_tail(double y, double s) {
    // S(s) = cos(y) y^{-s} - s * C(s+1); reuse the cosine ladder shifted once.
    return std::cos(y) * std::pow(y, -s) - s * cos_tail(y, s + 1.0);
}

double total(double alpha) {
    if (alpha <= 0.0 || alpha >= 2.0) throw domain_error("alpha must be in (0,2)");
    const double y = kTailStart;
    const double head = partial(y, alpha);
    const double tail = std::pow(y, -alpha) / alpha - cos_tail(y, 1.0 + alpha);
    return head + tail;
}

double upper(double z, double alpha) {
    if (z >= kTailStart)
        return std::pow(z, -alpha) / alpha - cos_tail(z, 1.0 + alpha);
    return total(alpha) - partial(z, alpha);
}

PartialTable::PartialTable(double alpha, double z_max, int nodes_per_unit)
    : alpha_(alpha), z_max_(z_max) {
    const int n = std::max(16, static_cast<int>(std::ceil(z_max * nodes_per_unit))) + 1;
    dz_ = z_max / (n - 1);
    h_.resize(n);
    h_[0] = 0.0;
    // single cumulative pass, 8-point Gauss per cell
    for (int i = 1; i < n; ++i) {
        const double a = (i - 1) * dz_, b = i * dz_;
        if (b <= kSeriesCut) {
            h_[i] = partial_series(b, alpha_);
        } else {
            h_[i] = h_[i - 1] +
                    integrate_panels([this](double u) { return integrand(u, alpha_); }, a, b, 1);
        }
    }
}

double PartialTable::operator()(double z) const {
    if (z <= 0.0) return 0.0;
    if (z <= kSeriesCut) return partial_series(z, alpha_);  // exact, cheap, no endpoint issues
    if (z >= z_max_) return partial(z, alpha_);
    const double t = z / dz_;
    int i = static_cast<int>(t);
    if (i >= static_cast<int>(h_.size()) - 1) i = static_cast<int>(h_.size()) - 2;
    const double x0 = i * dz_;
    const double f0 = h_[i], f1 = h_[i + 1];
    const double d0 = integrand(x0, alpha_), d1 = integrand(x0 + dz_, alpha_);
    // cubic Hermite
    const double u = (z - x0) / dz_;
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * f0 + (u3 - 2 * u2 + u) * dz_ * d0 + (-2 * u3 + 3 * u2) * f1 +
           (u3 - u2) * dz_ * d1;
}

}  // namespace trig
}  // namespace stablelab
