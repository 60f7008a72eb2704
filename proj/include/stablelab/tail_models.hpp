#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "stablelab/spectral.hpp"

namespace stablelab {

/// Radial correction term eps(r) with its decay envelope |eps| <= K (1 ^ r^-gamma).
struct EpsFn {
    std::string name = "zero";
    std::function<double(double)> value;       // eps(r), r > 0
    std::function<double(double)> derivative;  // optional d/dr, enables densities
    // exact power tail eps(r) = tail_K * r^{-tail_gamma} for r >= 1; lets the
    // characteristic-function tails be completed in closed form
    bool power_tail = false;
    double tail_K = 0.0;
    double tail_gamma = 1.0;
    static EpsFn zero();
    static EpsFn inv();                          // min(1, 1/r)
    static EpsFn power(double K, double gamma);  // K * min(1, r^-gamma)
    static EpsFn scaled(const std::string& name, double K, double gamma);  // by registry name
};

/// Local lower-bound witness: the law dominates eps0 * Lebesgue on B(center, radius).
struct LlbWitness {
    double eps0 = 0.0;
    Vec center;
    double radius = 0.0;
};

/// Heavy-tailed source law with polar tail A + eps(r,theta) over r^alpha.
class TailModel {
public:
    enum class Kind { ParetoD, Dna1D, CustomPolar };

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    double alpha() const { return alpha_; }
    double tail_coefficient() const { return A_; }  // A in the tail identity
    double gamma() const { return gamma_; }
    double eps_bound() const { return K_; }
    const SpectralMeasure& nu() const { return nu_; }
    bool symmetric() const { return symmetric_; }
    const std::optional<LlbWitness>& llb() const { return llb_; }
    const std::string& id() const { return id_; }

    /// P(|X| >= r)
    double radial_tail(double r) const;
    /// d=1 only: P(X > t) and P(X < -t), t > 0.
    double tail_plus(double t) const;
    double tail_minus(double t) const;
    /// conditional radial tail for a fixed direction, min(1, (A+eps)/r^alpha)
    double radial_tail_given_dir(double r, const Vec& theta) const;
    double eps_at(double r, const Vec& theta) const;

    bool has_density() const;
    double density(const Vec& x) const;

    double w_plus() const { return w_plus_; }
    double w_minus() const { return w_minus_; }
    const EpsFn& eps_plus() const { return eps_plus_; }
    const EpsFn& eps_minus() const { return eps_minus_; }

    TailModel with_llb(LlbWitness w) const;
    TailModel with_id(std::string id) const;

    static TailModel pareto(int dim, double alpha);
    static TailModel dna_1d(double alpha, double A, double w_plus, double w_minus,
                            EpsFn eps_plus, EpsFn eps_minus, double gamma, double K);
    static TailModel custom_polar(int dim, double alpha, double A, SpectralMeasure nu,
                                  std::function<double(double, const Vec&)> eps, double gamma,
                                  double K, bool symmetric);

private:
    TailModel() = default;
    Kind kind_ = Kind::ParetoD;
    std::string id_;
    int dim_ = 1;
    double alpha_ = 1.0;
    double A_ = 1.0;
    double gamma_ = std::numeric_limits<double>::infinity();
    double K_ = 1.0;
    double w_plus_ = 0.5, w_minus_ = 0.5;
    EpsFn eps_plus_, eps_minus_;
    std::function<double(double, const Vec&)> eps_polar_;
    SpectralMeasure nu_ = SpectralMeasure::uniform(1);
    bool symmetric_ = true;
    std::optional<LlbWitness> llb_;
};

/// Pareto family of the optimal-rate lower bound.
TailModel pareto_model(int dim, double alpha);

/// sigma^alpha = A alpha int_0^inf (1-cos y)/y^{1+alpha} dy, by quadrature.
double sigma_scale(const TailModel& model);

struct OmegaShift {
    Vec value;
    double abs_error = 0.0;
};

/// Centering vector omega_{n,alpha}: full mean for alpha in (1,2), truncated
/// mean at radius sigma*n for alpha = 1, zero for alpha < 1.
OmegaShift omega_shift(const TailModel& model, long long n);

/// CDF of the 1-D normal-attraction model.
double dna_cdf(const TailModel& model, double x);

}  // namespace stablelab
