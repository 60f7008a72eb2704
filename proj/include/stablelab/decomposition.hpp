#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stablelab/rng.hpp"
#include "stablelab/samplers.hpp"
#include "stablelab/tail_models.hpp"

namespace stablelab {

/// Normalizer of the smooth compactly supported bump density
/// c * exp(-1/(tau^2 - |z-a|^2)) on B(a, tau); translation invariant.
double bump_normalizer(const Vec& a, double tau);
double bump_normalizer(int dim, double tau);

/// Light-tailed split: Law(X) = (1-p) Law(Xhat) + p Law(U) with Xhat the
/// smooth bump supported in B(a, tau) and p = 1 - eps0 / c.
class LightDecomposition {
public:
    double p() const { return p_; }
    const Vec& bump_center() const { return center_; }
    double bump_radius() const { return radius_; }
    double bump_c() const { return c_; }
    const TailModel& source() const { return source_; }

    double bump_density(const Vec& z) const;
    Vec draw_bump(RngStream& rng) const;       // Xhat
    Vec draw_remainder(RngStream& rng) const;  // U
    /// Bernoulli(p) switch between U and Xhat; optional weight override for
    /// negative-control experiments.
    Vec draw_mixture(RngStream& rng, double p_override = -1.0) const;

private:
    friend LightDecomposition light_decompose(const TailModel&);
    TailModel source_ = TailModel::pareto(1, 1.0);
    double p_ = 0.0;
    Vec center_;
    double radius_ = 0.0;
    double c_ = 0.0;
    double eps0_ = 0.0;
};

LightDecomposition light_decompose(const TailModel& model);

/// Heavy-tailed split: Law(X) = (1-q) Law(Xtilde) + q Law(V), where Xtilde is
/// the |x|^{alpha - alpha_tilde} ^ 1 tilt of X and carries tail index
/// alpha_tilde.
class HeavyDecomposition {
public:
    double q() const { return q_; }
    double q_std_error() const { return q_se_; }
    double alpha_tilde() const { return alpha_tilde_; }
    double a_tilde() const { return a_tilde_; }
    double eps_tilde_bound() const { return k_tilde_; }
    const TailModel& source() const { return source_; }

    Vec draw_tilted(RngStream& rng) const;     // Xtilde
    Vec draw_remainder(RngStream& rng) const;  // V
    Vec draw_mixture(RngStream& rng, double q_override = -1.0) const;

private:
    friend HeavyDecomposition heavy_decompose(const TailModel&, double);
    TailModel source_ = TailModel::pareto(1, 1.0);
    double q_ = 0.0;
    double q_se_ = 0.0;
    double alpha_tilde_ = 1.0;
    double a_tilde_ = 1.0;
    double k_tilde_ = 0.0;
};

HeavyDecomposition heavy_decompose(const TailModel& model, double alpha_tilde);

/// Two-sample chi-square certification that a decomposition's mixture
/// reproduces the source law.
struct TestReport {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    bool pass = false;
    long long n_samples = 0;
    int bins_requested = 0;
    int bins_used = 0;
    std::vector<double> bin_edges;
    std::uint64_t master_seed = 0;
    std::string subject;
    std::string to_json() const;
};

/// Draw callbacks: mixture vs direct source; both 1-D projected onto the
/// radius for d >= 2.
TestReport certify_mixture(const LightDecomposition& d, long long n_samples, int bins,
                           RngStream rng, double p_override = -1.0, unsigned workers = 0);
TestReport certify_mixture(const HeavyDecomposition& d, long long n_samples, int bins,
                           RngStream rng, double q_override = -1.0, unsigned workers = 0);

/// Monte Carlo validation of a local-lower-bound witness: empirical mass of
/// every sub-cell of B(a, tau) must be at least eps0 * volume within noise.
struct WitnessCheck {
    bool valid = true;
    double worst_margin = 0.0;  // min over cells of (empirical - eps0*vol)/se
};
WitnessCheck validate_llb(const TailModel& model, const LlbWitness& w, long long n_samples,
                          RngStream rng);

}  // namespace stablelab
