#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "stablelab/samplers.hpp"
#include "stablelab/tail_models.hpp"

namespace stablelab {

/// Nonnegative density sampled on a uniform grid, from CF inversion.
struct GridDensity {
    double x_min = 0.0;
    double dx = 0.0;
    std::vector<double> values;
    double tail_mass_bound = 0.0;  // mass possibly outside the grid
    double neg_clip = 0.0;         // most negative raw value before clipping
    double integral = 0.0;         // trapezoid integral over the grid

    double x_at(std::size_t i) const { return x_min + static_cast<double>(i) * dx; }
};

struct DistanceEstimate {
    double value = 0.0;
    double error = 0.0;  // std error (MC methods) or numeric bound (exact)
    std::string method;  // "cf-inversion" | "histogram-lb" | "kolmogorov"
    long long n = 0;
    double alpha = 0.0;
    std::string model_id;
};

struct InversionConfig {
    double lambda_max = 0.0;  // 0: choose from exp(-c |l|^alpha) decay = 1e-8
    int n_nodes = 1 << 18;    // power of two
    double decay_alpha = 1.0;
    double decay_c = 1.0;
};

/// p(x) = (2 pi)^-1 int e^{-i lambda x} cf(lambda) dlambda on a uniform grid
/// (FFT-accelerated); reports truncation + clipping diagnostics.
GridDensity invert_cf_to_density(const std::function<Complex(double)>& cf,
                                 const InversionConfig& cfg);

/// Radial cosine integral over the complement of a centered ball,
/// I(rho) = int_{|x| >= rho/sigma} (1 - cos x_1) / |x|^{d+alpha} dx, d <= 3.
class ParetoCfContext {
public:
    ParetoCfContext(double alpha, int d, double z_cap = 4096.0);
    double alpha() const { return alpha_; }
    int dim() const { return d_; }
    double sigma() const { return sigma_; }
    double c0() const { return c0_; }      // alpha Gamma(d/2+1) / (pi^{d/2} d sigma^alpha)
    double radial_i(double rho) const;     // I(rho)
    double radial_i0() const { return i0_; }
    double delta_i(double rho) const;      // I(0) - I(rho), cancellation-free

    /// characteristic function of S_n at lambda_mag * e_1
    double cf_sn(long long n, double lambda_mag) const;
    /// exact log of cf_sn at e_1 (guards against nonpositive base)
    double log_cf_sn_e1(long long n) const;

private:
    double alpha_;
    int d_;
    double sigma_;
    double c0_;
    double i0_;
    std::shared_ptr<class trig_table_holder> table_;
};

Complex cf_of_Sn_pareto(long long n, double alpha, int d, double lambda_mag);

/// Normalized log-CF gap at the probe frequency e_1.
double delta_n(long long n, double alpha, int d);

/// Closed-form limit of delta_n (derived by the same L'Hopital computation
/// that defines it; see tests for the frozen values).
double delta_limit(double alpha, int d);

/// Model characteristic function for d=1 models (closed form for Pareto,
/// tail-integral quadrature for Dna1D with exact power-tail completion).
Complex model_cf_1d(const TailModel& model, double lambda);

struct TvOptions {
    int n_nodes = 1 << 18;
    double lambda_pad = 48.0;  // lower bound on the frequency cutoff
    bool richardson = true;    // re-run at half resolution for an error estimate
    int workers = 0;
};

/// Exact 1-D total variation between Law(S_n) and the limiting stable law via
/// characteristic-function inversion.
DistanceEstimate tv_1d_exact(const TailModel& model, long long n, const TvOptions& opts = {});

/// Finite-partition lower bound from two equal-size batches.
DistanceEstimate tv_histogram_lb(const SampleBatch& a, const SampleBatch& b, int bins,
                                 RngStream rng);

/// Kolmogorov distance from the same inversion pipeline (d=1).
DistanceEstimate kolmogorov_1d(const TailModel& model, long long n, const TvOptions& opts = {});

/// Both distances from one inversion run (the sweep uses this).
struct TvKolPair {
    DistanceEstimate tv;
    DistanceEstimate kolmogorov;
};
TvKolPair tv_and_kolmogorov_1d(const TailModel& model, long long n, const TvOptions& opts = {});

/// Quantile function of the symmetric 1-D standard stable law
/// (cf exp(-|lambda|^alpha)), built from an inversion table; asymptotic tail
/// inverse beyond the grid.
class Stable1dQuantile {
public:
    explicit Stable1dQuantile(double alpha, int n_nodes = 1 << 19);
    double operator()(double u) const;
    double alpha() const { return alpha_; }

private:
    double alpha_;
    double tail_coef_;  // P(Y > x) ~ tail_coef x^-alpha
    std::vector<double> xs_, cdf_;
};

}  // namespace stablelab
