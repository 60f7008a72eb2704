#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "stablelab/rng.hpp"

namespace stablelab {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

MeanSe mean_se(const std::vector<double>& xs);

/// Ordinary least squares y = a + b x (+ c z when z is non-empty).
struct OlsFit {
    double intercept = 0.0;
    double slope = 0.0;
    double aux = 0.0;  // coefficient of the optional second regressor
    double r2 = 0.0;
    std::vector<double> residuals;
    bool has_aux = false;
};

OlsFit ols(const std::vector<double>& x, const std::vector<double>& y,
           const std::vector<double>& z = {});

/// Percentile bootstrap CI on the slope (and aux coefficient) by residual
/// resampling.
struct SlopeCi {
    double slope = 0.0;
    double lo = 0.0, hi = 0.0;
    double aux = 0.0;
    double aux_lo = 0.0, aux_hi = 0.0;
};

SlopeCi bootstrap_slope_ci(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<double>& z, int resamples, RngStream rng,
                           double level = 0.95);

/// Two-sample chi-square statistic over matched count vectors (equal sample
/// sizes assumed); bins with combined count below `min_count` are merged into
/// their right neighbour. Returns (statistic, dof actually used).
struct Chi2Result {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    int bins_used = 0;
};

Chi2Result chi2_two_sample(const std::vector<std::uint64_t>& counts_a,
                           const std::vector<std::uint64_t>& counts_b, double min_count = 10.0);

/// Regularized upper incomplete gamma Q(a, x) (survival of Gamma(a,1)).
double gamma_q(double a, double x);

/// Chi-square survival function with k degrees of freedom.
double chi2_sf(double x, int k);

}  // namespace stablelab
