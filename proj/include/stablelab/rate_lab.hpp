#pragma once

#include <string>
#include <utility>
#include <vector>

#include "stablelab/tail_models.hpp"
#include "stablelab/tv_metrics.hpp"

namespace stablelab {

struct RateScenario {
    std::string id;
    TailModel model = TailModel::pareto(1, 1.0);
    std::vector<long long> n_grid;
    std::string method = "cf-inversion";  // or "histogram-lb"
    std::uint64_t seed = 1;
    bool symmetric = true;
    long long mc_batch = 200000;  // per-n sample size for the MC method
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;
    double r2 = 0.0;
    std::vector<double> residuals;
    bool has_ln_regressor = false;
    double ln_exponent = 0.0;       // coefficient of ln ln n, when requested
    double ln_lo = 0.0, ln_hi = 0.0;
    int dropped_nonpositive = 0;
};

struct SweepRow {
    long long n = 0;
    DistanceEstimate estimate;
    bool failed = false;
    std::string error;
};

/// theoretical TV convergence rate of the main upper-bound theorem
double lambda_rate(long long n, double alpha, double gamma, bool symmetric);

/// optimal-rate exponent -((2-alpha) ^ alpha)/alpha for the Pareto family
double pareto_rate_exponent(double alpha);

/// exponent registry keyed by scenario parameters, so tests cannot hard-code
/// stale values
double theoretical_exponent(double alpha, double gamma, bool symmetric);

std::vector<SweepRow> run_sweep(const RateScenario& scenario, const TvOptions& opts = {});

RateFit fit_loglog(const std::vector<std::pair<double, double>>& n_vs_distance,
                   bool with_lnln = false, std::uint64_t seed = 7);

struct HeadlineReport {
    bool verdict_n_inverse = false;
    bool conclusive = true;
    double ratio_max_over_min = 0.0;  // of n * d_n across the grid
    double ln_exponent = 0.0;
    double ln_ci_lo = 0.0, ln_ci_hi = 0.0;
    double rss_plain = 0.0;   // residual sum for d = c / n
    double rss_logsq = 0.0;   // residual sum for d = c (ln n)^2 / n
    std::string message;
    std::vector<std::pair<double, double>> table;
    std::string to_json() const;
};

/// alpha = 1 discrimination: bounded n d_n ratio and ln-exponent CI that
/// excludes 2 mean the plain 1/n law.
HeadlineReport headline_alpha1(const std::vector<long long>& n_grid, const TvOptions& opts = {});

/// Same verdict logic on an externally supplied (n, d_n) table (synthetic
/// controls use this).
HeadlineReport headline_from_table(const std::vector<std::pair<double, double>>& table,
                                   std::uint64_t seed = 7);

void sweep_to_csv(const std::vector<SweepRow>& rows, const std::string& path,
                  const std::string& provenance);

}  // namespace stablelab
