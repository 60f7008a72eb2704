#pragma once

#include <array>
#include <string>
#include <vector>

#include "stablelab/samplers.hpp"
#include "stablelab/spectral.hpp"
#include "stablelab/tail_models.hpp"
#include "stablelab/tv_metrics.hpp"

namespace stablelab {

/// Shared setup for the Monte Carlo operator estimates. `law` and `model`
/// must agree on alpha and dimension.
struct OperatorConfig {
    long long n = 64;  // global normalization in P_m / Q_m
    StableLaw law;
    TailModel model;
    long long mc_samples = 10000;
    std::uint64_t seed = 1;
    unsigned workers = 0;

    OperatorConfig(long long n_, StableLaw law_, TailModel model_, long long mc,
                   std::uint64_t seed_);
};

struct ValueSe {
    double value = 0.0;
    double se = 0.0;
};

/// MC estimate of E f(x + n^{-1/alpha} sum_{i<=m} Y_i); strict stability
/// collapses the sum to one draw scaled by (m/n)^{1/alpha}.
ValueSe apply_P(const OperatorConfig& cfg, const TestFunction& f, long long m, const Vec& x);

/// MC estimate of E f(x + (n^{1/alpha} sigma)^{-1} sum_{i<=m} (X_i - omega)).
ValueSe apply_Q(const OperatorConfig& cfg, const TestFunction& f, long long m, const Vec& x);

struct GapEstimate {
    double value = 0.0;
    double std_err = 0.0;
    long long n = 0;
    long long m = 1;
    std::string f_id;
    bool inconclusive = false;
    bool coupled = false;
};

/// Paired estimate of (Q_1 - P_1) f (x); quantile coupling on one uniform in
/// d=1 with a symmetric law, independent sampling otherwise.
GapEstimate one_step_gap(const OperatorConfig& cfg, const TestFunction& f, const Vec& x);

/// Closed-form one-step bound D(n, alpha, gamma, f) from the declared norm
/// bounds; the symmetric flag drops the first-order tail term for alpha < 1.
double d_bound(long long n, double alpha, double gamma, const std::array<double, 5>& norms,
               bool symmetric);

struct ProbeRow {
    double abscissa = 0.0;  // m/n or n
    double estimate = 0.0;
    double se = 0.0;
    double bound = 0.0;
};

struct SlopeProbe {
    double slope = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;
    bool inconclusive = false;
    std::vector<ProbeRow> rows;
};

/// Fits the decay exponent of ||grad^k P_m f|| in (m/n) over a dyadic grid of
/// m; central differences with common random numbers.
SlopeProbe gradient_decay_probe(const OperatorConfig& cfg, const TestFunction& f, int order,
                                const std::vector<long long>& m_grid);

struct GeneratorErrorEstimate {
    double value = 0.0;
    double se = 0.0;
    double bound = 0.0;  // constant-free reference scale
};

/// MC estimate of |E int_0^{1/n} [L f(x + Yhat_s) - L f(x)] ds| with the
/// generator evaluated by quadrature.
GeneratorErrorEstimate generator_error_probe(const OperatorConfig& cfg, const TestFunction& f,
                                             const Vec& x, const QuadConfig& quad = {});

/// Decay-slope fit of the generator error over an n-grid.
SlopeProbe generator_error_slope(OperatorConfig cfg, const TestFunction& f, const Vec& x,
                                 const std::vector<long long>& n_grid, const QuadConfig& quad);

}  // namespace stablelab
