#pragma once

#include <complex>
#include <string>
#include <vector>

#include "stablelab/rng.hpp"
#include "stablelab/spectral.hpp"
#include "stablelab/tail_models.hpp"

namespace stablelab {

/// One strictly stable variate with spectral weights (w_plus, w_minus) on
/// {+1,-1}; Chambers-Mallows-Stuck re-parametrized so the characteristic
/// function is exp(-w_plus psi_alpha(t) - w_minus psi_alpha(-t)).
double stable_1d(double alpha, double w_plus, double w_minus, RngStream& rng);

/// Totally skewed unit-scale variate, spectral mass at +1 (cf exp(-psi_alpha)).
double stable_one_sided(double alpha, RngStream& rng);

/// Multivariate stable sampler; continuous spectral measures are atomized
/// with 64*d symmetric atoms. For alpha=1 the deterministic drift
/// (2/pi) sum_j w_j ln(w_j) theta_j makes the characteristic function match
/// exp(-sum w_j psi_1(<lambda, theta_j>)).
class StableSampler {
public:
    explicit StableSampler(const StableLaw& law, int atoms_per_dim = 64);
    Vec draw(RngStream& rng) const;
    const std::vector<Atom>& atoms() const { return atoms_; }
    const Vec& drift() const { return drift_; }
    double alpha() const { return alpha_; }
    int dim() const { return dim_; }

private:
    double alpha_;
    int dim_;
    std::vector<Atom> atoms_;
    Vec drift_;
};

Vec stable_multivariate(const StableLaw& law, RngStream& rng);

/// Atomization used by StableSampler (exposed for the CF calibration tests).
std::vector<Atom> atomize_measure(const SpectralMeasure& nu, int atoms_per_dim);

Vec pareto_draw(const TailModel& model, RngStream& rng);
double dna_draw(const TailModel& model, RngStream& rng);

/// Draw from any registered tail model.
Vec model_draw(const TailModel& model, RngStream& rng);

/// S_n = (sum_i X_i - n omega_{n,alpha}) / (n^{1/alpha} sigma), compensated
/// accumulation. sigma/omega may be precomputed and passed in to avoid
/// repeated quadrature.
struct SumNormalization {
    double sigma;
    Vec omega;
};
SumNormalization sum_normalization(const TailModel& model, long long n);
Vec normalized_sum(const TailModel& model, long long n, RngStream& rng);
Vec normalized_sum(const TailModel& model, long long n, const SumNormalization& nrm,
                   RngStream& rng);

struct Provenance {
    std::string source_id;
    long long n = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
};

struct SampleBatch {
    int dim = 1;
    std::vector<Vec> points;
    Provenance provenance;
    void to_csv(const std::string& path, const std::string& config_hash = "") const;
};

SampleBatch sample_model(const TailModel& model, long long count, RngStream rng);
SampleBatch sample_normalized_sums(const TailModel& model, long long n, long long count,
                                   RngStream rng, unsigned workers = 0);
SampleBatch sample_stable(const StableLaw& law, long long count, RngStream rng);

/// Empirical characteristic function of a batch at one frequency.
Complex ecf(const std::vector<Vec>& points, const Vec& lambda);

/// max_k |ecf(lambda_k) - cf(lambda_k)| * sqrt(N), the sampler fidelity
/// statistic (threshold 4 in the acceptance tests).
double ecf_max_deviation(const std::vector<Vec>& points,
                         const std::function<Complex(const Vec&)>& cf,
                         const std::vector<Vec>& probes);

}  // namespace stablelab
