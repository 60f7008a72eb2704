#include "stablelab/samplers.hpp"

#include <cmath>

#include "stablelab/csvio.hpp"
#include "stablelab/errors.hpp"
#include "stablelab/parallel.hpp"
#include "stablelab/quadrature.hpp"

namespace stablelab {

namespace {
constexpr double kPi = 3.14159265358979323846;

// CMS for the 1-parametrization cf exp(-|t|^a (1 - i b sgn(t) tan(pi a/2))),
// a != 1. The mapping is locked by the empirical-CF fidelity tests.
double cms_non_unit(double alpha, double beta, RngStream& rng) {
    const double theta = rng.uniform_angle_half();
    const double w = rng.exponential();
    const double tn = std::tan(kPi * alpha / 2.0);
    const double theta0 = std::atan(beta * tn) / alpha;
    const double s = std::pow(1.0 + beta * beta * tn * tn, 0.5 / alpha);
    const double a1 = alpha * (theta + theta0);
    return s * std::sin(a1) / std::pow(std::cos(theta), 1.0 / alpha) *
           std::pow(std::cos(theta - a1) / w, (1.0 - alpha) / alpha);
}

// alpha = 1 with skew, cf exp(-|t|(1 + i b (2/pi) sgn(t) ln|t|)).
double cms_unit(double beta, RngStream& rng) {
    const double theta = rng.uniform_angle_half();
    if (beta == 0.0) return std::tan(theta);
    const double w = rng.exponential();
    const double h = kPi / 2.0 + beta * theta;
    return (2.0 / kPi) *
           (h * std::tan(theta) - beta * std::log((kPi / 2.0) * w * std::cos(theta) / h));
}
}  // namespace

double stable_one_sided(double alpha, RngStream& rng) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw domain_error("alpha must lie in (0,2)");
    if (alpha == 1.0) return cms_unit(1.0, rng);
    return cms_non_unit(alpha, 1.0, rng);
}

double stable_1d(double alpha, double w_plus, double w_minus, RngStream& rng) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw domain_error("alpha must lie in (0,2)");
    if (std::fabs(w_plus + w_minus - 1.0) > 1e-12)
        throw domain_error("spectral weights must sum to 1");
    if (w_plus < 0.0 || w_minus < 0.0) throw domain_error("weights must be nonnegative");
    const double beta = w_plus - w_minus;
    if (alpha == 1.0) {
        if (std::fabs(beta) > 1e-12)
            throw domain_error("alpha=1 requires w_plus == w_minus (mean-zero measure)");
        return cms_unit(0.0, rng);
    }
    return cms_non_unit(alpha, beta, rng);
}

std::vector<Atom> atomize_measure(const SpectralMeasure& nu, int atoms_per_dim) {
    const int d = nu.dim();
    switch (nu.kind()) {
        case SpectralMeasure::Kind::Atoms:
            return nu.atom_list();
        case SpectralMeasure::Kind::Uniform:
        case SpectralMeasure::Kind::Density: {
            const bool unif = nu.kind() == SpectralMeasure::Kind::Uniform;
            std::vector<Atom> atoms;
            if (d == 1) {
                const double wp = unif ? 0.5 : nu.integrate([](const Vec& t) {
                    return t[0] > 0 ? 1.0 : 0.0;
                });
                atoms.push_back({{1.0}, wp});
                atoms.push_back({{-1.0}, 1.0 - wp});
                return atoms;
            }
            const int m = std::max(4, atoms_per_dim * d);
            if (d == 2) {
                // even count keeps the set symmetric under theta -> -theta
                const int mm = m + (m % 2);
                double mass = 0.0;
                for (int j = 0; j < mm; ++j) {
                    const double phi = 2.0 * kPi * (j + 0.5) / mm;
                    Vec th{std::cos(phi), std::sin(phi)};
                    double w = 1.0 / mm;
                    if (!unif) {
                        w = 0.0;  // cell-averaged density weight
                        const double a = 2.0 * kPi * j / mm, b = 2.0 * kPi * (j + 1) / mm;
                        const int sub = 8;
                        for (int s = 0; s < sub; ++s) {
                            const double p = a + (b - a) * (s + 0.5) / sub;
                            Vec tp{std::cos(p), std::sin(p)};
                            w += nu.density_value(tp) * (b - a) / sub;
                        }
                    }
                    atoms.push_back({th, w});
                    mass += w;
                }
                for (auto& a : atoms) a.weight *= nu.total_mass() / mass;
                return atoms;
            }
            if (d == 3) {
                // product grid: 16 Gauss nodes in u = cos(theta), uniform phi ring
                int nphi = std::max(8, m / 16);
                nphi += nphi % 2;
                double mass = 0.0;
                for (int i = 0; i < 8; ++i) {
                    for (int sgn = -1; sgn <= 1; sgn += 2) {
                        const double u = sgn * GaussLegendre16::nodes[i];
                        const double wu = GaussLegendre16::weights[i];
                        const double su = std::sqrt(std::max(0.0, 1.0 - u * u));
                        for (int j = 0; j < nphi; ++j) {
                            const double phi = 2.0 * kPi * (j + 0.5) / nphi;
                            Vec th{su * std::cos(phi), su * std::sin(phi), u};
                            double w = wu / (2.0 * nphi);  // uniform probability weight
                            if (!unif) w *= 4.0 * kPi * nu.density_value(th);
                            atoms.push_back({th, w});
                            mass += w;
                        }
                    }
                }
                for (auto& a : atoms) a.weight *= nu.total_mass() / mass;
                return atoms;
            }
            throw domain_error("atomization beyond d=3 is not supported");
        }
    }
    return {};
}

StableSampler::StableSampler(const StableLaw& law, int atoms_per_dim)
    : alpha_(law.alpha()), dim_(law.dim()), drift_(law.dim(), 0.0) {
    atoms_ = atomize_measure(law.nu(), atoms_per_dim);
    if (alpha_ == 1.0) {
        for (const auto& a : atoms_) {
            const double c = (2.0 / kPi) * a.weight * std::log(a.weight);
            for (int i = 0; i < dim_; ++i) drift_[i] += c * a.direction[i];
        }
    }
}

Vec StableSampler::draw(RngStream& rng) const {
    Vec y = drift_;
    for (const auto& a : atoms_) {
        const double z = stable_one_sided(alpha_, rng);
        const double s = std::pow(a.weight, 1.0 / alpha_) * z;
        for (int i = 0; i < dim_; ++i) y[i] += s * a.direction[i];
    }
    return y;
}

Vec stable_multivariate(const StableLaw& law, RngStream& rng) {
    return StableSampler(law).draw(rng);
}

Vec pareto_draw(const TailModel& model, RngStream& rng) {
    if (model.kind() != TailModel::Kind::ParetoD) throw domain_error("not a Pareto model");
    const double r = std::pow(rng.u01(), -1.0 / model.alpha());
    if (model.dim() == 1) return {rng.bernoulli(0.5) ? r : -r};
    Vec dir = rng.unit_vector(model.dim());
    for (auto& c : dir) c *= r;
    return dir;
}

double dna_draw(const TailModel& model, RngStream& rng) {
    if (model.dim() != 1) throw domain_error("dna_draw is 1-D only");
    const double u = rng.u01();
    // invert F by bracketed bisection; F(x) = 1 - tail_plus(x) for x >= 0
    const bool positive = u >= model.w_minus();
    const double target = positive ? 1.0 - u : u;  // tail value to match
    auto tail = [&](double t) { return positive ? model.tail_plus(t) : model.tail_minus(t); };
    double lo = 0.0, hi = 1.0;
    while (tail(hi) > target && hi < 1e300) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (tail(mid) > target) lo = mid;
        else hi = mid;
        if (hi - lo < 1e-13 * (1.0 + hi)) break;
    }
    const double t = 0.5 * (lo + hi);
    return positive ? t : -t;
}

namespace {
Vec custom_polar_draw(const TailModel& model, RngStream& rng) {
    // direction from nu, radius from the per-direction radial tail
    Vec th;
    switch (model.nu().kind()) {
        case SpectralMeasure::Kind::Atoms: {
            const auto& atoms = model.nu().atom_list();
            double u = rng.u01() * model.nu().total_mass();
            std::size_t pick = atoms.size() - 1;
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                if (u < atoms[i].weight) {
                    pick = i;
                    break;
                }
                u -= atoms[i].weight;
            }
            th = atoms[pick].direction;
            break;
        }
        case SpectralMeasure::Kind::Uniform:
            th = rng.unit_vector(model.dim());
            break;
        case SpectralMeasure::Kind::Density:
            throw domain_error("sampling a density spectral measure is not supported");
    }
    const double u = rng.u01();
    auto tail = [&](double r) { return model.radial_tail_given_dir(r, th); };
    double lo = 0.0, hi = 1.0;
    while (tail(hi) > u && hi < 1e300) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (tail(mid) > u) lo = mid;
        else hi = mid;
        if (hi - lo < 1e-13 * (1.0 + hi)) break;
    }
    Vec x = th;
    const double r = 0.5 * (lo + hi);
    for (auto& c : x) c *= r;
    return x;
}
}  // namespace

Vec model_draw(const TailModel& model, RngStream& rng) {
    switch (model.kind()) {
        case TailModel::Kind::ParetoD:
            return pareto_draw(model, rng);
        case TailModel::Kind::Dna1D:
            return {dna_draw(model, rng)};
        case TailModel::Kind::CustomPolar:
            return custom_polar_draw(model, rng);
    }
    throw domain_error("unknown model kind");
}

SumNormalization sum_normalization(const TailModel& model, long long n) {
    return {sigma_scale(model), omega_shift(model, n).value};
}

Vec normalized_sum(const TailModel& model, long long n, const SumNormalization& nrm,
                   RngStream& rng) {
    const int d = model.dim();
    Vec sum(d, 0.0), comp(d, 0.0);
    for (long long i = 0; i < n; ++i) {
        const Vec x = model_draw(model, rng);
        for (int k = 0; k < d; ++k) {  // Neumaier compensation
            const double xi = x[k] - nrm.omega[k];
            const double t = sum[k] + xi;
            comp[k] += (std::fabs(sum[k]) >= std::fabs(xi)) ? (sum[k] - t) + xi : (xi - t) + sum[k];
            sum[k] = t;
        }
    }
    const double scale = 1.0 / (std::pow(static_cast<double>(n), 1.0 / model.alpha()) * nrm.sigma);
    Vec out(d);
    for (int k = 0; k < d; ++k) out[k] = (sum[k] + comp[k]) * scale;
    return out;
}

Vec normalized_sum(const TailModel& model, long long n, RngStream& rng) {
    return normalized_sum(model, n, sum_normalization(model, n), rng);
}

void SampleBatch::to_csv(const std::string& path, const std::string& config_hash) const {
    CsvWriter w(path);
    w.comment("source=" + provenance.source_id + " n=" + std::to_string(provenance.n) +
              " master_seed=" + std::to_string(provenance.master_seed) +
              " stream=" + std::to_string(provenance.stream_id) +
              (config_hash.empty() ? "" : " config_hash=" + config_hash));
    std::vector<std::string> header;
    for (int i = 0; i < dim; ++i) header.push_back("x" + std::to_string(i + 1));
    w.row(header);
    for (const auto& p : points) {
        std::vector<std::string> cells;
        for (double c : p) cells.push_back(CsvWriter::num(c));
        w.row(cells);
    }
}

SampleBatch sample_model(const TailModel& model, long long count, RngStream rng) {
    SampleBatch b;
    b.dim = model.dim();
    b.provenance = {model.id(), count, rng.master_seed(), rng.stream_id()};
    b.points.reserve(count);
    for (long long i = 0; i < count; ++i) b.points.push_back(model_draw(model, rng));
    return b;
}

SampleBatch sample_normalized_sums(const TailModel& model, long long n, long long count,
                                   RngStream rng, unsigned workers) {
    SampleBatch b;
    b.dim = model.dim();
    b.provenance = {model.id() + "|sum_n=" + std::to_string(n), count, rng.master_seed(),
                    rng.stream_id()};
    b.points.assign(count, Vec());
    const SumNormalization nrm = sum_normalization(model, n);
    const long long chunk = 4096;
    const std::size_t n_chunks = static_cast<std::size_t>((count + chunk - 1) / chunk);
    run_chunks(
        n_chunks,
        [&](std::size_t c) {
            RngStream sub = rng.substream(c);
            const long long lo = static_cast<long long>(c) * chunk;
            const long long hi = std::min<long long>(count, lo + chunk);
            for (long long i = lo; i < hi; ++i)
                b.points[i] = normalized_sum(model, n, nrm, sub);
        },
        workers);
    return b;
}

SampleBatch sample_stable(const StableLaw& law, long long count, RngStream rng) {
    SampleBatch b;
    b.dim = law.dim();
    b.provenance = {"stable:alpha=" + std::to_string(law.alpha()), count, rng.master_seed(),
                    rng.stream_id()};
    b.points.reserve(count);
    const StableSampler sampler(law);
    for (long long i = 0; i < count; ++i) b.points.push_back(sampler.draw(rng));
    return b;
}

Complex ecf(const std::vector<Vec>& points, const Vec& lambda) {
    double re = 0.0, im = 0.0;
    for (const auto& p : points) {
        const double t = dot(lambda, p);
        re += std::cos(t);
        im += std::sin(t);
    }
    const double n = static_cast<double>(points.size());
    return {re / n, im / n};
}

double ecf_max_deviation(const std::vector<Vec>& points,
                         const std::function<Complex(const Vec&)>& cf,
                         const std::vector<Vec>& probes) {
    double worst = 0.0;
    for (const auto& l : probes) {
        const Complex diff = ecf(points, l) - cf(l);
        worst = std::max(worst, std::abs(diff));
    }
    return worst * std::sqrt(static_cast<double>(points.size()));
}

}  // namespace stablelab
