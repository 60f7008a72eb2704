#include "stablelab/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stablelab/errors.hpp"
#include "stablelab/parallel.hpp"
#include "stablelab/quadrature.hpp"
#include "stablelab/stats.hpp"

namespace stablelab {

namespace {
constexpr double kPi = 3.14159265358979323846;

double bump_profile(double rho2, double tau) {  // exp(-1/(tau^2 - rho^2)) on rho < tau
    const double gap = tau * tau - rho2;
    return gap > 0.0 ? std::exp(-1.0 / gap) : 0.0;
}
}  // namespace

double bump_normalizer(int dim, double tau) {
    if (!(tau > 0.0)) throw domain_error("tau must be positive");
    double integral = 0.0;
    switch (dim) {
        case 1:
            integral = integrate_adaptive(
                           [tau](double z) { return bump_profile(z * z, tau); }, -tau, tau, 1e-10,
                           1e-16)
                           .value;
            break;
        case 2:
            integral = 2.0 * kPi *
                       integrate_adaptive(
                           [tau](double r) { return r * bump_profile(r * r, tau); }, 0.0, tau,
                           1e-10, 1e-16)
                           .value;
            break;
        case 3:
            integral = 4.0 * kPi *
                       integrate_adaptive(
                           [tau](double r) { return r * r * bump_profile(r * r, tau); }, 0.0, tau,
                           1e-10, 1e-16)
                           .value;
            break;
        default:
            throw domain_error("bump normalizer supports d <= 3");
    }
    if (!(integral > 0.0)) throw numeric_error("bump integral underflowed");
    return 1.0 / integral;
}

double bump_normalizer(const Vec& a, double tau) {
    return bump_normalizer(static_cast<int>(a.size()), tau);
}

// ---------------------------------------------------------------------------
// Light decomposition

double LightDecomposition::bump_density(const Vec& z) const {
    double rho2 = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double d = z[i] - center_[i];
        rho2 += d * d;
    }
    return c_ * bump_profile(rho2, radius_);
}

Vec LightDecomposition::draw_bump(RngStream& rng) const {
    const int d = static_cast<int>(center_.size());
    const double sup = std::exp(-1.0 / (radius_ * radius_));
    for (;;) {
        // uniform point in B(center, radius)
        Vec z = rng.unit_vector(d);
        const double r = radius_ * std::pow(rng.u01(), 1.0 / d);
        double rho2 = 0.0;
        for (int i = 0; i < d; ++i) {
            z[i] = center_[i] + r * z[i];
            const double dd = z[i] - center_[i];
            rho2 += dd * dd;
        }
        if (rng.u01() * sup <= bump_profile(rho2, radius_)) return z;
    }
}

Vec LightDecomposition::draw_remainder(RngStream& rng) const {
    for (;;) {
        Vec x = model_draw(source_, rng);
        const double pm = source_.density(x);
        const double reject = (1.0 - p_) * bump_density(x);
        if (reject <= 0.0) return x;
        if (pm <= 0.0) continue;  // cannot happen where the bump lives
        const double accept = 1.0 - reject / pm;
        if (rng.u01() <= accept) return x;
    }
}

Vec LightDecomposition::draw_mixture(RngStream& rng, double p_override) const {
    const double p = p_override >= 0.0 ? p_override : p_;
    return rng.bernoulli(p) ? draw_remainder(rng) : draw_bump(rng);
}

LightDecomposition light_decompose(const TailModel& model) {
    if (!model.llb())
        throw domain_error("light decomposition needs a local-lower-bound witness");
    if (!model.has_density())
        throw domain_error("light decomposition needs a pointwise density for the U-sampler");
    const LlbWitness& w = *model.llb();
    LightDecomposition d;
    d.source_ = model;
    d.center_ = w.center;
    d.radius_ = w.radius;
    d.eps0_ = w.eps0;
    d.c_ = bump_normalizer(w.center, w.radius);
    const double p = 1.0 - w.eps0 / d.c_;
    if (!(p > 0.0 && p < 1.0))
        throw check_error("witness invalid: p = 1 - eps0/c is outside (0,1)");
    d.p_ = p;
    // acceptance probability of the U-sampler must be a probability on a
    // probe grid spanning the bump support
    const int probes = 2048;
    for (int i = 0; i <= probes; ++i) {
        Vec z = w.center;
        z[0] += w.radius * (2.0 * i / probes - 1.0) * 0.999;
        const double pm = model.density(z);
        const double reject = (1.0 - p) * d.bump_density(z);
        if (reject > pm * (1.0 + 1e-9) + 1e-300)
            throw check_error("witness invalid: eps0 too large at probe offset " +
                              std::to_string(z[0] - w.center[0]));
    }
    return d;
}

// ---------------------------------------------------------------------------
// Heavy decomposition

Vec HeavyDecomposition::draw_tilted(RngStream& rng) const {
    const double expo = source_.alpha() - alpha_tilde_;
    for (;;) {
        Vec x = model_draw(source_, rng);
        const double accept = std::min(1.0, std::pow(norm2(x), expo));
        if (rng.u01() <= accept) return x;
    }
}

Vec HeavyDecomposition::draw_remainder(RngStream& rng) const {
    const double expo = source_.alpha() - alpha_tilde_;
    for (;;) {
        Vec x = model_draw(source_, rng);
        const double accept = 1.0 - std::min(1.0, std::pow(norm2(x), expo));
        if (rng.u01() <= accept) return x;
    }
}

Vec HeavyDecomposition::draw_mixture(RngStream& rng, double q_override) const {
    const double q = q_override >= 0.0 ? q_override : q_;
    return rng.bernoulli(q) ? draw_remainder(rng) : draw_tilted(rng);
}

HeavyDecomposition heavy_decompose(const TailModel& model, double alpha_tilde) {
    const double alpha = model.alpha();
    if (!(alpha_tilde > alpha && alpha_tilde < 2.0))
        throw domain_error("alpha_tilde must lie in (alpha, 2)");
    HeavyDecomposition d;
    d.source_ = model;
    d.alpha_tilde_ = alpha_tilde;
    // E[|X|^{alpha - alpha_tilde} ^ 1] = 1 + (alpha - alpha_tilde) *
    //   int_1^inf r^{alpha - alpha_tilde - 1} P(|X| >= r) dr  (any radial law)
    const double expo = alpha - alpha_tilde;
    const double big = 1e6;
    auto integrand = [&](double r) { return std::pow(r, expo - 1.0) * model.radial_tail(r); };
    const double body = integrate_adaptive(integrand, 1.0, big, 1e-10, 1e-14).value;
    // A-part completion beyond `big`; eps part bounded by K r^{-gamma}
    const double a_tail =
        model.tail_coefficient() * std::pow(big, expo - alpha) / (alpha_tilde);
    double err = 0.0;
    if (!std::isinf(model.gamma()))
        err = model.eps_bound() * std::pow(big, expo - alpha - model.gamma()) /
              (alpha_tilde + model.gamma());
    const double expectation = 1.0 + expo * (body + a_tail);
    d.q_ = 1.0 - expectation;
    d.q_se_ = err + 1e-9;
    if (!(d.q_ > 1e-9 && d.q_ < 1.0 - 1e-9))
        throw check_error("degenerate decomposition: q = " + std::to_string(d.q_));
    d.a_tilde_ = model.tail_coefficient() * alpha / ((1.0 - d.q_) * alpha_tilde);
    const double g = std::isinf(model.gamma()) ? 1.0 : model.gamma();
    d.k_tilde_ = 2.0 * model.tail_coefficient() / (1.0 - d.q_) +
                 model.eps_bound() * (g + 2.0 * alpha_tilde - alpha) /
                     ((1.0 - d.q_) * (g + alpha_tilde));
    return d;
}

// ---------------------------------------------------------------------------
// Certification

namespace {

double project(const Vec& x) { return x.size() == 1 ? x[0] : norm2(x); }

TestReport certify_impl(const std::function<Vec(RngStream&)>& mixture,
                        const std::function<Vec(RngStream&)>& direct, long long n_samples,
                        int bins, RngStream rng, const std::string& subject, unsigned workers) {
    if (n_samples < 100000) throw domain_error("certification needs at least 1e5 samples");
    if (bins < 4) throw domain_error("need at least 4 bins");
    TestReport rep;
    rep.subject = subject;
    rep.n_samples = n_samples;
    rep.bins_requested = bins;
    rep.master_seed = rng.master_seed();

    // pass 1: edges from a pilot of the direct sampler (equal probability)
    const long long pilot_n = std::min<long long>(n_samples, 200000);
    std::vector<double> pilot(pilot_n);
    {
        RngStream pr = rng.substream(0xE0);
        for (long long i = 0; i < pilot_n; ++i) pilot[i] = project(direct(pr));
        std::sort(pilot.begin(), pilot.end());
    }
    std::vector<double> edges(bins - 1);
    for (int b = 1; b < bins; ++b) {
        const double qpos = static_cast<double>(b) / bins * (pilot_n - 1);
        edges[b - 1] = pilot[static_cast<std::size_t>(qpos)];
    }
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    rep.bin_edges = edges;
    const int nb = static_cast<int>(edges.size()) + 1;  // includes both overflow sides

    auto bin_of = [&](double v) {
        return static_cast<std::size_t>(
            std::upper_bound(edges.begin(), edges.end(), v) - edges.begin());
    };

    const long long chunk = 65536;
    const std::size_t n_chunks = static_cast<std::size_t>((n_samples + chunk - 1) / chunk);
    std::vector<std::vector<std::uint64_t>> ca(n_chunks), cb(n_chunks);
    run_chunks(
        n_chunks,
        [&](std::size_t c) {
            RngStream s1 = rng.substream(2 * c + 1);
            RngStream s2 = rng.substream(2 * c + 2);
            std::vector<std::uint64_t> a(nb, 0), b(nb, 0);
            const long long lo = static_cast<long long>(c) * chunk;
            const long long hi = std::min<long long>(n_samples, lo + chunk);
            for (long long i = lo; i < hi; ++i) {
                ++a[bin_of(project(mixture(s1)))];
                ++b[bin_of(project(direct(s2)))];
            }
            ca[c] = std::move(a);
            cb[c] = std::move(b);
        },
        workers);
    std::vector<std::uint64_t> counts_mix(nb, 0), counts_dir(nb, 0);
    for (std::size_t c = 0; c < n_chunks; ++c)
        for (int i = 0; i < nb; ++i) {
            counts_mix[i] += ca[c].empty() ? 0 : ca[c][i];
            counts_dir[i] += cb[c].empty() ? 0 : cb[c][i];
        }

    const Chi2Result chi = chi2_two_sample(counts_mix, counts_dir, 10.0);
    rep.statistic = chi.statistic;
    rep.dof = chi.dof;
    rep.p_value = chi.p_value;
    rep.bins_used = chi.bins_used;
    rep.pass = chi.p_value > 0.01;
    return rep;
}

}  // namespace

TestReport certify_mixture(const LightDecomposition& d, long long n_samples, int bins,
                           RngStream rng, double p_override, unsigned workers) {
    auto mix = [&d, p_override](RngStream& r) { return d.draw_mixture(r, p_override); };
    auto dir = [&d](RngStream& r) { return model_draw(d.source(), r); };
    return certify_impl(mix, dir, n_samples, bins, rng,
                        "light:" + d.source().id() +
                            (p_override >= 0 ? "(p-override)" : ""),
                        workers);
}

TestReport certify_mixture(const HeavyDecomposition& d, long long n_samples, int bins,
                           RngStream rng, double q_override, unsigned workers) {
    auto mix = [&d, q_override](RngStream& r) { return d.draw_mixture(r, q_override); };
    auto dir = [&d](RngStream& r) { return model_draw(d.source(), r); };
    return certify_impl(mix, dir, n_samples, bins, rng,
                        "heavy:" + d.source().id() +
                            (q_override >= 0 ? "(q-override)" : ""),
                        workers);
}

std::string TestReport::to_json() const {
    std::ostringstream os;
    os.precision(12);
    os << "{\"subject\":\"" << subject << "\",\"statistic\":" << statistic << ",\"dof\":" << dof
       << ",\"p_value\":" << p_value << ",\"pass\":" << (pass ? "true" : "false")
       << ",\"n_samples\":" << n_samples << ",\"bins_requested\":" << bins_requested
       << ",\"bins_used\":" << bins_used << ",\"master_seed\":" << master_seed
       << ",\"bin_edges\":[";
    for (std::size_t i = 0; i < bin_edges.size(); ++i)
        os << (i ? "," : "") << bin_edges[i];
    os << "]}";
    return os.str();
}

WitnessCheck validate_llb(const TailModel& model, const LlbWitness& w, long long n_samples,
                          RngStream rng) {
    // histogram over the first coordinate restricted to the witness ball
    const int cells = 16;
    std::vector<long long> counts(cells, 0);
    for (long long i = 0; i < n_samples; ++i) {
        const Vec x = model_draw(model, rng);
        double rho2 = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double d = x[k] - w.center[k];
            rho2 += d * d;
        }
        if (rho2 >= w.radius * w.radius) continue;
        const double t = (x[0] - w.center[0] + w.radius) / (2.0 * w.radius);
        ++counts[std::min<std::size_t>(cells - 1, static_cast<std::size_t>(t * cells))];
    }
    // each slab's Lebesgue volume inside the ball
    const int d = model.dim();
    WitnessCheck out;
    out.worst_margin = 1e300;
    for (int c = 0; c < cells; ++c) {
        const double a = -w.radius + 2.0 * w.radius * c / cells;
        const double b = a + 2.0 * w.radius / cells;
        double vol;
        if (d == 1) {
            vol = b - a;
        } else {
            // slab volume of the d-ball, quadrature over the slab height
            vol = integrate_adaptive(
                      [&](double t) {
                          const double rr = w.radius * w.radius - t * t;
                          if (rr <= 0) return 0.0;
                          const int dm = d - 1;
                          return std::pow(kPi, 0.5 * dm) / std::tgamma(0.5 * dm + 1.0) *
                                 std::pow(rr, 0.5 * dm);
                      },
                      a, b, 1e-9, 1e-12)
                      .value;
        }
        const double phat = static_cast<double>(counts[c]) / n_samples;
        const double se = std::sqrt(std::max(phat, 1.0 / n_samples) / n_samples);
        const double margin = (phat - w.eps0 * vol) / se;
        out.worst_margin = std::min(out.worst_margin, margin);
        if (margin < -3.0) out.valid = false;
    }
    return out;
}

}  // namespace stablelab
