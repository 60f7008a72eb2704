#include "stablelab/semigroup.hpp"

#include <cmath>

#include "stablelab/errors.hpp"
#include "stablelab/parallel.hpp"
#include "stablelab/stats.hpp"

namespace stablelab {

namespace {

struct Accum {  // Welford accumulator
    long long n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    void merge(const Accum& o) {
        if (o.n == 0) return;
        const long long tot = n + o.n;
        const double d = o.mean - mean;
        mean += d * o.n / tot;
        m2 += o.m2 + d * d * static_cast<double>(n) * o.n / tot;
        n = tot;
    }
    ValueSe result() const {
        ValueSe v;
        v.value = mean;
        if (n > 1) v.se = std::sqrt(m2 / (n - 1) / n);
        return v;
    }
};

ValueSe mc_expectation(const std::function<double(RngStream&)>& sample, long long m_samples,
                       RngStream rng, unsigned workers) {
    const long long chunk = 16384;
    const std::size_t n_chunks = static_cast<std::size_t>((m_samples + chunk - 1) / chunk);
    std::vector<Accum> acc(n_chunks);
    run_chunks(
        n_chunks,
        [&](std::size_t c) {
            RngStream sub = rng.substream(c);
            const long long lo = static_cast<long long>(c) * chunk;
            const long long hi = std::min<long long>(m_samples, lo + chunk);
            Accum a;
            for (long long i = lo; i < hi; ++i) a.add(sample(sub));
            acc[c] = a;
        },
        workers);
    Accum total;
    for (const auto& a : acc) total.merge(a);
    return total.result();
}

double pareto_quantile_1d(double alpha, double u) {
    // F^{-1} of the symmetric 1-D Pareto: |X| >= 1, P(|X|>r) = r^-alpha
    if (u >= 0.5) return std::pow(2.0 * (1.0 - u), -1.0 / alpha);
    return -std::pow(2.0 * u, -1.0 / alpha);
}

double dna_quantile_1d(const TailModel& m, double u) {
    const bool positive = u >= m.w_minus();
    const double target = positive ? 1.0 - u : u;
    auto tail = [&](double t) { return positive ? m.tail_plus(t) : m.tail_minus(t); };
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

}  // namespace

OperatorConfig::OperatorConfig(long long n_, StableLaw law_, TailModel model_, long long mc,
                               std::uint64_t seed_)
    : n(n_), law(std::move(law_)), model(std::move(model_)), mc_samples(mc), seed(seed_) {
    if (n < 1) throw domain_error("n must be >= 1");
    if (mc_samples < 1000) throw domain_error("mc_samples must be >= 1e3");
    if (std::fabs(law.alpha() - model.alpha()) > 1e-12)
        throw domain_error("law and model must share alpha");
    if (law.dim() != model.dim()) throw domain_error("law and model must share the dimension");
}

ValueSe apply_P(const OperatorConfig& cfg, const TestFunction& f, long long m, const Vec& x) {
    if (m < 1 || m > cfg.n) throw domain_error("need 1 <= m <= n");
    const double scale = std::pow(static_cast<double>(m) / cfg.n, 1.0 / cfg.law.alpha());
    const StableSampler sampler(cfg.law);
    const int d = cfg.law.dim();
    auto one = [&](RngStream& r) {
        Vec y = sampler.draw(r);
        Vec z(d);
        for (int i = 0; i < d; ++i) z[i] = x[i] + scale * y[i];
        return f.f(z);
    };
    return mc_expectation(one, cfg.mc_samples, RngStream(cfg.seed, 0x50), cfg.workers);
}

ValueSe apply_Q(const OperatorConfig& cfg, const TestFunction& f, long long m, const Vec& x) {
    if (m < 1 || m > cfg.n) throw domain_error("need 1 <= m <= n");
    const SumNormalization nrm = sum_normalization(cfg.model, cfg.n);
    const double scale = 1.0 / (std::pow(static_cast<double>(cfg.n), 1.0 / cfg.model.alpha()) *
                                nrm.sigma);
    const int d = cfg.model.dim();
    auto one = [&](RngStream& r) {
        Vec acc(d, 0.0);
        for (long long i = 0; i < m; ++i) {
            const Vec xi = model_draw(cfg.model, r);
            for (int k = 0; k < d; ++k) acc[k] += xi[k] - nrm.omega[k];
        }
        Vec z(d);
        for (int k = 0; k < d; ++k) z[k] = x[k] + scale * acc[k];
        return f.f(z);
    };
    return mc_expectation(one, cfg.mc_samples, RngStream(cfg.seed, 0x51), cfg.workers);
}

GapEstimate one_step_gap(const OperatorConfig& cfg, const TestFunction& f, const Vec& x) {
    GapEstimate g;
    g.n = cfg.n;
    g.f_id = f.id;
    const double alpha = cfg.law.alpha();
    const double n_pow = std::pow(static_cast<double>(cfg.n), 1.0 / alpha);
    const SumNormalization nrm = sum_normalization(cfg.model, cfg.n);
    const bool coupled = cfg.model.dim() == 1 && cfg.law.nu().is_symmetric();
    ValueSe est;
    if (coupled) {
        const Stable1dQuantile stable_q(alpha);
        const bool is_pareto = cfg.model.kind() == TailModel::Kind::ParetoD;
        const TailModel model = cfg.model;
        auto one = [&, model](RngStream& r) {
            const double u = r.u01();
            const double xq = is_pareto ? pareto_quantile_1d(alpha, u) : dna_quantile_1d(model, u);
            const double yq = stable_q(u);
            const double qv = f.f({x[0] + (xq - nrm.omega[0]) / (n_pow * nrm.sigma)});
            const double pv = f.f({x[0] + yq / n_pow});
            return qv - pv;
        };
        est = mc_expectation(one, cfg.mc_samples, RngStream(cfg.seed, 0x52), cfg.workers);
    } else {
        const StableSampler sampler(cfg.law);
        const int d = cfg.model.dim();
        auto one = [&](RngStream& r) {
            const Vec xi = model_draw(cfg.model, r);
            const Vec y = sampler.draw(r);
            Vec zq(d), zp(d);
            for (int k = 0; k < d; ++k) {
                zq[k] = x[k] + (xi[k] - nrm.omega[k]) / (n_pow * nrm.sigma);
                zp[k] = x[k] + y[k] / n_pow;
            }
            return f.f(zq) - f.f(zp);
        };
        est = mc_expectation(one, cfg.mc_samples, RngStream(cfg.seed, 0x52), cfg.workers);
    }
    g.value = est.value;
    g.std_err = est.se;
    g.coupled = coupled;
    g.inconclusive = est.se > std::fabs(est.value);
    return g;
}

double d_bound(long long n, double alpha, double gamma, const std::array<double, 5>& norms,
               bool symmetric) {
    if (n < 1) throw domain_error("n must be >= 1");
    if (!(alpha > 0.0 && alpha < 2.0)) throw domain_error("alpha must lie in (0,2)");
    if (!(gamma > 0.0)) throw domain_error("gamma must be positive");
    const double nd = static_cast<double>(n);
    const double ln_n = std::log(nd);
    auto need = [&](int k) {
        if (!std::isfinite(norms[k]))
            throw domain_error("d_bound needs the order-" + std::to_string(k) + " norm");
        return norms[k];
    };
    if (alpha > 1.0) {
        const double s = need(1) + need(2);
        const double log_factor = (gamma == 2.0 - alpha) ? ln_n : 1.0;
        return s * (std::pow(nd, -2.0 / alpha) +
                    std::pow(nd, -1.0 - gamma / alpha) * log_factor);
    }
    if (alpha == 1.0) {
        double s = 0.0;
        for (int k = 0; k <= 4; ++k) s += need(k);
        const double log_factor = (gamma == 1.0) ? ln_n : 1.0;
        return s * (std::pow(nd, -2.0) + std::pow(nd, -1.0 - gamma) * log_factor);
    }
    double s = 0.0;
    for (int k = 0; k <= 2; ++k) s += need(k);
    const bool critical = gamma == 1.0 - alpha;
    const double log_factor = critical ? ln_n : 1.0;
    const double expo = gamma / std::max(alpha, 1.0 - gamma);
    double v = s * (std::pow(nd, -2.0) + std::pow(nd, -1.0 - expo) * log_factor);
    if (!symmetric)
        v += need(1) * std::pow(nd, -1.0 / alpha) * (critical ? ln_n : 1.0);
    return v;
}

SlopeProbe gradient_decay_probe(const OperatorConfig& cfg, const TestFunction& f, int order,
                                const std::vector<long long>& m_grid) {
    if (order < 0 || order > 2) throw domain_error("probe supports orders 0..2");
    SlopeProbe probe;
    const int d = cfg.law.dim();
    const StableSampler sampler(cfg.law);
    std::vector<Vec> probe_points = {Vec(d, 0.0), Vec(d, 0.0), Vec(d, 0.0)};
    probe_points[1][0] = 0.6;
    probe_points[2][0] = -1.1;
    // the norm bound is a supremum over unit-sup-norm functions; a single
    // smooth f cannot saturate it, so the probe scans a dilation family
    // f_w(y) = f(w y), all sharing ||f_w|| = ||f||
    const double freqs[] = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
    std::vector<double> lx, ly;
    for (std::size_t gi = 0; gi < m_grid.size(); ++gi) {
        const long long m = m_grid[gi];
        const double scale = std::pow(static_cast<double>(m) / cfg.n, 1.0 / cfg.law.alpha());
        double best = 0.0, best_se = 0.0;
        // pilot noise level drives the FD step, capped per frequency below
        const ValueSe pilot = apply_P(cfg, f, m, probe_points[0]);
        const double h_base =
            std::max(1e-3, 3.0 * std::pow(std::max(pilot.se, 1e-16), 1.0 / 3.0));
        for (std::size_t wi = 0; wi < std::size(freqs); ++wi) {
            const double w = freqs[wi];
            const double h = std::min(h_base, 0.25 / w);
            for (const Vec& p : probe_points) {
                auto one = [&](RngStream& r) {
                    Vec y = sampler.draw(r);
                    auto fshift = [&](double off) {
                        Vec z(d);
                        for (int i = 0; i < d; ++i) z[i] = w * (p[i] + scale * y[i]);
                        z[0] += w * off;
                        return f.f(z);
                    };
                    switch (order) {
                        case 0:
                            return fshift(0.0);
                        case 1:
                            return (fshift(h) - fshift(-h)) / (2.0 * h);
                        default:
                            return (fshift(h) - 2.0 * fshift(0.0) + fshift(-h)) / (h * h);
                    }
                };
                const ValueSe v = mc_expectation(
                    one, cfg.mc_samples,
                    RngStream(cfg.seed, 0x600 + gi * 64 + wi * 8 + order), cfg.workers);
                if (std::fabs(v.value) > std::fabs(best)) {
                    best = v.value;
                    best_se = v.se;
                }
            }
        }
        ProbeRow row;
        row.abscissa = static_cast<double>(m) / cfg.n;
        row.estimate = std::fabs(best);
        row.se = best_se;
        probe.rows.push_back(row);
        if (best_se > 0.5 * std::fabs(best)) probe.inconclusive = true;
        if (row.estimate > 0.0) {
            lx.push_back(std::log(row.abscissa));
            ly.push_back(std::log(row.estimate));
        }
    }
    if (lx.size() >= 3) {
        const SlopeCi ci =
            bootstrap_slope_ci(lx, ly, {}, 200, RngStream(cfg.seed, 0x6F), 0.95);
        probe.slope = ci.slope;
        probe.ci_lo = ci.lo;
        probe.ci_hi = ci.hi;
    } else {
        probe.inconclusive = true;
    }
    return probe;
}

GeneratorErrorEstimate generator_error_probe(const OperatorConfig& cfg, const TestFunction& f,
                                             const Vec& x, const QuadConfig& quad) {
    const double alpha = cfg.law.alpha();
    const double inv_n = 1.0 / static_cast<double>(cfg.n);
    const double base = generator_apply(cfg.law, f, x, quad).value;
    const StableSampler sampler(cfg.law);
    const int d = cfg.law.dim();
    auto one = [&](RngStream& r) {
        const double s = r.u01() * inv_n;
        const double sc = std::pow(s, 1.0 / alpha);
        Vec y = sampler.draw(r);
        Vec z(d);
        for (int i = 0; i < d; ++i) z[i] = x[i] + sc * y[i];
        return generator_apply(cfg.law, f, z, quad).value - base;
    };
    const ValueSe v =
        mc_expectation(one, cfg.mc_samples, RngStream(cfg.seed, 0x70), cfg.workers);
    GeneratorErrorEstimate out;
    out.value = std::fabs(v.value) * inv_n;
    out.se = v.se * inv_n;
    const double nd = static_cast<double>(cfg.n);
    auto nb = [&](int k) { return std::isfinite(f.norm_bound[k]) ? f.norm_bound[k] : 1.0; };
    if (alpha > 1.0) out.bound = nb(2) * std::pow(nd, -2.0 / alpha);
    else if (alpha == 1.0) out.bound = (nb(0) + nb(2) + nb(4)) * std::pow(nd, -2.0);
    else out.bound = (nb(0) + nb(1) + nb(2)) * std::pow(nd, -2.0);
    return out;
}

SlopeProbe generator_error_slope(OperatorConfig cfg, const TestFunction& f, const Vec& x,
                                 const std::vector<long long>& n_grid, const QuadConfig& quad) {
    SlopeProbe probe;
    std::vector<double> lx, ly;
    for (long long n : n_grid) {
        cfg.n = n;
        const GeneratorErrorEstimate e = generator_error_probe(cfg, f, x, quad);
        ProbeRow row;
        row.abscissa = static_cast<double>(n);
        row.estimate = e.value;
        row.se = e.se;
        row.bound = e.bound;
        probe.rows.push_back(row);
        if (e.se > 0.5 * e.value) probe.inconclusive = true;
        if (e.value > 0.0) {
            lx.push_back(std::log(static_cast<double>(n)));
            ly.push_back(std::log(e.value));
        }
    }
    if (lx.size() >= 3) {
        const SlopeCi ci = bootstrap_slope_ci(lx, ly, {}, 200, RngStream(cfg.seed, 0x7F), 0.95);
        probe.slope = ci.slope;
        probe.ci_lo = ci.lo;
        probe.ci_hi = ci.hi;
    } else {
        probe.inconclusive = true;
    }
    return probe;
}

}  // namespace stablelab
