#include "stablelab/tv_metrics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "stablelab/errors.hpp"
#include "stablelab/quadrature.hpp"
#include "stablelab/stats.hpp"
#include "stablelab/trig_integrals.hpp"

namespace stablelab {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::mutex g_fftw_mutex;

// forward complex FFT, planning serialized (FFTW planner is not thread-safe)
void fft_forward(std::vector<Complex>& data) {
    const int n = static_cast<int>(data.size());
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    fftw_plan plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(data.data()),
                                      reinterpret_cast<fftw_complex*>(data.data()), FFTW_FORWARD,
                                      FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

double int_pow(double base, long long n) {
    double r = 1.0, b = base;
    long long m = n;
    while (m > 0) {
        if (m & 1) r *= b;
        b *= b;
        m >>= 1;
    }
    return r;
}

Complex int_pow(Complex base, long long n) {
    Complex r{1.0, 0.0};
    Complex b = base;
    long long m = n;
    while (m > 0) {
        if (m & 1) r *= b;
        b *= b;
        m >>= 1;
    }
    return r;
}

// log1p(-x) + x = -x^2/2 - x^3/3 - ..., accurate for small x
double log1p_minus_plus(double x) {
    if (std::fabs(x) < 1e-4) {
        const double x2 = x * x;
        return -x2 * (0.5 + x * (1.0 / 3.0 + x * (0.25 + x * 0.2)));
    }
    return std::log1p(-x) + x;
}
}  // namespace

// ---------------------------------------------------------------------------
// Inversion

GridDensity invert_cf_to_density(const std::function<Complex(double)>& cf,
                                 const InversionConfig& cfg) {
    const int n = cfg.n_nodes;
    if (n < 16 || (n & (n - 1)) != 0) throw domain_error("n_nodes must be a power of two >= 16");
    double lam = cfg.lambda_max;
    if (lam <= 0.0)
        lam = std::pow(std::log(1e8) / cfg.decay_c, 1.0 / cfg.decay_alpha);
    // cutoff check: |cf| must be negligible at the boundary
    const double edge = std::abs(cf(lam));
    if (edge > 1e-6) {
        const double suggest = lam * std::pow(std::log(1e8) / std::max(1e-12, -std::log(edge)),
                                              1.0 / cfg.decay_alpha);
        throw numeric_error("cf cutoff " + std::to_string(lam) +
                            " leaves mass " + std::to_string(edge) +
                            "; suggested lambda_max " + std::to_string(suggest));
    }
    const double dlam = 2.0 * lam / n;
    const double dx = kPi / lam;  // = 2 pi / (n dlam)
    const double x_min = -0.5 * n * dx;

    std::vector<Complex> work(n);
    for (int k = 0; k < n; ++k) {
        const double l = -lam + k * dlam;
        // e^{-i k dlam x_min} with x_min = -(n/2) dx and dlam dx = 2 pi / n
        // reduces to (-1)^k
        const Complex phase = (k % 2 == 0) ? Complex{1.0, 0.0} : Complex{-1.0, 0.0};
        work[k] = cf(l) * phase;
    }
    fft_forward(work);

    GridDensity g;
    g.x_min = x_min;
    g.dx = dx;
    g.values.resize(n);
    const double scale = dlam / (2.0 * kPi);
    double integral = 0.0, worst = 0.0;
    for (int j = 0; j < n; ++j) {
        const double x = x_min + j * dx;
        const Complex rot = std::polar(1.0, lam * x);
        double v = (rot * work[j]).real() * scale;
        worst = std::min(worst, v);
        if (v < 0.0) v = 0.0;
        g.values[j] = v;
        integral += v;
    }
    g.neg_clip = worst;
    g.integral = integral * dx;
    if (worst < -1e-6)
        throw numeric_error("inversion produced significantly negative density: " +
                            std::to_string(worst));
    // off-grid mass via the truncation inequality P(|Z|>R) <= (R/2) int_{|l|<2/R} (1-Re cf)
    const double r_edge = -x_min;
    const double u = 2.0 / r_edge;
    const double tail_int = integrate_adaptive(
                                [&](double l) { return 1.0 - cf(l).real(); }, -u, u, 1e-8, 1e-12)
                                .value;
    g.tail_mass_bound = std::max(0.0, 0.5 * r_edge * tail_int);
    return g;
}

// ---------------------------------------------------------------------------
// Pareto characteristic function context

class trig_table_holder {
public:
    trig_table_holder(double alpha, double z_cap) : table(alpha, z_cap) {}
    trig::PartialTable table;
};

ParetoCfContext::ParetoCfContext(double alpha, int d, double z_cap) : alpha_(alpha), d_(d) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw domain_error("alpha must lie in (0,2)");
    if (d < 1 || d > 3) throw domain_error("exact Pareto CF path supports d in {1,2,3}");
    const double g = trig::total(alpha);
    sigma_ = std::pow(alpha * g, 1.0 / alpha);  // A = 1
    c0_ = alpha * std::tgamma(0.5 * d + 1.0) /
          (std::pow(kPi, 0.5 * d) * d * std::pow(sigma_, alpha));
    table_ = std::make_shared<trig_table_holder>(alpha, z_cap);
    i0_ = radial_i(0.0);
}

namespace {
// A_{d-2} int_{-1}^{1} (1-u^2)^{(d-3)/2} |u|^alpha F(z |u|) du, the polar
// reduction of int_{S^{d-1}} |theta_1|^alpha F(z |theta_1|) dtheta
double angular_reduce(int d, double alpha, double z, const std::function<double(double)>& f) {
    if (d == 1) return 2.0 * f(z);
    const double area = sphere_area(d - 1);  // S^{d-2} factor
    if (d == 2) {
        // u = sin t removes the endpoint singularity of (1-u^2)^{-1/2}
        auto g = [&](double t) {
            const double u = std::sin(t);
            return std::pow(u, alpha) * f(z * u);
        };
        return 2.0 * area * integrate_adaptive(g, 0.0, kPi / 2.0, 1e-11, 1e-14).value;
    }
    auto g = [&](double u) { return std::pow(u, alpha) * f(z * u); };
    return 2.0 * area * integrate_adaptive(g, 0.0, 1.0, 1e-11, 1e-14).value;
}
}  // namespace

double ParetoCfContext::radial_i(double rho) const {
    const double z = rho / sigma_;
    const double a = alpha_;
    if (d_ == 1) return 2.0 * trig::upper(z, a);
    auto up = [&](double zz) { return trig::upper(zz, a); };
    return angular_reduce(d_, a, z, up);
}

double ParetoCfContext::delta_i(double rho) const {
    const double z = rho / sigma_;
    const double a = alpha_;
    if (d_ == 1) return 2.0 * table_->table(z);
    auto lo = [&](double zz) { return table_->table(zz); };
    return angular_reduce(d_, a, z, lo);
}

double ParetoCfContext::cf_sn(long long n, double lambda_mag) const {
    if (lambda_mag == 0.0) return 1.0;
    const double l = std::fabs(lambda_mag);
    const double rho = l * std::pow(static_cast<double>(n), -1.0 / alpha_);
    const double base =
        1.0 - c0_ * std::pow(l, alpha_) * (i0_ - delta_i(rho)) / static_cast<double>(n);
    return int_pow(base, n);
}

double ParetoCfContext::log_cf_sn_e1(long long n) const {
    const double rho = std::pow(static_cast<double>(n), -1.0 / alpha_);
    const double x = c0_ * (i0_ - delta_i(rho)) / static_cast<double>(n);
    if (x >= 1.0) throw numeric_error("cf of S_n is nonpositive at e_1");
    return static_cast<double>(n) * std::log1p(-x);
}

Complex cf_of_Sn_pareto(long long n, double alpha, int d, double lambda_mag) {
    ParetoCfContext ctx(alpha, d);
    return {ctx.cf_sn(n, lambda_mag), 0.0};
}

double delta_n(long long n, double alpha, int d) {
    if (n < 1) throw domain_error("n must be >= 1");
    ParetoCfContext ctx(alpha, d);
    const double rho = std::pow(static_cast<double>(n), -1.0 / alpha);
    const double di = ctx.delta_i(rho);
    const double x = ctx.c0() * (ctx.radial_i0() - di) / static_cast<double>(n);
    if (x >= 1.0) throw numeric_error("cf of S_n is nonpositive at e_1");
    // n log(1-x) + C0 I(0) = n [log1p(-x) + x] + C0 dI, both terms small
    const double nd = static_cast<double>(n);
    const double core = nd * log1p_minus_plus(x) + ctx.c0() * di;
    const double kappa = std::min(2.0 - alpha, alpha) / alpha;
    return std::pow(nd, kappa) * core;
}

double delta_limit(double alpha, int d) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw domain_error("alpha must lie in (0,2)");
    if (d < 1) throw domain_error("d must be >= 1");
    const double g = trig::total(alpha);
    const double sigma = std::pow(alpha * g, 1.0 / alpha);
    const double c0 = alpha * std::tgamma(0.5 * d + 1.0) /
                      (std::pow(kPi, 0.5 * d) * d * std::pow(sigma, alpha));
    // second-moment integral of theta_1 over the sphere, surface measure
    const double theta1_sq = sphere_area(d) / d;
    const double lterm = c0 * theta1_sq / ((4.0 - 2.0 * alpha) * std::pow(sigma, 2.0 - alpha));
    if (alpha > 1.0) return lterm;
    // C0 I(0): evaluate I(0) through the same reduction used by delta_n
    ParetoCfContext ctx(alpha, d, 16.0);
    const double sq = ctx.c0() * ctx.radial_i0();
    if (alpha < 1.0) return -0.5 * sq * sq;
    return lterm - 0.5 * sq * sq;
}

// ---------------------------------------------------------------------------
// Model characteristic functions (d = 1)

namespace {

// int_T^inf e^{i l t} t^{-s} dt for l > 0, T l >= 64, via the oscillatory
// tail ladders: l^{s-1} [cos_tail + i sin_tail](l T, s)
Complex osc_tail(double l, double T, double s) {
    const double y = l * T;
    return std::pow(l, s - 1.0) * Complex{trig::cos_tail(y, s), trig::sin_tail(y, s)};
}

}  // namespace

Complex model_cf_1d(const TailModel& model, double lambda) {
    if (model.dim() != 1) throw domain_error("model_cf_1d is 1-D only");
    if (lambda == 0.0) return {1.0, 0.0};
    const double a = model.alpha();
    if (model.kind() == TailModel::Kind::ParetoD) {
        const double l = std::fabs(lambda);
        return {1.0 - a * std::pow(l, a) * trig::upper(l, a), 0.0};
    }
    if (model.kind() != TailModel::Kind::Dna1D)
        throw domain_error("no characteristic function path for this model");
    const bool neg = lambda < 0.0;
    const double l = std::fabs(lambda);
    // E e^{ilX} = 1 + il int_0^inf [e^{ilt} T+(t) - e^{-ilt} T-(t)] dt
    const double T = std::max(64.0 / l, 8.0);
    auto head = [&](bool plus) {
        const double w0 = plus ? model.w_plus() : model.w_minus();
        if (w0 == 0.0) return Complex{0.0, 0.0};
        auto tail = [&](double t) { return plus ? model.tail_plus(t) : model.tail_minus(t); };
        // the clamp boundary t* (tail == w0 for t <= t*) is a kink; the flat
        // part has a closed-form integral
        double lo = 0.0, hi = 8.0;
        if (tail(1e-12) < w0 * (1.0 - 1e-12)) {
            hi = 0.0;  // no clamped region
        } else {
            while (tail(hi) >= w0 * (1.0 - 1e-14) && hi < T) hi *= 2.0;
            hi = std::min(hi, T);
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (tail(mid) >= w0 * (1.0 - 1e-14)) lo = mid;
                else hi = mid;
            }
        }
        const double tstar = std::min(0.5 * (lo + hi), T);
        double re = w0 * std::sin(l * tstar) / l;
        double im = w0 * (1.0 - std::cos(l * tstar)) / l;
        // Gauss panels on the smooth remainder [t*, T]
        const int panels = std::max(32, static_cast<int>(l * (T - tstar) / 1.5) + 1);
        const double h = (T - tstar) / panels;
        for (int p = 0; p < panels; ++p) {
            const double c = tstar + (p + 0.5) * h, half = 0.5 * h;
            for (int i = 0; i < 8; ++i) {
                const double off = half * GaussLegendre16::nodes[i];
                for (int sgn = -1; sgn <= 1; sgn += 2) {
                    const double t = c + sgn * off;
                    const double w = GaussLegendre16::weights[i] * half * tail(t);
                    re += w * std::cos(l * t);
                    im += w * std::sin(l * t);
                }
            }
        }
        return Complex{re, im};
    };
    auto tail_closed = [&](bool plus) -> Complex {
        const double w = plus ? model.w_plus() : model.w_minus();
        const EpsFn& e = plus ? model.eps_plus() : model.eps_minus();
        if (w == 0.0) return {0.0, 0.0};
        if (!e.power_tail)
            throw numeric_error("cf tail completion needs an exact power-tail eps");
        Complex v = model.tail_coefficient() * osc_tail(l, T, a);
        if (e.tail_K != 0.0) v += e.tail_K * osc_tail(l, T, a + e.tail_gamma);
        return w * v;
    };
    const Complex ip = head(true) + tail_closed(true);
    const Complex im_part = head(false) + tail_closed(false);
    // e^{-ilt} integral is the conjugate-kernel of the +branch integrand
    const Complex total = Complex{0.0, l} * (ip - std::conj(im_part));
    Complex phi = Complex{1.0, 0.0} + total;
    return neg ? std::conj(phi) : phi;
}

// ---------------------------------------------------------------------------
// Exact TV / Kolmogorov

namespace {

struct CfPair {
    std::function<Complex(double)> sn;
    std::function<Complex(double)> stable;
};

CfPair build_cf_pair(const TailModel& model, long long n,
                     std::shared_ptr<ParetoCfContext>& ctx_out) {
    CfPair pair;
    const double a = model.alpha();
    if (model.kind() == TailModel::Kind::ParetoD && model.dim() == 1) {
        auto ctx = std::make_shared<ParetoCfContext>(a, 1);
        ctx_out = ctx;
        pair.sn = [ctx, n](double l) { return Complex{ctx->cf_sn(n, l), 0.0}; };
    } else {
        const double sigma = sigma_scale(model);
        const Vec omega = omega_shift(model, n).value;
        const double scale = std::pow(static_cast<double>(n), 1.0 / a) * sigma;
        pair.sn = [model, n, omega, scale](double l) {
            const Complex base = model_cf_1d(model, l / scale);
            const Complex phase =
                std::polar(1.0, -l * static_cast<double>(n) * omega[0] / scale);
            return phase * int_pow(base, n);
        };
    }
    // limiting stable law: weights from nu (w+, w-)
    const double wp = model.kind() == TailModel::Kind::ParetoD ? 0.5 : model.w_plus();
    const double wm = model.kind() == TailModel::Kind::ParetoD ? 0.5 : model.w_minus();
    pair.stable = [a, wp, wm](double l) {
        const Complex e = wp * psi_alpha(l, a) + wm * psi_alpha(-l, a);
        return std::exp(-e);
    };
    return pair;
}

struct TvComputation {
    double tv = 0.0;
    double kol = 0.0;
    double tail_bound = 0.0;
};

TvComputation grid_tv(const CfPair& pair, double alpha, int n_nodes, double lambda_pad) {
    InversionConfig cfg;
    cfg.n_nodes = n_nodes;
    cfg.decay_alpha = alpha;
    cfg.decay_c = 0.5;  // conservative decay constant for the cutoff choice
    cfg.lambda_max = std::max(lambda_pad, std::pow(std::log(1e8) / 0.5, 1.0 / alpha));
    const GridDensity p = invert_cf_to_density(pair.sn, cfg);
    const GridDensity q = invert_cf_to_density(pair.stable, cfg);
    TvComputation out;
    double acc = 0.0;
    double fp = 0.0, fq = 0.0, kol = 0.0;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        acc += std::fabs(p.values[i] - q.values[i]);
        fp += p.values[i];
        fq += q.values[i];
        kol = std::max(kol, std::fabs(fp - fq) * p.dx);
    }
    out.tv = 0.5 * acc * p.dx;
    out.kol = kol;
    out.tail_bound = 0.5 * (p.tail_mass_bound + q.tail_mass_bound);
    return out;
}

}  // namespace

TvKolPair tv_and_kolmogorov_1d(const TailModel& model, long long n, const TvOptions& opts) {
    if (model.dim() != 1) throw domain_error("exact TV path is 1-D only");
    if (n < 1) throw domain_error("n must be >= 1");
    std::shared_ptr<ParetoCfContext> ctx;
    const CfPair pair = build_cf_pair(model, n, ctx);
    const TvComputation fine = grid_tv(pair, model.alpha(), opts.n_nodes, opts.lambda_pad);
    double err = 1e-10;
    if (opts.richardson) {
        const TvComputation coarse =
            grid_tv(pair, model.alpha(), opts.n_nodes / 2, opts.lambda_pad);
        err += std::fabs(fine.tv - coarse.tv);
    }
    TvKolPair out;
    out.tv = {fine.tv, err, "cf-inversion", n, model.alpha(), model.id()};
    out.kolmogorov = {fine.kol, err, "kolmogorov", n, model.alpha(), model.id()};
    return out;
}

DistanceEstimate tv_1d_exact(const TailModel& model, long long n, const TvOptions& opts) {
    return tv_and_kolmogorov_1d(model, n, opts).tv;
}

DistanceEstimate kolmogorov_1d(const TailModel& model, long long n, const TvOptions& opts) {
    return tv_and_kolmogorov_1d(model, n, opts).kolmogorov;
}

DistanceEstimate tv_histogram_lb(const SampleBatch& a, const SampleBatch& b, int bins,
                                 RngStream rng) {
    if (a.points.size() != b.points.size()) throw domain_error("batches must have equal size");
    if (a.points.empty()) throw domain_error("empty batches");
    auto project = [](const Vec& x) { return x.size() == 1 ? x[0] : norm2(x); };
    std::vector<double> pa(a.points.size()), pb(b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) pa[i] = project(a.points[i]);
    for (std::size_t i = 0; i < b.points.size(); ++i) pb[i] = project(b.points[i]);
    std::vector<double> sorted = pa;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> edges(bins - 1);
    for (int k = 1; k < bins; ++k)
        edges[k - 1] = sorted[static_cast<std::size_t>(
            static_cast<double>(k) / bins * (sorted.size() - 1))];
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    const int nb = static_cast<int>(edges.size()) + 1;
    auto histo = [&](const std::vector<double>& v) {
        std::vector<double> h(nb, 0.0);
        for (double x : v)
            ++h[std::upper_bound(edges.begin(), edges.end(), x) - edges.begin()];
        for (auto& c : h) c /= static_cast<double>(v.size());
        return h;
    };
    const std::vector<double> ha = histo(pa), hb = histo(pb);
    double lb = 0.0;
    for (int i = 0; i < nb; ++i) lb += std::fabs(ha[i] - hb[i]);
    lb *= 0.5;
    // parametric bootstrap: multinomial resampling of the bin counts
    const int reps = 200;
    const std::size_t m = pa.size();
    auto resample = [&](const std::vector<double>& probs, std::vector<double>& out) {
        long long remaining = static_cast<long long>(m);
        double prob_left = 1.0;
        for (int i = 0; i < nb; ++i) {
            if (remaining <= 0 || prob_left <= 0.0) {
                out[i] = 0.0;
                continue;
            }
            const double p = std::min(1.0, probs[i] / prob_left);
            // normal approximation to Binomial(remaining, p), clamped
            const double mean = remaining * p;
            const double sd = std::sqrt(std::max(0.0, remaining * p * (1.0 - p)));
            double draw = std::round(mean + sd * rng.normal());
            draw = std::max(0.0, std::min(static_cast<double>(remaining), draw));
            out[i] = draw;
            remaining -= static_cast<long long>(draw);
            prob_left -= probs[i];
        }
    };
    std::vector<double> boot(reps), ra(nb), rb(nb);
    for (int r = 0; r < reps; ++r) {
        resample(ha, ra);
        resample(hb, rb);
        double s = 0.0;
        for (int i = 0; i < nb; ++i) s += std::fabs(ra[i] - rb[i]) / static_cast<double>(m);
        boot[r] = 0.5 * s;
    }
    double mean = 0.0, var = 0.0;
    for (double b2 : boot) mean += b2;
    mean /= reps;
    for (double b2 : boot) var += (b2 - mean) * (b2 - mean);
    var /= (reps - 1);
    DistanceEstimate est;
    est.value = lb;
    est.error = std::sqrt(var);  // bootstrap sd of the statistic
    est.method = "histogram-lb";
    est.n = static_cast<long long>(m);
    est.model_id = a.provenance.source_id + "|" + b.provenance.source_id;
    return est;
}

// ---------------------------------------------------------------------------
// Stable quantile

Stable1dQuantile::Stable1dQuantile(double alpha, int n_nodes) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw domain_error("alpha must lie in (0,2)");
    tail_coef_ = 0.5 * d_alpha(alpha) / alpha;  // P(Y > x) ~ tail_coef x^-alpha
    InversionConfig cfg;
    cfg.n_nodes = n_nodes;
    cfg.decay_alpha = alpha;
    cfg.decay_c = 1.0;
    cfg.lambda_max = std::max(48.0, std::pow(std::log(1e8), 1.0 / alpha));
    auto cf = [alpha](double l) {
        return Complex{std::exp(-std::pow(std::fabs(l), alpha)), 0.0};
    };
    const GridDensity g = invert_cf_to_density(cf, cfg);
    xs_.reserve(g.values.size());
    cdf_.reserve(g.values.size());
    // left tail mass from the asymptotic form at the grid edge
    double acc = tail_coef_ * std::pow(std::fabs(g.x_min), -alpha);
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        acc += g.values[i] * g.dx;
        xs_.push_back(g.x_at(i) + 0.5 * g.dx);
        cdf_.push_back(std::min(acc, 1.0));
    }
}

double Stable1dQuantile::operator()(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw domain_error("u must lie in (0,1)");
    if (u < cdf_.front()) return -std::pow(tail_coef_ / u, 1.0 / alpha_);
    if (u > cdf_.back()) return std::pow(tail_coef_ / (1.0 - u), 1.0 / alpha_);
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    const std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
    if (i == 0) return xs_.front();
    const double c0 = cdf_[i - 1], c1 = cdf_[i];
    const double w = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.5;
    return xs_[i - 1] * (1.0 - w) + xs_[i] * w;
}

}  // namespace stablelab
