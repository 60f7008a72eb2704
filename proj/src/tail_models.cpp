#include "stablelab/tail_models.hpp"

#include <cmath>

#include "stablelab/errors.hpp"
#include "stablelab/quadrature.hpp"
#include "stablelab/trig_integrals.hpp"

namespace stablelab {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_alpha(double a) {
    if (!(a > 0.0 && a < 2.0)) throw domain_error("alpha must lie in (0,2)");
}
}  // namespace

EpsFn EpsFn::zero() {
    EpsFn e;
    e.name = "zero";
    e.value = [](double) { return 0.0; };
    e.derivative = [](double) { return 0.0; };
    e.power_tail = true;
    e.tail_K = 0.0;
    return e;
}

EpsFn EpsFn::inv() {
    EpsFn e;
    e.name = "inv";
    e.value = [](double r) { return std::min(1.0, 1.0 / r); };
    e.derivative = [](double r) { return r > 1.0 ? -1.0 / (r * r) : 0.0; };
    e.power_tail = true;
    e.tail_K = 1.0;
    e.tail_gamma = 1.0;
    return e;
}

EpsFn EpsFn::power(double K, double gamma) {
    EpsFn e;
    e.name = "power";
    e.value = [K, gamma](double r) { return K * std::min(1.0, std::pow(r, -gamma)); };
    e.derivative = [K, gamma](double r) {
        return r > 1.0 ? -K * gamma * std::pow(r, -gamma - 1.0) : 0.0;
    };
    e.power_tail = true;
    e.tail_K = K;
    e.tail_gamma = gamma;
    return e;
}

EpsFn EpsFn::scaled(const std::string& name, double K, double gamma) {
    if (name == "zero") return zero();
    if (name == "inv") return inv();
    if (name == "power") return power(K, gamma);
    if (name == "negpower") {
        EpsFn e = power(-K, gamma);
        e.name = "negpower";
        return e;
    }
    throw usage_error("unknown eps function: " + name);
}

// ---------------------------------------------------------------------------

TailModel TailModel::pareto(int dim, double alpha) {
    check_alpha(alpha);
    if (dim < 1) throw domain_error("dimension must be >= 1");
    TailModel m;
    m.kind_ = Kind::ParetoD;
    m.id_ = "pareto:d=" + std::to_string(dim) + ",alpha=" + std::to_string(alpha);
    m.dim_ = dim;
    m.alpha_ = alpha;
    m.A_ = 1.0;
    m.gamma_ = std::numeric_limits<double>::infinity();
    m.K_ = 1.0;
    m.w_plus_ = m.w_minus_ = 0.5;
    m.nu_ = SpectralMeasure::uniform(dim);
    m.symmetric_ = true;
    // density minimum over the shell 1 < |x| < 2 sits at |x| = 2; halve it for safety
    const double c = alpha * std::tgamma(0.5 * dim + 1.0) / (std::pow(kPi, 0.5 * dim) * dim);
    LlbWitness w;
    w.eps0 = 0.5 * c * std::pow(2.0, -(dim + alpha));
    w.center = Vec(dim, 0.0);
    w.center[0] = 1.5;
    w.radius = 0.5;
    m.llb_ = w;
    return m;
}

TailModel TailModel::dna_1d(double alpha, double A, double w_plus, double w_minus, EpsFn eps_plus,
                            EpsFn eps_minus, double gamma, double K) {
    check_alpha(alpha);
    if (!(A > 0.0)) throw domain_error("A must be positive");
    if (!(gamma > 0.0)) throw domain_error("gamma must be positive");
    if (std::fabs(w_plus + w_minus - 1.0) > 1e-12)
        throw domain_error("spectral weights must sum to 1");
    if (w_plus < 0.0 || w_minus < 0.0) throw domain_error("weights must be nonnegative");
    TailModel m;
    m.kind_ = Kind::Dna1D;
    m.id_ = "dna1d:alpha=" + std::to_string(alpha);
    m.dim_ = 1;
    m.alpha_ = alpha;
    m.A_ = A;
    m.gamma_ = gamma;
    m.K_ = K;
    m.w_plus_ = w_plus;
    m.w_minus_ = w_minus;
    m.eps_plus_ = std::move(eps_plus);
    m.eps_minus_ = std::move(eps_minus);
    m.symmetric_ = std::fabs(w_plus - w_minus) < 1e-15 &&
                   m.eps_plus_.name == m.eps_minus_.name;
    std::vector<Atom> at;
    if (w_plus > 0.0) at.push_back({{1.0}, w_plus});
    if (w_minus > 0.0) at.push_back({{-1.0}, w_minus});
    m.nu_ = SpectralMeasure::atoms(at);
    // validity: both one-sided tails must be non-increasing on a wide grid
    auto scan = [&](bool plus) {
        double prev = 1.0;
        for (int i = 0; i <= 600; ++i) {
            const double t = std::pow(10.0, -3.0 + i * 0.01);  // 1e-3 .. 1e3
            const double tp = plus ? m.tail_plus(t) : m.tail_minus(t);
            if (tp > prev + 1e-12)
                throw domain_error("eps makes the model CDF non-monotone near t=" +
                                   std::to_string(t));
            prev = tp;
        }
    };
    scan(true);
    scan(false);
    return m;
}

TailModel TailModel::custom_polar(int dim, double alpha, double A, SpectralMeasure nu,
                                  std::function<double(double, const Vec&)> eps, double gamma,
                                  double K, bool symmetric) {
    check_alpha(alpha);
    if (!(A > 0.0)) throw domain_error("A must be positive");
    if (!(gamma > 0.0) || !(K >= 0.0)) throw domain_error("gamma > 0 and K >= 0 required");
    TailModel m;
    m.kind_ = Kind::CustomPolar;
    m.id_ = "custom:alpha=" + std::to_string(alpha);
    m.dim_ = dim;
    m.alpha_ = alpha;
    m.A_ = A;
    m.gamma_ = gamma;
    m.K_ = K;
    m.eps_polar_ = std::move(eps);
    m.nu_ = std::move(nu);
    m.symmetric_ = symmetric;
    return m;
}

TailModel TailModel::with_llb(LlbWitness w) const {
    TailModel m = *this;
    if (!(w.eps0 > 0.0) || !(w.radius > 0.0)) throw domain_error("invalid witness");
    m.llb_ = std::move(w);
    return m;
}

TailModel TailModel::with_id(std::string id) const {
    TailModel m = *this;
    m.id_ = std::move(id);
    return m;
}

double TailModel::eps_at(double r, const Vec& theta) const {
    switch (kind_) {
        case Kind::ParetoD:
            return r < 1.0 ? std::pow(r, alpha_) - 1.0 : 0.0;
        case Kind::Dna1D:
            return theta[0] > 0 ? eps_plus_.value(r) : eps_minus_.value(r);
        case Kind::CustomPolar:
            return eps_polar_(r, theta);
    }
    return 0.0;
}

double TailModel::radial_tail_given_dir(double r, const Vec& theta) const {
    if (r <= 0.0) return 1.0;
    return std::min(1.0, std::max(0.0, (A_ + eps_at(r, theta)) / std::pow(r, alpha_)));
}

double TailModel::radial_tail(double r) const {
    if (r <= 0.0) return 1.0;
    switch (kind_) {
        case Kind::ParetoD:
            return std::min(1.0, std::pow(r, -alpha_));
        case Kind::Dna1D:
            return tail_plus(r) + tail_minus(r);
        case Kind::CustomPolar:
            return nu_.integrate(
                [&](const Vec& th) { return radial_tail_given_dir(r, th); }, 1e-9);
    }
    return 0.0;
}

double TailModel::tail_plus(double t) const {
    if (dim_ != 1) throw domain_error("tail_plus is 1-D only");
    if (t <= 0.0) return w_plus_;
    if (kind_ == Kind::ParetoD) return 0.5 * std::min(1.0, std::pow(t, -alpha_));
    return std::min(w_plus_,
                    std::max(0.0, w_plus_ * (A_ + eps_plus_.value(t)) / std::pow(t, alpha_)));
}

double TailModel::tail_minus(double t) const {
    if (dim_ != 1) throw domain_error("tail_minus is 1-D only");
    if (t <= 0.0) return w_minus_;
    if (kind_ == Kind::ParetoD) return 0.5 * std::min(1.0, std::pow(t, -alpha_));
    return std::min(w_minus_,
                    std::max(0.0, w_minus_ * (A_ + eps_minus_.value(t)) / std::pow(t, alpha_)));
}

bool TailModel::has_density() const {
    if (kind_ == Kind::ParetoD) return true;
    if (kind_ == Kind::Dna1D)
        return static_cast<bool>(eps_plus_.derivative) && static_cast<bool>(eps_minus_.derivative);
    return false;
}

double TailModel::density(const Vec& x) const {
    if (!has_density()) throw domain_error("model has no pointwise density");
    if (kind_ == Kind::ParetoD) {
        const double r = norm2(x);
        if (r < 1.0) return 0.0;
        return alpha_ * std::tgamma(0.5 * dim_ + 1.0) /
               (std::pow(kPi, 0.5 * dim_) * dim_ * std::pow(r, dim_ + alpha_));
    }
    // Dna1D: p(x) = -d/dx tail_plus(x) on the unclamped branch, mirrored
    const double t = std::fabs(x[0]);
    const bool plus = x[0] > 0.0;
    const double w = plus ? w_plus_ : w_minus_;
    if (w == 0.0) return 0.0;
    const EpsFn& e = plus ? eps_plus_ : eps_minus_;
    const double raw = w * (A_ + e.value(t)) / std::pow(t, alpha_);
    if (raw >= w) return 0.0;  // clamped region carries no mass
    return w * (alpha_ * (A_ + e.value(t)) * std::pow(t, -alpha_ - 1.0) -
                e.derivative(t) * std::pow(t, -alpha_));
}

// ---------------------------------------------------------------------------

TailModel pareto_model(int dim, double alpha) { return TailModel::pareto(dim, alpha); }

double sigma_scale(const TailModel& model) {
    return std::pow(model.tail_coefficient() * model.alpha() * trig::total(model.alpha()),
                    1.0 / model.alpha());
}

namespace {

// int_0^b [P(X>t) - P(X<-t)] dt - b [P(X>b) - P(X<-b)]  (b = +inf for the full mean)
double truncated_mean_1d(const TailModel& m, double b, double* err) {
    auto diff = [&](double t) { return m.tail_plus(t) - m.tail_minus(t); };
    const double t0 = std::max(1.0, std::pow(m.tail_coefficient(), 1.0 / m.alpha()));
    if (std::isinf(b)) {
        const double alpha = m.alpha();
        const double head = integrate_adaptive(diff, 0.0, t0, 1e-11, 1e-13).value;
        const double big = std::max(1e5, 100.0 * t0);
        const double body = integrate_adaptive(diff, t0, big, 1e-11, 1e-13).value;
        // beyond `big` the A-part is exact; bound the eps-part by its envelope
        const double a_tail = (m.w_plus() - m.w_minus()) * m.tail_coefficient() *
                              std::pow(big, 1.0 - alpha) / (alpha - 1.0);
        if (err) {
            const double g = m.gamma();
            *err += std::isinf(g) ? 0.0
                                  : m.eps_bound() * std::pow(big, 1.0 - alpha - g) /
                                        (alpha + g - 1.0);
        }
        return head + body + a_tail;
    }
    const double head = integrate_adaptive(diff, 0.0, std::min(t0, b), 1e-11, 1e-13).value;
    double rest = 0.0;
    if (b > t0) rest = integrate_adaptive(diff, t0, b, 1e-11, 1e-13).value;
    return head + rest - b * diff(b);
}

}  // namespace

OmegaShift omega_shift(const TailModel& model, long long n) {
    if (n < 1) throw domain_error("n must be >= 1");
    OmegaShift out;
    out.value = Vec(model.dim(), 0.0);
    const double alpha = model.alpha();
    if (alpha < 1.0 || model.symmetric()) return out;  // exactly zero
    if (model.dim() == 1) {
        const double b =
            alpha == 1.0 ? sigma_scale(model) * static_cast<double>(n)
                         : std::numeric_limits<double>::infinity();
        out.abs_error = 0.0;
        out.value[0] = truncated_mean_1d(model, b, &out.abs_error);
        out.abs_error += 1e-9 * (1.0 + std::fabs(out.value[0]));
        return out;
    }
    // d >= 2: E[X 1{|X|<=b}] = int nu(dth) th [ int_0^b G_th - b G_th(b) ]
    const double b = alpha == 1.0 ? sigma_scale(model) * static_cast<double>(n)
                                  : std::numeric_limits<double>::infinity();
    for (int i = 0; i < model.dim(); ++i) {
        out.value[i] = model.nu().integrate(
            [&](const Vec& th) {
                auto g = [&](double t) { return model.radial_tail_given_dir(t, th); };
                const double t0 = std::max(1.0, std::pow(model.tail_coefficient(), 1.0 / alpha));
                double radial;
                if (std::isinf(b)) {
                    const double big = std::max(1e5, 100.0 * t0);
                    radial = integrate_adaptive(g, 0.0, big, 1e-10, 1e-12).value +
                             model.tail_coefficient() * std::pow(big, 1.0 - alpha) / (alpha - 1.0);
                } else {
                    radial = integrate_adaptive(g, 0.0, b, 1e-10, 1e-12).value - b * g(b);
                }
                return th[i] * radial;
            },
            1e-9);
    }
    out.abs_error = 1e-8;
    return out;
}

double dna_cdf(const TailModel& model, double x) {
    if (model.kind() != TailModel::Kind::Dna1D && model.kind() != TailModel::Kind::ParetoD)
        throw domain_error("dna_cdf needs a 1-D model");
    if (model.dim() != 1) throw domain_error("dna_cdf is 1-D only");
    if (x >= 0.0) return 1.0 - model.tail_plus(x);
    return model.tail_minus(-x);
}

}  // namespace stablelab
