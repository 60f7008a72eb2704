#include "stablelab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stablelab/errors.hpp"
#include "stablelab/quadrature.hpp"
#include "stablelab/trig_integrals.hpp"

namespace stablelab {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw domain_error("alpha must lie in (0,2)");
}

Vec angle_to_dir(double phi) { return {std::cos(phi), std::sin(phi)}; }
}  // namespace

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

double sphere_area(int d) {
    if (d < 1) throw domain_error("dimension must be >= 1");
    return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

Complex psi_alpha(double t, double alpha) {
    check_alpha(alpha);
    if (t == 0.0) return {0.0, 0.0};
    const double at = std::fabs(t);
    const double sg = t > 0 ? 1.0 : -1.0;
    if (alpha == 1.0) return Complex(at, at * sg * (2.0 / kPi) * std::log(at));
    const double mod = std::pow(at, alpha);
    return Complex(mod, -mod * sg * std::tan(kPi * alpha / 2.0));
}

double d_alpha(double alpha) {
    check_alpha(alpha);
    return 1.0 / trig::total(alpha);
}

// ---------------------------------------------------------------------------
// SpectralMeasure

SpectralMeasure SpectralMeasure::atoms(std::vector<Atom> list) {
    if (list.empty()) throw domain_error("atom list must be non-empty");
    const int d = static_cast<int>(list.front().direction.size());
    double mass = 0.0;
    for (const auto& a : list) {
        if (static_cast<int>(a.direction.size()) != d)
            throw domain_error("atom dimensions disagree");
        if (std::fabs(norm2(a.direction) - 1.0) > 1e-12)
            throw domain_error("atom direction is not a unit vector");
        if (!(a.weight > 0.0)) throw domain_error("atom weight must be positive");
        mass += a.weight;
    }
    SpectralMeasure m;
    m.kind_ = Kind::Atoms;
    m.dim_ = d;
    m.total_mass_ = mass;
    m.atoms_ = std::move(list);
    return m;
}

SpectralMeasure SpectralMeasure::uniform(int dim) {
    if (dim < 1) throw domain_error("dimension must be >= 1");
    SpectralMeasure m;
    m.kind_ = Kind::Uniform;
    m.dim_ = dim;
    m.total_mass_ = 1.0;
    return m;
}

SpectralMeasure SpectralMeasure::density(int dim, std::string name,
                                         std::function<double(const Vec&)> rho) {
    if (dim < 1) throw domain_error("dimension must be >= 1");
    if (!rho) throw domain_error("density function required");
    SpectralMeasure m;
    m.kind_ = Kind::Density;
    m.dim_ = dim;
    m.density_name_ = std::move(name);
    m.rho_ = std::move(rho);
    const double mass = m.integrate([](const Vec&) { return 1.0; }, 1e-9);
    if (std::fabs(mass - 1.0) > 1e-6)
        throw domain_error("density must integrate to 1 (got " + std::to_string(mass) +
                           "); no implicit normalization");
    m.total_mass_ = 1.0;
    return m;
}

double SpectralMeasure::density_value(const Vec& theta) const {
    if (kind_ != Kind::Density) throw domain_error("not a density representation");
    return rho_(theta);
}

double SpectralMeasure::integrate(const std::function<double(const Vec&)>& h, double tol) const {
    switch (kind_) {
        case Kind::Atoms: {
            double s = 0.0;
            for (const auto& a : atoms_) s += a.weight * h(a.direction);
            return s;
        }
        case Kind::Uniform:
        case Kind::Density: {
            const bool unif = kind_ == Kind::Uniform;
            if (dim_ == 1) {
                const Vec plus{1.0}, minus{-1.0};
                const double wp = unif ? 0.5 : rho_(plus);
                const double wm = unif ? 0.5 : rho_(minus);
                return wp * h(plus) + wm * h(minus);
            }
            if (dim_ == 2) {
                const double w0 = unif ? 1.0 / (2.0 * kPi) : 1.0;
                auto g = [&](double phi) {
                    const Vec th = angle_to_dir(phi);
                    return w0 * h(th) * (unif ? 1.0 : rho_(th));
                };
                return integrate_adaptive(g, 0.0, 2.0 * kPi, tol, tol).value;
            }
            if (dim_ == 3) {
                const double w0 = unif ? 1.0 / (4.0 * kPi) : 1.0;
                auto outer = [&](double u) {
                    const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
                    auto inner = [&](double phi) {
                        const Vec th{s * std::cos(phi), s * std::sin(phi), u};
                        return w0 * h(th) * (unif ? 1.0 : rho_(th));
                    };
                    return integrate_adaptive(inner, 0.0, 2.0 * kPi, tol * 10, tol * 10).value;
                };
                return integrate_adaptive(outer, -1.0, 1.0, tol, tol).value;
            }
            throw domain_error("sphere quadrature beyond d=3 is not supported here");
        }
    }
    return 0.0;
}

bool SpectralMeasure::is_symmetric() const {
    switch (kind_) {
        case Kind::Uniform:
            return true;
        case Kind::Atoms: {
            for (const auto& a : atoms_) {
                bool matched = false;
                for (const auto& b : atoms_) {
                    double diff = 0.0;
                    for (std::size_t i = 0; i < a.direction.size(); ++i)
                        diff = std::max(diff, std::fabs(a.direction[i] + b.direction[i]));
                    if (diff <= 1e-12 && std::fabs(a.weight - b.weight) <= 1e-12) {
                        matched = true;
                        break;
                    }
                }
                if (!matched) return false;
            }
            return true;
        }
        case Kind::Density: {
            // probe grid: reflection symmetry of the density values
            const int probes = 64;
            for (int i = 0; i < probes; ++i) {
                Vec th(dim_, 0.0);
                if (dim_ == 1) {
                    th[0] = (i % 2 == 0) ? 1.0 : -1.0;
                } else {
                    const double phi = 2.0 * kPi * i / probes;
                    th[0] = std::cos(phi);
                    th[1] = std::sin(phi);
                    if (dim_ >= 3) {
                        const double u = -1.0 + 2.0 * (i + 0.5) / probes;
                        const double s = std::sqrt(1.0 - u * u);
                        th[0] *= s;
                        th[1] *= s;
                        th[2] = u;
                    }
                }
                Vec mth = th;
                for (auto& c : mth) c = -c;
                if (std::fabs(rho_(th) - rho_(mth)) > 1e-12) return false;
            }
            return true;
        }
    }
    return false;
}

Vec SpectralMeasure::mean_direction() const {
    Vec m(dim_, 0.0);
    if (kind_ == Kind::Atoms) {
        for (const auto& a : atoms_)
            for (int i = 0; i < dim_; ++i) m[i] += a.weight * a.direction[i];
        return m;
    }
    if (kind_ == Kind::Uniform) return m;  // exactly zero
    for (int i = 0; i < dim_; ++i)
        m[i] = integrate([i](const Vec& th) { return th[i]; }, 1e-11);
    return m;
}

std::string SpectralMeasure::to_text() const {
    switch (kind_) {
        case Kind::Uniform:
            return "uniform";
        case Kind::Density:
            return "density:" + density_name_;
        case Kind::Atoms: {
            std::ostringstream os;
            os.precision(17);
            for (const auto& a : atoms_) {
                for (double c : a.direction) os << c << " ";
                os << a.weight << "\n";
            }
            return os.str();
        }
    }
    return {};
}

SpectralMeasure SpectralMeasure::from_text(
    const std::string& text, int dim_hint,
    const std::function<std::function<double(const Vec&)>(const std::string&)>& density_lookup) {
    std::string t = text;
    // trim
    const auto first = t.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw usage_error("empty spectral measure config");
    const auto last = t.find_last_not_of(" \t\r\n");
    t = t.substr(first, last - first + 1);
    if (t == "uniform") return uniform(dim_hint);
    if (t.rfind("density:", 0) == 0) {
        const std::string name = t.substr(8);
        if (!density_lookup) throw usage_error("no density registry provided");
        auto rho = density_lookup(name);
        if (!rho) throw usage_error("unknown density: " + name);
        return density(dim_hint, name, rho);
    }
    std::vector<Atom> list;
    std::istringstream is(t);
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::vector<double> vals;
        double v;
        while (ls >> v) vals.push_back(v);
        if (vals.empty()) continue;
        if (vals.size() < 2) throw usage_error("atom row needs d coordinates and a weight");
        Atom a;
        a.weight = vals.back();
        a.direction.assign(vals.begin(), vals.end() - 1);
        list.push_back(std::move(a));
    }
    return atoms(std::move(list));
}

// ---------------------------------------------------------------------------
// StableLaw

StableLaw::StableLaw(double alpha, SpectralMeasure nu) : alpha_(alpha), nu_(std::move(nu)) {
    check_alpha(alpha);
    d_alpha_ = d_alpha(alpha_);
    if (alpha_ == 1.0) {
        const Vec m = nu_.mean_direction();
        if (norm2(m) > 1e-10)
            throw domain_error("alpha=1 requires a mean-zero spectral measure");
    }
}

Complex StableLaw::cf(const Vec& lambda) const {
    if (static_cast<int>(lambda.size()) != nu_.dim())
        throw domain_error("lambda dimension mismatch");
    const double lnorm = norm2(lambda);
    if (lnorm == 0.0) return {1.0, 0.0};
    Complex expo{0.0, 0.0};
    switch (nu_.kind()) {
        case SpectralMeasure::Kind::Atoms: {
            for (const auto& a : nu_.atom_list())
                expo += a.weight * psi_alpha(dot(lambda, a.direction), alpha_);
            break;
        }
        case SpectralMeasure::Kind::Uniform: {
            // reduce to the polar angle u = <lambda, theta>/|lambda|; the
            // imaginary part of psi integrates to zero by symmetry
            const int d = nu_.dim();
            double j;
            if (d == 1) {
                j = std::pow(lnorm, alpha_);
            } else if (d == 2) {
                // u = sin t removes the (1-u^2)^{-1/2} endpoint singularity
                const double wnorm = sphere_area(1) / sphere_area(2);
                auto g = [&](double t) {
                    return std::pow(std::fabs(lnorm * std::sin(t)), alpha_);
                };
                j = 2.0 * wnorm * integrate_adaptive(g, 0.0, kPi / 2.0, 1e-11, 1e-14).value;
            } else if (d == 3) {
                const double wnorm = sphere_area(2) / sphere_area(3);
                auto g = [&](double u) { return std::pow(std::fabs(lnorm * u), alpha_); };
                j = 2.0 * wnorm * integrate_adaptive(g, 0.0, 1.0, 1e-11, 1e-14).value;
            } else {
                throw domain_error("uniform cf beyond d=3 is not supported");
            }
            expo = Complex(j, 0.0);
            break;
        }
        case SpectralMeasure::Kind::Density: {
            const double re = nu_.integrate(
                [&](const Vec& th) { return psi_alpha(dot(lambda, th), alpha_).real(); }, 1e-10);
            const double im = nu_.integrate(
                [&](const Vec& th) { return psi_alpha(dot(lambda, th), alpha_).imag(); }, 1e-10);
            expo = Complex(re, im);
            break;
        }
    }
    return std::exp(-expo);
}

Complex stable_cf(const StableLaw& law, const Vec& lambda) { return law.cf(lambda); }

// ---------------------------------------------------------------------------
// Test functions

TestFunction TestFunction::cos_wave(const Vec& lambda) {
    TestFunction t;
    t.dim = static_cast<int>(lambda.size());
    t.id = "cos";
    t.f = [lambda](const Vec& x) { return std::cos(dot(lambda, x)); };
    t.grad = [lambda](const Vec& x) {
        const double s = -std::sin(dot(lambda, x));
        Vec g(lambda.size());
        for (std::size_t i = 0; i < lambda.size(); ++i) g[i] = s * lambda[i];
        return g;
    };
    const double ln = norm2(lambda);
    for (int k = 0; k <= 4; ++k) t.norm_bound[k] = std::pow(ln, k);
    t.norm_bound[0] = 1.0;
    return t;
}

TestFunction TestFunction::sin_wave(const Vec& lambda) {
    TestFunction t = cos_wave(lambda);
    t.id = "sin";
    t.f = [lambda](const Vec& x) { return std::sin(dot(lambda, x)); };
    t.grad = [lambda](const Vec& x) {
        const double c = std::cos(dot(lambda, x));
        Vec g(lambda.size());
        for (std::size_t i = 0; i < lambda.size(); ++i) g[i] = c * lambda[i];
        return g;
    };
    return t;
}

TestFunction TestFunction::linear(const Vec& a) {
    TestFunction t;
    t.dim = static_cast<int>(a.size());
    t.id = "linear";
    t.f = [a](const Vec& x) { return dot(a, x); };
    t.grad = [a](const Vec&) { return a; };
    const double nan = std::nan("");
    t.norm_bound = {nan, norm2(a), 0.0, 0.0, 0.0};
    return t;
}

TestFunction TestFunction::gauss_bump(const Vec& center, double width) {
    if (!(width > 0.0)) throw domain_error("width must be positive");
    TestFunction t;
    t.dim = static_cast<int>(center.size());
    t.id = "gauss";
    t.f = [center, width](const Vec& x) {
        double q = 0.0;
        for (std::size_t i = 0; i < center.size(); ++i) {
            const double d = x[i] - center[i];
            q += d * d;
        }
        return std::exp(-q / (2.0 * width * width));
    };
    t.grad = [center, width, f = t.f](const Vec& x) {
        const double v = f(x);
        Vec g(center.size());
        for (std::size_t i = 0; i < center.size(); ++i)
            g[i] = -v * (x[i] - center[i]) / (width * width);
        return g;
    };
    // 1-d Hermite suprema with a safety margin
    const double w = width;
    t.norm_bound = {1.0, 0.64 / w, 1.05 / (w * w), 1.45 / (w * w * w), 3.2 / (w * w * w * w)};
    return t;
}

TestFunction TestFunction::constant(int dim, double value) {
    TestFunction t;
    t.dim = dim;
    t.id = "const";
    t.f = [value](const Vec&) { return value; };
    t.grad = [dim](const Vec&) { return Vec(dim, 0.0); };
    t.norm_bound = {std::fabs(value), 0.0, 0.0, 0.0, 0.0};
    return t;
}

// ---------------------------------------------------------------------------
// Generator

namespace {

// radial integral for one direction theta
double radial_integral(const StableLaw& law, const TestFunction& f, const Vec& x, const Vec& th,
                       const QuadConfig& q) {
    const double alpha = law.alpha();
    const bool grad_inner = alpha >= 1.0;  // k_alpha(r)=1 on (0,1]
    const bool grad_outer = alpha > 1.0;   // k_alpha(r)=1 on (1,inf) only for alpha>1
    if (!f.grad && alpha >= 1.0)
        throw domain_error("generator needs an analytic gradient for alpha >= 1");
    const Vec gfx = f.grad ? f.grad(x) : Vec(x.size(), 0.0);
    const double fx = f.f(x);
    const double gth = dot(gfx, th);
    Vec y(x.size());
    auto shifted = [&](double r) {
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + r * th[i];
        return f.f(y);
    };
    auto core = [&](double r, bool with_grad) {
        return shifted(r) - fx - (with_grad ? r * gth : 0.0);
    };

    // (0, delta]: f(x+r th) - f(x) cancels catastrophically for tiny r, so
    // this head is integrated from the Taylor form with an FD second
    // derivative along theta (error O(delta^{3-alpha}))
    const double delta = 1e-4;
    const double fp = shifted(delta), fm = shifted(-delta);
    const double h_theta = (fp - 2.0 * fx + fm) / (delta * delta);
    double inner = 0.5 * h_theta * std::pow(delta, 2.0 - alpha) / (2.0 - alpha);
    if (!grad_inner) {
        const double g1 = f.grad ? gth : (fp - fm) / (2.0 * delta);
        inner += g1 * std::pow(delta, 1.0 - alpha) / (1.0 - alpha);
    }

    // [delta, 1]: u = r^p removes the integrable singularity at 0
    const double p = (alpha > 1.0) ? (2.0 - alpha) : (alpha < 1.0 ? 1.0 - alpha : 1.0);
    auto gu = [&](double u) {
        const double r = std::pow(u, 1.0 / p);
        const double jac = (1.0 / p) * std::pow(u, 1.0 / p - 1.0);
        return core(r, grad_inner) * std::pow(r, -1.0 - alpha) * jac;
    };
    inner += integrate_panels(gu, std::pow(delta, p), 1.0, std::max(2, q.inner_nodes / 16));

    // [1, r_max]: bounded-length panels resolve oscillatory test functions
    auto go = [&](double r) { return core(r, grad_outer) * std::pow(r, -1.0 - alpha); };
    double outer = 0.0;
    double a = 1.0;
    while (a < q.r_max) {
        const double b = std::min(q.r_max, a + q.outer_panel);
        outer += integrate_panels(go, a, b, 1);
        a = b;
    }
    // exact completion of the non-oscillatory tail pieces beyond r_max; what
    // remains unaccounted is int_R^inf f(x+r th) r^{-1-alpha} dr, small for
    // bounded f but exactly cancelling for unbounded (e.g. linear) f, so the
    // completion only applies when f declares a sup norm
    if (f.has_norm(0)) {
        outer -= fx * std::pow(q.r_max, -alpha) / alpha;
        if (grad_outer) outer -= gth * std::pow(q.r_max, 1.0 - alpha) / (alpha - 1.0);
    }
    return inner + outer;
}

}  // namespace

GeneratorResult generator_apply(const StableLaw& law, const TestFunction& f, const Vec& x,
                                const QuadConfig& quad) {
    if (static_cast<int>(x.size()) != law.dim()) throw domain_error("x dimension mismatch");
    const double alpha = law.alpha();
    auto per_theta = [&](const Vec& th) { return radial_integral(law, f, x, th, quad); };
    double total = 0.0;
    const auto& nu = law.nu();
    if (nu.kind() == SpectralMeasure::Kind::Atoms) {
        for (const auto& a : nu.atom_list()) total += a.weight * per_theta(a.direction);
    } else {
        total = nu.integrate(per_theta, 1e-8);
    }
    GeneratorResult res;
    res.value = law.d_alpha_cached() * total;
    const double fnorm = f.has_norm(0) ? f.norm_bound[0] : std::fabs(f.f(x)) + 1.0;
    res.truncation_bound = 2.0 * fnorm * law.d_alpha_cached() * nu.total_mass() *
                           std::pow(quad.r_max, -alpha) / alpha;
    return res;
}

}  // namespace stablelab
