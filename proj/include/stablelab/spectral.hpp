#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace stablelab {

using Vec = std::vector<double>;
using Complex = std::complex<double>;

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
double sphere_area(int d);  // surface measure of S^{d-1} (counting measure for d=1)

/// psi_alpha, the characteristic exponent of a strictly alpha-stable law with
/// spectral mass at +1. Continuous at t=0 with value 0.
Complex psi_alpha(double t, double alpha);

/// (int_0^inf (1-cos y)/y^{1+alpha} dy)^{-1}, by deterministic quadrature.
double d_alpha(double alpha);

struct Atom {
    Vec direction;  // unit vector
    double weight;  // > 0
};

/// Finite measure on the unit sphere; atoms, uniform, or a caller-supplied
/// density against the surface measure (total mass must already be 1).
class SpectralMeasure {
public:
    enum class Kind { Atoms, Uniform, Density };

    static SpectralMeasure atoms(std::vector<Atom> atoms);
    static SpectralMeasure uniform(int dim);
    static SpectralMeasure density(int dim, std::string name,
                                   std::function<double(const Vec&)> rho);

    int dim() const { return dim_; }
    Kind kind() const { return kind_; }
    double total_mass() const { return total_mass_; }
    const std::vector<Atom>& atom_list() const { return atoms_; }
    const std::string& density_name() const { return density_name_; }
    double density_value(const Vec& theta) const;  // Density representation only

    bool is_symmetric() const;
    Vec mean_direction() const;

    /// integral of h(theta) against the measure (adaptive for continuous
    /// representations, exact sum for atoms).
    double integrate(const std::function<double(const Vec&)>& h, double tol = 1e-10) const;

    /// Serialization per the structured text config: atom rows
    /// "theta_1 ... theta_d w", or the literal "uniform" / "density:<name>".
    std::string to_text() const;
    static SpectralMeasure from_text(
        const std::string& text, int dim_hint,
        const std::function<std::function<double(const Vec&)>(const std::string&)>&
            density_lookup = {});

private:
    SpectralMeasure() = default;
    Kind kind_ = Kind::Uniform;
    int dim_ = 1;
    double total_mass_ = 1.0;
    std::vector<Atom> atoms_;
    std::string density_name_;
    std::function<double(const Vec&)> rho_;
};

/// Strictly alpha-stable law S_alpha(nu): caches d_alpha, owns the
/// characteristic function and the generator quadrature.
class StableLaw {
public:
    StableLaw(double alpha, SpectralMeasure nu);

    double alpha() const { return alpha_; }
    const SpectralMeasure& nu() const { return nu_; }
    double d_alpha_cached() const { return d_alpha_; }
    int dim() const { return nu_.dim(); }

    /// exp(-int psi_alpha(<lambda,theta>) nu(dtheta))
    Complex cf(const Vec& lambda) const;

private:
    double alpha_;
    SpectralMeasure nu_;
    double d_alpha_;
};

Complex stable_cf(const StableLaw& law, const Vec& lambda);

/// Bounded test function with analytic gradient and declared operator-norm
/// bounds for orders 0..4 (NaN marks "unavailable/unbounded").
struct TestFunction {
    std::string id;
    int dim = 1;
    std::function<double(const Vec&)> f;
    std::function<Vec(const Vec&)> grad;  // optional
    std::array<double, 5> norm_bound{};   // ||grad^k||_{op,inf}

    bool has_norm(int k) const { return k >= 0 && k <= 4 && std::isfinite(norm_bound[k]); }

    static TestFunction cos_wave(const Vec& lambda);
    static TestFunction sin_wave(const Vec& lambda);
    static TestFunction linear(const Vec& a);
    static TestFunction gauss_bump(const Vec& center, double width);
    static TestFunction constant(int dim, double value);
};

struct QuadConfig {
    double r_max = 1e4;         // radial truncation
    int inner_nodes = 64;       // Gauss nodes on the transformed (0,1] piece
    double outer_panel = 2.0;   // panel length on [1, r_max]
    int outer_nodes = 16;       // Gauss nodes per outer panel
    int sphere_nodes = 64;      // angular nodes for continuous nu
};

struct GeneratorResult {
    double value = 0.0;
    double truncation_bound = 0.0;  // 2 ||f|| d_alpha nu(S) r_max^-alpha / alpha
};

/// Applies the stable generator to f at x by singular-integral quadrature.
GeneratorResult generator_apply(const StableLaw& law, const TestFunction& f, const Vec& x,
                                const QuadConfig& quad = {});

}  // namespace stablelab
