#include "stablelab/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "stablelab/errors.hpp"

namespace stablelab {

MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe r;
    r.n = xs.size();
    if (xs.empty()) return r;
    double s = 0.0, c = 0.0;
    for (double x : xs) {  // Neumaier
        const double t = s + x;
        c += (std::fabs(s) >= std::fabs(x)) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    r.mean = (s + c) / xs.size();
    if (xs.size() > 1) {
        double v = 0.0;
        for (double x : xs) v += (x - r.mean) * (x - r.mean);
        v /= (xs.size() - 1);
        r.se = std::sqrt(v / xs.size());
    }
    return r;
}

OlsFit ols(const std::vector<double>& x, const std::vector<double>& y,
           const std::vector<double>& z) {
    const std::size_t n = x.size();
    if (y.size() != n || (!z.empty() && z.size() != n))
        throw domain_error("ols: size mismatch");
    if (n < 2) throw domain_error("ols: need at least 2 points");
    OlsFit fit;
    fit.has_aux = !z.empty();
    // normal equations for up to 3 columns [1, x, z]
    const int p = fit.has_aux ? 3 : 2;
    double A[3][3] = {{0}}, b[3] = {0};
    for (std::size_t i = 0; i < n; ++i) {
        const double row[3] = {1.0, x[i], fit.has_aux ? z[i] : 0.0};
        for (int r = 0; r < p; ++r) {
            b[r] += row[r] * y[i];
            for (int c = 0; c < p; ++c) A[r][c] += row[r] * row[c];
        }
    }
    // Gaussian elimination with partial pivoting
    double beta[3] = {0};
    {
        double M[3][4];
        for (int r = 0; r < p; ++r) {
            for (int c = 0; c < p; ++c) M[r][c] = A[r][c];
            M[r][p] = b[r];
        }
        for (int col = 0; col < p; ++col) {
            int piv = col;
            for (int r = col + 1; r < p; ++r)
                if (std::fabs(M[r][col]) > std::fabs(M[piv][col])) piv = r;
            if (std::fabs(M[piv][col]) < 1e-300) throw numeric_error("ols: singular design");
            std::swap_ranges(M[col], M[col] + p + 1, M[piv]);
            for (int r = 0; r < p; ++r) {
                if (r == col) continue;
                const double f = M[r][col] / M[col][col];
                for (int c = col; c <= p; ++c) M[r][c] -= f * M[col][c];
            }
        }
        for (int r = 0; r < p; ++r) beta[r] = M[r][p] / M[r][r];
    }
    fit.intercept = beta[0];
    fit.slope = beta[1];
    fit.aux = fit.has_aux ? beta[2] : 0.0;
    double ybar = 0.0;
    for (double v : y) ybar += v;
    ybar /= n;
    double ss_res = 0.0, ss_tot = 0.0;
    fit.residuals.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double yhat = beta[0] + beta[1] * x[i] + (fit.has_aux ? beta[2] * z[i] : 0.0);
        fit.residuals[i] = y[i] - yhat;
        ss_res += fit.residuals[i] * fit.residuals[i];
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    fit.r2 = ss_tot > 0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
    return fit;
}

SlopeCi bootstrap_slope_ci(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<double>& z, int resamples, RngStream rng,
                           double level) {
    const OlsFit base = ols(x, y, z);
    SlopeCi ci;
    ci.slope = base.slope;
    ci.aux = base.aux;
    const std::size_t n = x.size();
    std::vector<double> slopes(resamples), auxs(resamples), yb(n);
    for (int r = 0; r < resamples; ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = static_cast<std::size_t>(rng.u01() * n) % n;
            const double yhat = y[i] - base.residuals[i];
            yb[i] = yhat + base.residuals[j];
        }
        const OlsFit f = ols(x, yb, z);
        slopes[r] = f.slope;
        auxs[r] = f.aux;
    }
    std::sort(slopes.begin(), slopes.end());
    std::sort(auxs.begin(), auxs.end());
    const double tail = (1.0 - level) / 2.0;
    const auto pick = [&](const std::vector<double>& v, double q) {
        const double pos = q * (v.size() - 1);
        const std::size_t i = static_cast<std::size_t>(pos);
        const double w = pos - i;
        return i + 1 < v.size() ? v[i] * (1 - w) + v[i + 1] * w : v.back();
    };
    ci.lo = pick(slopes, tail);
    ci.hi = pick(slopes, 1.0 - tail);
    ci.aux_lo = pick(auxs, tail);
    ci.aux_hi = pick(auxs, 1.0 - tail);
    return ci;
}

Chi2Result chi2_two_sample(const std::vector<std::uint64_t>& counts_a,
                           const std::vector<std::uint64_t>& counts_b, double min_count) {
    if (counts_a.size() != counts_b.size()) throw domain_error("chi2: bin count mismatch");
    // merge sparse bins rightward so every used bin has enough mass
    std::vector<double> a, b;
    double accA = 0.0, accB = 0.0;
    for (std::size_t i = 0; i < counts_a.size(); ++i) {
        accA += static_cast<double>(counts_a[i]);
        accB += static_cast<double>(counts_b[i]);
        if (accA + accB >= min_count) {
            a.push_back(accA);
            b.push_back(accB);
            accA = accB = 0.0;
        }
    }
    if (accA + accB > 0) {
        if (a.empty()) {
            a.push_back(accA);
            b.push_back(accB);
        } else {
            a.back() += accA;
            b.back() += accB;
        }
    }
    Chi2Result res;
    res.bins_used = static_cast<int>(a.size());
    double na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na += a[i];
        nb += b[i];
    }
    if (na == 0.0 || nb == 0.0 || a.size() < 2) return res;
    // standard two-sample statistic with unequal totals
    const double ka = std::sqrt(nb / na), kb = std::sqrt(na / nb);
    double stat = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double tot = a[i] + b[i];
        if (tot <= 0) continue;
        const double d = ka * a[i] - kb * b[i];
        stat += d * d / tot;
    }
    res.statistic = stat;
    res.dof = static_cast<int>(a.size()) - 1;
    res.p_value = chi2_sf(stat, res.dof);
    return res;
}

double gamma_q(double a, double x) { return boost::math::gamma_q(a, x); }

double chi2_sf(double x, int k) {
    if (k <= 0) return 1.0;
    return boost::math::gamma_q(0.5 * k, 0.5 * x);
}

}  // namespace stablelab
