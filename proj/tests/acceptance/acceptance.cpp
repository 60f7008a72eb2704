// Acceptance suite: one criterion per subcommand (ac1..ac7, properties, all).
// Each criterion prints a single PASS/FAIL line; the process exits nonzero if
// any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <algorithm>

#include "stablelab/config.hpp"
#include "stablelab/decomposition.hpp"
#include "stablelab/stats.hpp"
#include "stablelab/rate_lab.hpp"
#include "stablelab/samplers.hpp"
#include "stablelab/semigroup.hpp"
#include "stablelab/spectral.hpp"
#include "stablelab/tv_metrics.hpp"

using namespace stablelab;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(const std::string& id, bool pass, const std::string& detail, double seconds) {
    std::printf("%-4s %-34s %s  (%.1f s)%s%s\n", id.c_str(),
                pass ? "" : "", pass ? "PASS" : "FAIL", seconds,
                detail.empty() ? "" : "  -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<long long> dyadic(int lo, int hi) {
    std::vector<long long> g;
    for (int e = lo; e <= hi; ++e) g.push_back(1LL << e);
    return g;
}

// ---------------------------------------------------------------------------

void ac1() {
    const auto t0 = Clock::now();
    const double computed = delta_n(1000000, 1.0, 1);
    const double stated = 1.0 / (M_PI * M_PI) - 0.5;  // the pinned criterion value
    const double rel_stated = std::fabs(computed - stated) / std::fabs(stated);
    const double derived = delta_limit(1.0, 1);
    const double rel_derived = std::fabs(computed - derived) / std::fabs(derived);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "delta_1e6 = %.6f; pinned limit %.6f (rel gap %.3f); "
                  "derived closed form %.6f (rel gap %.2e)",
                  computed, stated, rel_stated, derived, rel_derived);
    report("AC-1", rel_stated < 0.01, buf, seconds_since(t0));
}

void ac2() {
    const auto t0 = Clock::now();
    bool all = true;
    std::string detail;
    for (double alpha : {1.5, 0.8, 1.0}) {
        RateScenario sc = builtin_scenario(alpha == 1.5   ? "pareto-a15"
                                           : alpha == 0.8 ? "pareto-a08"
                                                          : "pareto-a1");
        const std::vector<SweepRow> rows = run_sweep(sc);
        std::vector<std::pair<double, double>> table;
        for (const auto& r : rows)
            if (!r.failed) table.emplace_back(static_cast<double>(r.n), r.estimate.value);
        const RateFit fit = fit_loglog(table);
        const double want = pareto_rate_exponent(alpha);
        const bool ok = std::fabs(fit.slope - want) <= 0.1;
        char buf[128];
        std::snprintf(buf, sizeof(buf), "alpha=%.1f slope %.4f (target %.4f) | ", alpha,
                      fit.slope, want);
        detail += buf;
        all = all && ok;
    }
    report("AC-2", all, detail, seconds_since(t0));
}

void ac3() {
    const auto t0 = Clock::now();
    const HeadlineReport real = headline_alpha1(dyadic(4, 14));
    std::vector<std::pair<double, double>> synth;
    for (int e = 4; e <= 14; ++e) {
        const double n = std::pow(2.0, e);
        synth.emplace_back(n, 0.12 * std::pow(std::log(n), 2.0) / n);
    }
    const HeadlineReport neg = headline_from_table(synth);
    std::vector<std::pair<double, double>> plain;
    for (int e = 4; e <= 14; ++e) {
        const double n = std::pow(2.0, e);
        plain.emplace_back(n, 0.12 / n);
    }
    const HeadlineReport pos = headline_from_table(plain);
    const bool pass = real.verdict_n_inverse && !neg.verdict_n_inverse &&
                      pos.verdict_n_inverse && real.conclusive;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "real: ratio %.3f ln-exp [%.2f, %.2f] verdict %d; synth-log2 verdict %d; "
                  "synth-plain verdict %d",
                  real.ratio_max_over_min, real.ln_ci_lo, real.ln_ci_hi,
                  static_cast<int>(real.verdict_n_inverse),
                  static_cast<int>(neg.verdict_n_inverse),
                  static_cast<int>(pos.verdict_n_inverse));
    report("AC-3", pass, buf, seconds_since(t0));
}

void ac4() {
    const auto t0 = Clock::now();
    const double alpha = 1.5;
    const TailModel model = pareto_model(1, alpha);
    const StableLaw law(alpha, SpectralMeasure::uniform(1));
    const TestFunction f = TestFunction::cos_wave({1.0});
    std::vector<double> lx, ly, ratios;
    for (long long n : dyadic(3, 10)) {
        OperatorConfig cfg(n, law, model, 10000000, 20240);
        const GapEstimate g = one_step_gap(cfg, f, {0.0});
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(std::fabs(g.value)));
        ratios.push_back(std::fabs(g.value) /
                         d_bound(n, alpha, model.gamma(), f.norm_bound, true));
    }
    const SlopeCi ci = bootstrap_slope_ci(lx, ly, {}, 200, RngStream(99, 9), 0.95);
    const double band = *std::max_element(ratios.begin(), ratios.end()) /
                        *std::min_element(ratios.begin(), ratios.end());
    const bool pass = std::fabs(ci.slope + 4.0 / 3.0) <= 0.15 && band < 4.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "slope %.4f (target -1.3333, tol 0.15); |gap|/D band %.2f",
                  ci.slope, band);
    report("AC-4", pass, buf, seconds_since(t0));
}

void ac5() {
    const auto t0 = Clock::now();
    bool pass = true;
    std::string detail;

    const LightDecomposition light = light_decompose(pareto_model(1, 1.0));
    const TestReport lrep = certify_mixture(light, 1000000, 64, RngStream(501, 0));
    pass = pass && lrep.pass;
    detail += "light p-value " + std::to_string(lrep.p_value);

    const HeavyDecomposition heavy = heavy_decompose(pareto_model(1, 0.5), 1.0);
    const TestReport hrep = certify_mixture(heavy, 1000000, 64, RngStream(502, 0));
    pass = pass && hrep.pass;
    detail += "; heavy p-value " + std::to_string(hrep.p_value);

    // q = 0.5 within 3 s.e. of the Monte Carlo acceptance rate
    {
        RngStream rng(503, 0);
        const long long n = 1000000;
        double acc = 0.0, acc2 = 0.0;
        for (long long i = 0; i < n; ++i) {
            const double w =
                1.0 - std::min(1.0, std::pow(std::fabs(model_draw(heavy.source(), rng)[0]),
                                             0.5 - 1.0));
            acc += w;
            acc2 += w * w;
        }
        const double mean = acc / n;
        const double se = std::sqrt((acc2 / n - mean * mean) / n);
        const bool qok = std::fabs(heavy.q() - 0.5) < 1e-8 &&
                         std::fabs(mean - 0.5) <= 3.0 * se;
        const bool aok = std::fabs(heavy.a_tilde() - 1.0) <= 1e-8;
        pass = pass && qok && aok;
        char buf[128];
        std::snprintf(buf, sizeof(buf), "; q=%.6f (mc %.6f +- %.1e), A~=%.8f", heavy.q(),
                      mean, se, heavy.a_tilde());
        detail += buf;
    }

    // negative controls must fail
    const double pc = light.p() + 0.1 < 1.0 ? light.p() + 0.1 : light.p() - 0.1;
    const TestReport lneg = certify_mixture(light, 1000000, 64, RngStream(504, 0), pc);
    const TestReport hneg =
        certify_mixture(heavy, 1000000, 64, RngStream(505, 0), heavy.q() + 0.1);
    pass = pass && !lneg.pass && !hneg.pass;
    detail += "; corrupted controls rejected: " +
              std::string(!lneg.pass && !hneg.pass ? "yes" : "NO");
    report("AC-5", pass, detail, seconds_since(t0));
}

void ac6() {
    const auto t0 = Clock::now();
    bool pass = true;
    std::string detail;

    // generator eigen-identity at 1e-6
    {
        double worst = 0.0;
        for (double a : {0.8, 1.0, 1.5}) {
            StableLaw law(a, SpectralMeasure::uniform(1));
            const TestFunction f = TestFunction::cos_wave({1.0});
            QuadConfig q;
            q.r_max = 1e5;
            const double psi = -std::log(stable_cf(law, {1.0}).real());
            for (double x : {0.0, 0.7}) {
                const double got = generator_apply(law, f, {x}, q).value;
                worst = std::max(worst, std::fabs(got + psi * std::cos(x)));
            }
        }
        pass = pass && worst <= 1e-6;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "eigen worst err %.2e", worst);
        detail += buf;
    }

    // Lemma-A.2-style decay slopes
    {
        QuadConfig q;
        q.r_max = 200.0;
        q.inner_nodes = 32;
        const TestFunction f = TestFunction::cos_wave({1.0});

        OperatorConfig cfg15(16, StableLaw(1.5, SpectralMeasure::uniform(1)),
                             pareto_model(1, 1.5), 20000, 601);
        const SlopeProbe p15 =
            generator_error_slope(cfg15, f, {0.0}, {16, 32, 64, 128, 256, 512, 1024}, q);
        const bool ok15 = std::fabs(p15.slope + 2.0 / 1.5) <= 0.3;
        pass = pass && ok15;

        OperatorConfig cfg08(16, StableLaw(0.8, SpectralMeasure::uniform(1)),
                             pareto_model(1, 0.8), 400000, 602);
        const SlopeProbe p08 = generator_error_slope(cfg08, f, {0.0}, {8, 16, 32, 64, 128}, q);
        const bool ok08 = std::fabs(p08.slope + 2.0) <= 0.3;
        pass = pass && ok08;

        char buf[196];
        std::snprintf(buf, sizeof(buf),
                      "; a=1.5 slope %.3f (pinned target -1.333+-0.3 -> %s), "
                      "a=0.8 slope %.3f (target -2+-0.3 -> %s)",
                      p15.slope, ok15 ? "ok" : "violated", p08.slope, ok08 ? "ok" : "violated");
        detail += buf;
    }

    // semigroup composition and contraction at MC tolerance
    {
        const double alpha = 1.5;
        const StableLaw law(alpha, SpectralMeasure::uniform(1));
        OperatorConfig cfg(64, law, pareto_model(1, alpha), 400000, 603);
        const TestFunction f = TestFunction::cos_wave({1.0});
        // composition: two-increment draw vs P_{k+l}
        RngStream rng(604, 0);
        StableSampler s(law);
        const double sk = std::pow(12.0 / 64.0, 1.0 / alpha);
        const double sl = std::pow(20.0 / 64.0, 1.0 / alpha);
        double acc = 0.0, acc2 = 0.0;
        for (long long i = 0; i < cfg.mc_samples; ++i) {
            const double y = sk * s.draw(rng)[0] + sl * s.draw(rng)[0];
            const double v = f.f({y});
            acc += v;
            acc2 += v * v;
        }
        const double mean = acc / cfg.mc_samples;
        const double se =
            std::sqrt((acc2 / cfg.mc_samples - mean * mean) / cfg.mc_samples);
        const ValueSe direct = apply_P(cfg, f, 32, {0.0});
        const bool comp_ok =
            std::fabs(mean - direct.value) <=
            4.0 * std::sqrt(se * se + direct.se * direct.se);
        // contraction across operators and m values
        bool contr_ok = true;
        for (long long m : {1LL, 16LL, 64LL}) {
            const ValueSe p = apply_P(cfg, f, m, {0.4});
            const ValueSe qv = apply_Q(cfg, f, m, {0.4});
            contr_ok = contr_ok && std::fabs(p.value) <= 1.0 + 3.0 * p.se &&
                       std::fabs(qv.value) <= 1.0 + 3.0 * qv.se;
        }
        pass = pass && comp_ok && contr_ok;
        detail += std::string("; composition ") + (comp_ok ? "ok" : "violated") +
                  ", contraction " + (contr_ok ? "ok" : "violated");
    }
    report("AC-6", pass, detail, seconds_since(t0));
}

void ac7() {
    const auto t0 = Clock::now();
    const long long n = 1000000;
    bool pass = true;
    std::string detail;
    auto add = [&](const std::string& name, double dev) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%s%s %.2f", detail.empty() ? "" : "; ", name.c_str(),
                      dev);
        detail += buf;
        pass = pass && dev < 4.0;
    };

    // 1-D stable, symmetric and skewed
    {
        std::vector<Vec> pts;
        pts.reserve(n);
        RngStream rng(701, 0);
        for (long long i = 0; i < n; ++i) pts.push_back({stable_1d(1.5, 0.5, 0.5, rng)});
        StableLaw law(1.5, SpectralMeasure::uniform(1));
        add("1d-sym", ecf_max_deviation(
                          pts, [&](const Vec& l) { return stable_cf(law, l); },
                          {{0.3}, {0.5}, {1.0}, {2.0}, {3.0}}));
    }
    {
        std::vector<Vec> pts;
        pts.reserve(n);
        RngStream rng(702, 0);
        for (long long i = 0; i < n; ++i) pts.push_back({stable_1d(0.7, 1.0, 0.0, rng)});
        StableLaw law(0.7, SpectralMeasure::atoms({{{1.0}, 1.0}}));
        add("1d-skew", ecf_max_deviation(
                           pts, [&](const Vec& l) { return stable_cf(law, l); },
                           {{0.3}, {0.5}, {1.0}, {-1.5}, {2.0}}));
    }
    // multivariate uniform sphere d=2
    {
        StableLaw law(1.5, SpectralMeasure::uniform(2));
        StableSampler s(law);
        std::vector<Vec> pts;
        pts.reserve(n);
        RngStream rng(703, 0);
        for (long long i = 0; i < n; ++i) pts.push_back(s.draw(rng));
        add("mv-d2", ecf_max_deviation(
                         pts, [&](const Vec& l) { return stable_cf(law, l); },
                         {{0.5, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {0.7, -0.7}, {1.5, 0.9}}));
    }
    // multivariate alpha=1 with the drift correction active
    {
        const double s2 = std::sqrt(2.0) / 2.0;
        const double w = 1.0 / (2.0 + std::sqrt(2.0));
        StableLaw law(1.0, SpectralMeasure::atoms({{{1.0, 0.0}, std::sqrt(2.0) * w},
                                                   {{-s2, s2}, w},
                                                   {{-s2, -s2}, w}}));
        StableSampler s(law);
        std::vector<Vec> pts;
        pts.reserve(n);
        RngStream rng(704, 0);
        for (long long i = 0; i < n; ++i) pts.push_back(s.draw(rng));
        add("mv-a1-drift",
            ecf_max_deviation(pts, [&](const Vec& l) { return stable_cf(law, l); },
                              {{1.0, 0.0}, {0.0, 1.0}, {0.7, -0.9}, {0.4, 0.4}, {2.0, 0.0}}));
    }
    // pareto and dna draws against the model characteristic function
    {
        const TailModel m = pareto_model(1, 1.2);
        const SampleBatch b = sample_model(m, n, RngStream(705, 0));
        add("pareto", ecf_max_deviation(
                          b.points, [&](const Vec& l) { return model_cf_1d(m, l[0]); },
                          {{0.3}, {0.7}, {1.0}, {2.0}, {4.0}}));
    }
    {
        const TailModel m =
            TailModel::dna_1d(0.9, 1.0, 0.6, 0.4, EpsFn::inv(), EpsFn::zero(), 1.0, 1.0);
        const SampleBatch b = sample_model(m, n, RngStream(706, 0));
        add("dna", ecf_max_deviation(
                       b.points, [&](const Vec& l) { return model_cf_1d(m, l[0]); },
                       {{0.3}, {0.7}, {1.0}, {2.0}, {4.0}}));
    }
    // normalized sums vs the closed-form cf of S_n
    {
        const TailModel m = pareto_model(1, 1.2);
        const SampleBatch b = sample_normalized_sums(m, 32, n, RngStream(707, 0), 0);
        ParetoCfContext ctx(1.2, 1);
        add("sums", ecf_max_deviation(
                        b.points,
                        [&](const Vec& l) {
                            return Complex{ctx.cf_sn(32, l[0]), 0.0};
                        },
                        {{0.3}, {0.7}, {1.0}, {2.0}, {3.0}}));
    }
    report("AC-7", pass, detail + " (max |ecf-cf| sqrtN, threshold 4)", seconds_since(t0));
}

void properties() {
    const auto t0 = Clock::now();
    bool pass = true;
    std::string detail;

    // Lambda-registry consistency: numeric slope of the rate matches the
    // registry exponent for several parameter sets
    {
        bool ok = true;
        for (auto [a, g, sym] : std::vector<std::tuple<double, double, bool>>{
                 {1.5, 2.0, true}, {1.2, 0.4, false}, {0.7, 0.5, false}, {0.7, 0.5, true}}) {
            const double n1 = 1e8, n2 = 1e10;
            const double slope = std::log(lambda_rate(static_cast<long long>(n2), a, g, sym) /
                                          lambda_rate(static_cast<long long>(n1), a, g, sym)) /
                                 std::log(n2 / n1);
            if (std::fabs(slope - theoretical_exponent(a, g, sym)) > 0.02) ok = false;
        }
        pass = pass && ok;
        detail += std::string("rate-registry ") + (ok ? "ok" : "violated");
    }

    // d=2 histogram lower-bound ordering sanity
    {
        const TailModel m2 = pareto_model(2, 1.5);
        const StableLaw law2(1.5, SpectralMeasure::uniform(2));
        RngStream rng(801, 0);
        auto lb_at = [&](long long nsum, std::uint64_t sub) {
            const SampleBatch sums =
                sample_normalized_sums(m2, nsum, 100000, RngStream(801, sub), 0);
            const SampleBatch stab = sample_stable(law2, 100000, RngStream(802, sub));
            return tv_histogram_lb(sums, stab, 48, RngStream(803, sub));
        };
        const DistanceEstimate lb64 = lb_at(64, 1);
        const DistanceEstimate lb1024 = lb_at(1024, 2);
        const bool ok = lb64.value >= 0.0 && lb64.value <= 1.0 &&
                        lb1024.value <= lb64.value + 3.0 * (lb64.error + lb1024.error);
        pass = pass && ok;
        char buf[96];
        std::snprintf(buf, sizeof(buf), "; d2 lb ordering %s (lb64 %.4f, lb1024 %.4f)",
                      ok ? "ok" : "violated", lb64.value, lb1024.value);
        detail += buf;
    }

    // Lemma 2.3 gradient-decay exponent probe, +-0.2 band
    {
        OperatorConfig cfg(1024, StableLaw(1.5, SpectralMeasure::uniform(1)),
                           pareto_model(1, 1.5), 300000, 804);
        const SlopeProbe p =
            gradient_decay_probe(cfg, TestFunction::cos_wave({1.0}), 1, {16, 64, 256, 1024});
        const bool ok = std::fabs(p.slope + 1.0 / 1.5) <= 0.2 && !p.inconclusive;
        pass = pass && ok;
        char buf[96];
        std::snprintf(buf, sizeof(buf), "; gradient-decay slope %.3f (target -0.667+-0.2) %s",
                      p.slope, ok ? "ok" : "violated");
        detail += buf;
    }
    report("PROC", pass, detail, seconds_since(t0));
}

}  // namespace

int main(int argc, char** argv) {
    const std::string which = argc > 1 ? argv[1] : "all";
    const bool all = which == "all";
    if (all || which == "ac1") ac1();
    if (all || which == "ac2") ac2();
    if (all || which == "ac3") ac3();
    if (all || which == "ac4") ac4();
    if (all || which == "ac5") ac5();
    if (all || which == "ac6") ac6();
    if (all || which == "ac7") ac7();
    if (all || which == "properties") properties();
    return g_failures == 0 ? 0 : 1;
}
