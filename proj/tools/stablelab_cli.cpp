// stablelab command-line front end: reproducible experiment execution with
// CSV/JSON artifacts. Exit codes: 0 success, 1 assertion/check failure,
// 2 usage error, 3 numeric error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "stablelab/config.hpp"
#include "stablelab/csvio.hpp"
#include "stablelab/decomposition.hpp"
#include "stablelab/errors.hpp"
#include "stablelab/rate_lab.hpp"
#include "stablelab/samplers.hpp"
#include "stablelab/semigroup.hpp"
#include "stablelab/tv_metrics.hpp"

using namespace stablelab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned workers = 0;
    std::string out_dir = ".";
    std::string config_path;
    std::optional<ExperimentConfig> config;
    std::string config_hash;
    std::string invocation;

    void finalize(const std::string& argv_line) {
        invocation = argv_line;
        if (!config_path.empty()) {
            config = ExperimentConfig::from_file(config_path);
            config_hash = config->config_hash;
            if (!seed_set) {
                seed = config->seed;
                seed_set = true;
            }
            if (workers == 0) workers = config->workers;
            if (out_dir == ".") out_dir = config->out_dir;
        } else {
            config_hash = fnv1a_hex(argv_line);
        }
        if (!seed_set) throw usage_error("--seed is mandatory (or provide it via --config)");
        fs::create_directories(out_dir);
    }

    TailModel model(const std::string& spec) const {
        if (config) return config->resolve_model(spec);
        return parse_model_spec(spec);
    }

    std::string path(const std::string& name) const {
        return (fs::path(out_dir) / name).string();
    }

    std::string provenance() const {
        return "config_hash=" + config_hash + " master_seed=" + std::to_string(seed);
    }
};

void write_manifest(const GlobalOpts& g, const std::string& command,
                    const std::vector<std::string>& outputs, double wall_s) {
    json m;
    m["command"] = command;
    m["invocation"] = g.invocation;
    m["config_hash"] = g.config_hash;
    m["master_seed"] = g.seed;
    m["workers"] = g.workers;
    m["outputs"] = outputs;
    m["wall_time_s"] = wall_s;
    m["version"] = "stablelab 1.0";
    std::ofstream out(g.path(command + ".manifest.json"));
    out << m.dump(2) << "\n";
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

int run_sample(GlobalOpts& g, const std::string& model_spec, long long count, long long sum_n,
               const std::string& out_name) {
    Timer timer;
    const TailModel model = g.model(model_spec);
    const SampleBatch batch =
        sum_n > 0 ? sample_normalized_sums(model, sum_n, count, RngStream(g.seed, 1), g.workers)
                  : sample_model(model, count, RngStream(g.seed, 1));
    const std::string out = g.path(out_name);
    batch.to_csv(out, g.config_hash);
    write_manifest(g, "sample", {out}, timer.seconds());
    std::printf("wrote %s (%lld rows)\n", out.c_str(), count);
    return 0;
}

int run_tv(GlobalOpts& g, const std::string& model_spec, long long n, int grid_exp,
           const std::string& out_name) {
    Timer timer;
    const TailModel model = g.model(model_spec);
    TvOptions opts;
    opts.n_nodes = 1 << grid_exp;
    opts.workers = static_cast<int>(g.workers);
    const TvKolPair pair = tv_and_kolmogorov_1d(model, n, opts);
    const std::string out = g.path(out_name);
    CsvWriter w(out);
    w.comment(g.provenance() + " model=" + model.id());
    w.row({"n", "tv", "tv_error", "kolmogorov", "method"});
    w.row({std::to_string(n), CsvWriter::num(pair.tv.value), CsvWriter::num(pair.tv.error),
           CsvWriter::num(pair.kolmogorov.value), pair.tv.method});
    write_manifest(g, "tv", {out}, timer.seconds());
    std::printf("tv(%lld) = %.8g +- %.2g\n", n, pair.tv.value, pair.tv.error);
    return 0;
}

int run_delta(GlobalOpts& g, double alpha, int d, double n_max, const std::string& out_name) {
    Timer timer;
    const std::string out = g.path(out_name);
    CsvWriter w(out);
    w.comment(g.provenance() + " alpha=" + std::to_string(alpha) + " d=" + std::to_string(d));
    w.row({"n", "delta_n", "limit", "rel_gap"});
    const double limit = delta_limit(alpha, d);
    double final_gap = 1e300;
    for (long long n = 16; n <= static_cast<long long>(n_max); n *= 4) {
        const double dn = delta_n(n, alpha, d);
        final_gap = std::fabs(dn - limit) / std::fabs(limit);
        w.row({std::to_string(n), CsvWriter::num(dn), CsvWriter::num(limit),
               CsvWriter::num(final_gap)});
    }
    write_manifest(g, "delta", {out}, timer.seconds());
    std::printf("final rel_gap = %.6g (limit %.9g)\n", final_gap, limit);
    return final_gap < 0.01 ? 0 : 1;
}

int run_rate(GlobalOpts& g, const std::string& scenario_id, const std::string& method) {
    Timer timer;
    RateScenario sc = builtin_scenario(scenario_id);
    if (!method.empty()) sc.method = method;
    sc.seed = g.seed;
    TvOptions opts;
    opts.workers = static_cast<int>(g.workers);
    const std::vector<SweepRow> rows = run_sweep(sc, opts);
    const std::string csv = g.path("rate_" + scenario_id + ".csv");
    sweep_to_csv(rows, csv, g.provenance() + " scenario=" + scenario_id);

    std::vector<std::pair<double, double>> table;
    for (const auto& r : rows)
        if (!r.failed) table.emplace_back(static_cast<double>(r.n), r.estimate.value);
    const RateFit fit = fit_loglog(table, false, g.seed);
    json rep;
    rep["scenario"] = scenario_id;
    rep["config_hash"] = g.config_hash;
    rep["master_seed"] = g.seed;
    rep["slope"] = fit.slope;
    rep["slope_ci"] = {fit.ci_lo, fit.ci_hi};
    rep["r2"] = fit.r2;
    rep["theoretical_exponent"] = pareto_rate_exponent(sc.model.alpha());
    bool pass = std::fabs(fit.slope - pareto_rate_exponent(sc.model.alpha())) <= 0.1;
    if (sc.model.alpha() == 1.0 && sc.method == "cf-inversion") {
        const HeadlineReport head = headline_from_table(table, g.seed);
        rep["headline"] = json::parse(head.to_json());
        pass = pass && head.verdict_n_inverse;
    }
    rep["pass"] = pass;
    const std::string jpath = g.path("rate_" + scenario_id + ".json");
    std::ofstream(jpath) << rep.dump(2) << "\n";
    write_manifest(g, "rate", {csv, jpath}, timer.seconds());
    std::printf("scenario %s slope %.4f (target %.4f) -> %s\n", scenario_id.c_str(), fit.slope,
                pareto_rate_exponent(sc.model.alpha()), pass ? "pass" : "FAIL");
    return pass ? 0 : 1;
}

int run_decompose(GlobalOpts& g, const std::string& model_spec, const std::string& kind,
                  double alpha_tilde, long long samples, const std::string& out_name) {
    Timer timer;
    const TailModel model = g.model(model_spec);
    TestReport rep;
    json extra;
    if (kind == "light") {
        const LightDecomposition d = light_decompose(model);
        rep = certify_mixture(d, samples, 64, RngStream(g.seed, 2), -1.0, g.workers);
        extra["p"] = d.p();
        extra["bump_c"] = d.bump_c();
    } else if (kind == "heavy") {
        const HeavyDecomposition d = heavy_decompose(model, alpha_tilde);
        rep = certify_mixture(d, samples, 64, RngStream(g.seed, 2), -1.0, g.workers);
        extra["q"] = d.q();
        extra["A_tilde"] = d.a_tilde();
        extra["eps_tilde_bound"] = d.eps_tilde_bound();
    } else {
        throw usage_error("--kind must be light or heavy");
    }
    json out = json::parse(rep.to_json());
    out["params"] = extra;
    out["config_hash"] = g.config_hash;
    const std::string path = g.path(out_name);
    std::ofstream(path) << out.dump(2) << "\n";
    write_manifest(g, "decompose", {path}, timer.seconds());
    std::printf("certification %s: p-value %.4g -> %s\n", kind.c_str(), rep.p_value,
                rep.pass ? "pass" : "FAIL");
    return rep.pass ? 0 : 1;
}

int run_probe(GlobalOpts& g, const std::string& kind, double alpha, long long mc,
              const std::string& out_name) {
    Timer timer;
    const TailModel model = pareto_model(1, alpha);
    const StableLaw law(alpha, SpectralMeasure::uniform(1));
    const TestFunction f = TestFunction::cos_wave({1.0});
    const std::string out = g.path(out_name);
    CsvWriter w(out);
    w.comment(g.provenance() + " probe=" + kind + " alpha=" + std::to_string(alpha));
    if (kind == "gap") {
        w.row({"n", "gap", "se", "bound"});
        for (long long n : {8LL, 16LL, 32LL, 64LL, 128LL, 256LL, 512LL, 1024LL}) {
            OperatorConfig cfg(n, law, model, mc, g.seed);
            cfg.workers = g.workers;
            const GapEstimate gap = one_step_gap(cfg, f, {0.0});
            w.row({std::to_string(n), CsvWriter::num(gap.value), CsvWriter::num(gap.std_err),
                   CsvWriter::num(d_bound(n, alpha, model.gamma(), f.norm_bound, true))});
        }
    } else if (kind == "gradient") {
        OperatorConfig cfg(1024, law, model, mc, g.seed);
        cfg.workers = g.workers;
        const SlopeProbe p = gradient_decay_probe(cfg, f, 1, {16, 64, 256, 1024});
        w.row({"m_over_n", "estimate", "se", "bound"});
        for (const auto& r : p.rows)
            w.row({CsvWriter::num(r.abscissa), CsvWriter::num(r.estimate),
                   CsvWriter::num(r.se), CsvWriter::num(r.bound)});
        w.comment("slope " + CsvWriter::num(p.slope));
    } else if (kind == "generator") {
        OperatorConfig cfg(16, law, model, mc, g.seed);
        cfg.workers = g.workers;
        QuadConfig q;
        q.r_max = 200.0;
        q.inner_nodes = 32;
        const SlopeProbe p =
            generator_error_slope(cfg, f, {0.0}, {16, 32, 64, 128, 256}, q);
        w.row({"n", "estimate", "se", "bound"});
        for (const auto& r : p.rows)
            w.row({CsvWriter::num(r.abscissa), CsvWriter::num(r.estimate),
                   CsvWriter::num(r.se), CsvWriter::num(r.bound)});
        w.comment("slope " + CsvWriter::num(p.slope));
    } else {
        throw usage_error("--kind must be gap, gradient or generator");
    }
    write_manifest(g, "probe", {out}, timer.seconds());
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

int run_report(GlobalOpts& g, const std::string& dir) {
    Timer timer;
    json agg;
    agg["config_hash"] = g.config_hash;
    agg["entries"] = json::array();
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        if (entry.path().filename().string().rfind("report", 0) == 0) continue;
        std::ifstream in(entry.path());
        try {
            json j;
            in >> j;
            agg["entries"].push_back({{"file", entry.path().filename().string()},
                                      {"content", j}});
        } catch (...) {
            continue;  // skip non-json artifacts
        }
    }
    const std::string out = (fs::path(dir) / "report.json").string();
    std::ofstream(out) << agg.dump(2) << "\n";
    write_manifest(g, "report", {out}, timer.seconds());
    std::printf("aggregated %zu artifacts into %s\n", agg["entries"].size(), out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stablelab: heavy-tailed sums, stable laws, and exact TV distances"};
    app.require_subcommand(1);

    GlobalOpts g;
    std::string seed_str;
    app.add_option("--seed", seed_str, "master seed (mandatory unless --config sets it)");
    app.add_option("--workers", g.workers, "worker threads (0 = hardware)");
    app.add_option("--out-dir", g.out_dir, "output directory");
    app.add_option("--config", g.config_path, "experiment config JSON");

    // sample
    auto* sample = app.add_subcommand("sample", "draw a sample batch to CSV");
    std::string model_spec = "pareto:d=1,alpha=1.5";
    long long count = 1000, sum_n = 0;
    std::string out_name = "batch.csv";
    sample->add_option("--model", model_spec, "model spec or config name")->required();
    sample->add_option("--n", count, "number of draws")->required();
    sample->add_option("--sum-n", sum_n, "draw normalized sums S_n instead of single draws");
    sample->add_option("--out", out_name, "output CSV name");

    // tv
    auto* tv = app.add_subcommand("tv", "exact 1-D TV distance via CF inversion");
    std::string tv_model = "pareto:d=1,alpha=1.0";
    long long tv_n = 1024;
    int grid_exp = 18;
    std::string tv_out = "tv.csv";
    tv->add_option("--model", tv_model)->required();
    tv->add_option("--n", tv_n)->required();
    tv->add_option("--grid-exp", grid_exp, "log2 of the inversion grid size");
    tv->add_option("--out", tv_out);

    // delta
    auto* delta = app.add_subcommand("delta", "normalized log-CF gap table");
    double d_alpha_opt = 1.0, d_nmax = 1e6;
    int d_dim = 1;
    std::string d_out = "delta.csv";
    delta->add_option("--alpha", d_alpha_opt)->required();
    delta->add_option("--d", d_dim);
    delta->add_option("--n-max", d_nmax);
    delta->add_option("--out", d_out);

    // rate
    auto* rate = app.add_subcommand("rate", "distance sweep + slope fit + verdicts");
    std::string scenario = "pareto-a1", method;
    rate->add_option("--scenario", scenario)->required();
    rate->add_option("--method", method, "override: cf-inversion | histogram-lb | kolmogorov");

    // decompose
    auto* dec = app.add_subcommand("decompose", "certify a measure decomposition");
    std::string dec_model = "pareto:d=1,alpha=1.0", dec_kind = "light";
    double at = 1.5;
    long long dec_samples = 1000000;
    std::string dec_out = "decompose.json";
    dec->add_option("--model", dec_model)->required();
    dec->add_option("--kind", dec_kind)->required();
    dec->add_option("--alpha-tilde", at);
    dec->add_option("--samples", dec_samples);
    dec->add_option("--out", dec_out);

    // probe
    auto* probe = app.add_subcommand("probe", "operator/generator Monte Carlo probes");
    std::string probe_kind = "gap";
    double probe_alpha = 1.5;
    long long probe_mc = 200000;
    std::string probe_out = "probe.csv";
    probe->add_option("--kind", probe_kind)->required();
    probe->add_option("--alpha", probe_alpha);
    probe->add_option("--mc", probe_mc);
    probe->add_option("--out", probe_out);

    // report
    auto* report = app.add_subcommand("report", "aggregate artifacts in a directory");
    std::string report_dir = ".";
    report->add_option("--dir", report_dir);

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        std::ostringstream argline;
        for (int i = 1; i < argc; ++i) argline << (i > 1 ? " " : "") << argv[i];
        if (!seed_str.empty()) {
            g.seed = std::stoull(seed_str);
            g.seed_set = true;
        }
        g.finalize(argline.str());

        if (*sample) return run_sample(g, model_spec, count, sum_n, out_name);
        if (*tv) return run_tv(g, tv_model, tv_n, grid_exp, tv_out);
        if (*delta) return run_delta(g, d_alpha_opt, d_dim, d_nmax, d_out);
        if (*rate) return run_rate(g, scenario, method);
        if (*dec) return run_decompose(g, dec_model, dec_kind, at, dec_samples, dec_out);
        if (*probe) return run_probe(g, probe_kind, probe_alpha, probe_mc, probe_out);
        if (*report) return run_report(g, report_dir);
        throw usage_error("no subcommand selected");
    } catch (const usage_error& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const domain_error& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const numeric_error& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 3;
    } catch (const check_error& e) {
        std::fprintf(stderr, "check failed: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
