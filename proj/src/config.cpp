#include "stablelab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stablelab/errors.hpp"

namespace stablelab {

namespace {

std::map<std::string, std::string> parse_kv(const std::string& s) {
    std::map<std::string, std::string> kv;
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw usage_error("expected key=value, got: " + item);
        kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return kv;
}

double want_num(const std::map<std::string, std::string>& kv, const std::string& key,
                std::optional<double> fallback = std::nullopt) {
    const auto it = kv.find(key);
    if (it == kv.end()) {
        if (fallback) return *fallback;
        throw usage_error("missing parameter: " + key);
    }
    try {
        return std::stod(it->second);
    } catch (...) {
        throw usage_error("bad numeric value for " + key + ": " + it->second);
    }
}

std::string want_str(const std::map<std::string, std::string>& kv, const std::string& key,
                     const std::string& fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

}  // namespace

TailModel parse_model_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw usage_error("model spec needs kind:params");
    const std::string kind = spec.substr(0, colon);
    const auto kv = parse_kv(spec.substr(colon + 1));
    if (kind == "pareto") {
        const int d = static_cast<int>(want_num(kv, "d", 1.0));
        const double alpha = want_num(kv, "alpha");
        return TailModel::pareto(d, alpha).with_id(spec);
    }
    if (kind == "dna1d") {
        const double alpha = want_num(kv, "alpha");
        const double A = want_num(kv, "A", 1.0);
        const double wp = want_num(kv, "wp", 0.5);
        const double wm = want_num(kv, "wm", 1.0 - wp);
        const double K = want_num(kv, "K", 1.0);
        const double gamma = want_num(kv, "gamma", 1.0);
        const std::string eps = want_str(kv, "eps", "zero");
        const std::string eps_minus = want_str(kv, "eps_minus", eps);
        return TailModel::dna_1d(alpha, A, wp, wm, EpsFn::scaled(eps, K, gamma),
                                 EpsFn::scaled(eps_minus, K, gamma), gamma, K)
            .with_id(spec);
    }
    throw usage_error("unknown model kind: " + kind);
}

TestFunction parse_function_spec(const std::string& spec, int dim) {
    const auto colon = spec.find(':');
    const std::string kind = colon == std::string::npos ? spec : spec.substr(0, colon);
    const auto kv = colon == std::string::npos ? std::map<std::string, std::string>{}
                                               : parse_kv(spec.substr(colon + 1));
    if (kind == "cos" || kind == "sin") {
        const double l = want_num(kv, "lambda", 1.0);
        Vec lambda(dim, 0.0);
        lambda[0] = l;
        return kind == "cos" ? TestFunction::cos_wave(lambda) : TestFunction::sin_wave(lambda);
    }
    if (kind == "gauss") {
        const double w = want_num(kv, "width", 1.0);
        return TestFunction::gauss_bump(Vec(dim, 0.0), w);
    }
    if (kind == "linear") {
        const double a = want_num(kv, "a", 1.0);
        Vec av(dim, 0.0);
        av[0] = a;
        return TestFunction::linear(av);
    }
    throw usage_error("unknown test function: " + kind);
}

RateScenario builtin_scenario(const std::string& id) {
    RateScenario sc;
    sc.id = id;
    auto dyadic = [](int lo, int hi) {
        std::vector<long long> g;
        for (int e = lo; e <= hi; ++e) g.push_back(1LL << e);
        return g;
    };
    if (id == "pareto-a15") {
        sc.model = TailModel::pareto(1, 1.5);
        sc.n_grid = dyadic(4, 14);
        return sc;
    }
    if (id == "pareto-a1") {
        sc.model = TailModel::pareto(1, 1.0);
        sc.n_grid = dyadic(4, 14);
        return sc;
    }
    if (id == "pareto-a08") {
        sc.model = TailModel::pareto(1, 0.8);
        sc.n_grid = dyadic(4, 14);
        return sc;
    }
    if (id == "pareto-a15-mc") {
        sc.model = TailModel::pareto(1, 1.5);
        sc.n_grid = dyadic(4, 10);
        sc.method = "histogram-lb";
        return sc;
    }
    throw usage_error("unknown scenario: " + id +
                      " (known: pareto-a15, pareto-a1, pareto-a08, pareto-a15-mc)");
}

std::vector<std::string> builtin_scenario_ids() {
    return {"pareto-a15", "pareto-a1", "pareto-a08", "pareto-a15-mc"};
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw usage_error("cannot open config: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string raw = buf.str();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(raw);
    } catch (const std::exception& e) {
        throw usage_error("config parse error: " + std::string(e.what()));
    }
    ExperimentConfig cfg;
    cfg.config_hash = fnv1a_hex(raw);
    if (!j.contains("seed")) throw usage_error("config must set a seed");
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.workers = j.value("workers", 0u);
    cfg.out_dir = j.value("out_dir", std::string("."));
    if (j.contains("models"))
        for (const auto& [name, spec] : j.at("models").items())
            cfg.models[name] = spec.get<std::string>();
    // eagerly resolve every registry entry so broken names fail at load time
    for (const auto& [name, spec] : cfg.models) (void)parse_model_spec(spec);
    return cfg;
}

TailModel ExperimentConfig::resolve_model(const std::string& name_or_spec) const {
    const auto it = models.find(name_or_spec);
    if (it != models.end()) return parse_model_spec(it->second);
    return parse_model_spec(name_or_spec);
}

}  // namespace stablelab
