#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stablelab/rate_lab.hpp"
#include "stablelab/spectral.hpp"
#include "stablelab/tail_models.hpp"

namespace stablelab {

/// "pareto:d=1,alpha=1.5" or
/// "dna1d:alpha=0.8,A=1,wp=0.5,wm=0.5,eps=power,K=0.5,gamma=1"
TailModel parse_model_spec(const std::string& spec);

/// "cos:lambda=1" | "sin:lambda=2" | "gauss:width=1" | "linear:a=1"
TestFunction parse_function_spec(const std::string& spec, int dim);

/// built-in sweep scenarios: pareto-a15, pareto-a1, pareto-a08
RateScenario builtin_scenario(const std::string& id);
std::vector<std::string> builtin_scenario_ids();

/// FNV-1a 64-bit hash (hex) of arbitrary bytes, used as the config hash.
std::string fnv1a_hex(const std::string& bytes);

struct ExperimentConfig {
    std::uint64_t seed = 0;
    unsigned workers = 0;
    std::string out_dir = ".";
    std::map<std::string, std::string> models;  // name -> spec string
    std::string config_hash;                    // of the raw file bytes

    static ExperimentConfig from_file(const std::string& path);
    TailModel resolve_model(const std::string& name_or_spec) const;
};

}  // namespace stablelab
