#pragma once

// Flat `key = value` configuration shared by the command line and reports.
//
//   # comment
//   [config]            optional; parsing stops at the next [section]
//   content = data/cora/cora.content
//   sim_steps = 14
//   grid.tau = 20,25,30
//
// Unknown keys are errors.

#include "sgnn/graph.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sgnn::config {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid value for a known key (out of range, wrong set name, ...).
class ValueError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class EvalSet { validation, test };

std::string_view to_string(EvalSet set);

struct RunConfig {
    std::string content;
    std::string cites;
    graph::NetworkParams params = default_params();
    std::uint32_t train_per_topic = 20;
    std::uint32_t validation_size = 140;
    EvalSet set = EvalSet::validation;
    std::string output;
    int workers = 1;

    static graph::NetworkParams default_params();
    graph::SplitOptions split_options() const { return {train_per_topic, validation_size}; }

    /// Throws ValueError.
    void validate() const;
};

struct BoConfig {
    std::uint64_t bo_seed = 0;
    std::uint32_t n_init = 5;
    std::uint32_t n_iter = 10;
    std::vector<std::int64_t> grid_paper_to_paper_w{1, 50, 100, 300, 500, 700, 1000};
    std::vector<std::int64_t> grid_train_to_topic_w{1, 50, 100, 300, 500, 700, 1000};
    std::vector<std::int64_t> grid_tau{20, 25, 30, 35, 40};
    std::vector<std::int64_t> grid_sim_steps{11, 12, 13, 14, 15, 16, 17, 18, 19, 20};

    void validate() const;
};

struct Config {
    RunConfig run;
    BoConfig bo;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Throws ConfigError with "source:line: ..." on malformed lines.
KeyValues parse_key_values(std::string_view text, const std::string& source = "config");

/// Throws ConfigError for an unknown key, ValueError for a bad value.
void apply(Config& cfg, const std::string& key, const std::string& value);

bool is_known_key(std::string_view key);
const std::vector<std::string>& known_keys();

Config parse_config(std::string_view text, const std::string& source = "config");
Config load_config(const std::string& path);

/// Effective run settings as config lines. `output` and `workers` are left
/// out: they do not change results.
std::string format_run(const RunConfig& run);
std::string format_bo(const BoConfig& bo);

} // namespace sgnn::config
