#include "sgnn/config.hpp"

#include <algorithm>
#include <charconv>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <functional>
#include <limits>
#include <map>

namespace sgnn::config {

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_int(const std::string& key, std::string_view text)
{
    text = trim(text);
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw ValueError(fmt::format("{}: '{}' is not a valid integer", key, text));
    }
    return value;
}

std::vector<std::int64_t> parse_list(const std::string& key, std::string_view text)
{
    std::vector<std::int64_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = std::min(text.find(',', pos), text.size());
        out.push_back(parse_int<std::int64_t>(key, text.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

using Setter = std::function<void(Config&, const std::string&, const std::string&)>;

template <class T>
Setter int_field(T RunConfig::*field)
{
    return [field](Config& c, const std::string& k, const std::string& v) { c.run.*field = parse_int<T>(k, v); };
}

template <class T>
Setter param(T graph::NetworkParams::*field)
{
    return [field](Config& c, const std::string& k, const std::string& v) { c.run.params.*field = parse_int<T>(k, v); };
}

template <class T>
Setter bo_field(T BoConfig::*field)
{
    return [field](Config& c, const std::string& k, const std::string& v) { c.bo.*field = parse_int<T>(k, v); };
}

Setter grid(std::vector<std::int64_t> BoConfig::*field)
{
    return [field](Config& c, const std::string& k, const std::string& v) { c.bo.*field = parse_list(k, v); };
}

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table{
        {"content", [](Config& c, const std::string&, const std::string& v) { c.run.content = v; }},
        {"cites", [](Config& c, const std::string&, const std::string& v) { c.run.cites = v; }},
        {"paper_to_paper_w", param(&graph::NetworkParams::paper_to_paper_w)},
        {"train_to_topic_w", param(&graph::NetworkParams::train_to_topic_w)},
        {"tau", param(&graph::NetworkParams::tau)},
        {"sim_steps", param(&graph::NetworkParams::sim_steps)},
        {"delay", param(&graph::NetworkParams::delay)},
        {"reset_length", param(&graph::NetworkParams::reset_length)},
        {"lr", param(&graph::NetworkParams::lr)},
        {"a_plus", param(&graph::NetworkParams::a_plus)},
        {"a_minus", param(&graph::NetworkParams::a_minus)},
        {"trace_impulse", param(&graph::NetworkParams::trace_impulse)},
        {"initial_plastic_weight", param(&graph::NetworkParams::initial_plastic_weight)},
        {"split_seed", param(&graph::NetworkParams::split_seed)},
        {"train_per_topic", int_field(&RunConfig::train_per_topic)},
        {"validation_size", int_field(&RunConfig::validation_size)},
        {"set",
         [](Config& c, const std::string& k, const std::string& v) {
             if (v == "validation") c.run.set = EvalSet::validation;
             else if (v == "test") c.run.set = EvalSet::test;
             else throw ValueError(fmt::format("{}: expected 'validation' or 'test', got '{}'", k, v));
         }},
        {"output", [](Config& c, const std::string&, const std::string& v) { c.run.output = v; }},
        {"workers", int_field(&RunConfig::workers)},
        {"bo_seed", bo_field(&BoConfig::bo_seed)},
        {"n_init", bo_field(&BoConfig::n_init)},
        {"n_iter", bo_field(&BoConfig::n_iter)},
        {"grid.paper_to_paper_w", grid(&BoConfig::grid_paper_to_paper_w)},
        {"grid.train_to_topic_w", grid(&BoConfig::grid_train_to_topic_w)},
        {"grid.tau", grid(&BoConfig::grid_tau)},
        {"grid.sim_steps", grid(&BoConfig::grid_sim_steps)},
    };
    return table;
}

} // namespace

std::string_view to_string(EvalSet set)
{
    return set == EvalSet::validation ? "validation" : "test";
}

graph::NetworkParams RunConfig::default_params()
{
    graph::NetworkParams p;
    p.sim_steps = 14;
    return p;
}

void RunConfig::validate() const
{
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw ValueError(e.what());
    }
    if (train_per_topic == 0) throw ValueError("train_per_topic must be >= 1");
    if (workers < 1) throw ValueError("workers must be >= 1");
}

void BoConfig::validate() const
{
    const std::pair<const char*, const std::vector<std::int64_t>*> grids[] = {
        {"grid.paper_to_paper_w", &grid_paper_to_paper_w},
        {"grid.train_to_topic_w", &grid_train_to_topic_w},
        {"grid.tau", &grid_tau},
        {"grid.sim_steps", &grid_sim_steps},
    };
    for (const auto& [name, values] : grids) {
        if (values->empty()) throw ValueError(fmt::format("{} is empty", name));
        auto sorted = *values;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw ValueError(fmt::format("{} repeats a value", name));
        }
        for (auto v : *values) {
            if (v < std::numeric_limits<std::int32_t>::min() || v > std::numeric_limits<std::int32_t>::max()) {
                throw ValueError(fmt::format("{}: {} does not fit a 32-bit parameter", name, v));
            }
        }
    }
}

KeyValues parse_key_values(std::string_view text, const std::string& source)
{
    KeyValues out;
    std::size_t line_no = 0;
    bool seen_content = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = std::min(text.find('\n', pos), text.size());
        auto line = trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            if (line == "[config]" && !seen_content) {
                seen_content = true;
                continue;
            }
            break;
        }
        seen_content = true;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(fmt::format("{}:{}: expected 'key = value'", source, line_no));
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(fmt::format("{}:{}: empty key", source, line_no));
        out.emplace_back(std::string(key), std::string(value));
    }
    return out;
}

bool is_known_key(std::string_view key)
{
    return setters().find(key) != setters().end();
}

const std::vector<std::string>& known_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, _] : setters()) k.push_back(name);
        return k;
    }();
    return keys;
}

void apply(Config& cfg, const std::string& key, const std::string& value)
{
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(fmt::format("unknown config key '{}'", key));
    it->second(cfg, key, value);
}

Config parse_config(std::string_view text, const std::string& source)
{
    Config cfg;
    for (const auto& [k, v] : parse_key_values(text, source)) {
        try {
            apply(cfg, k, v);
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("{}: {}", source, e.what()));
        }
    }
    return cfg;
}

Config load_config(const std::string& path)
{
    return parse_config(graph::read_file(path), path);
}

std::string format_run(const RunConfig& run)
{
    const auto& p = run.params;
    std::string out;
    auto line = [&](std::string_view key, const auto& value) { out += fmt::format("{} = {}\n", key, value); };
    line("content", run.content);
    line("cites", run.cites);
    line("paper_to_paper_w", p.paper_to_paper_w);
    line("train_to_topic_w", p.train_to_topic_w);
    line("tau", p.tau);
    line("sim_steps", p.sim_steps);
    line("delay", p.delay);
    line("reset_length", p.reset_length);
    line("lr", p.lr);
    line("a_plus", p.a_plus);
    line("a_minus", p.a_minus);
    line("trace_impulse", p.trace_impulse);
    line("initial_plastic_weight", p.initial_plastic_weight);
    line("split_seed", p.split_seed);
    line("train_per_topic", run.train_per_topic);
    line("validation_size", run.validation_size);
    line("set", to_string(run.set));
    return out;
}

std::string format_bo(const BoConfig& bo)
{
    std::string out;
    out += fmt::format("bo_seed = {}\n", bo.bo_seed);
    out += fmt::format("n_init = {}\n", bo.n_init);
    out += fmt::format("n_iter = {}\n", bo.n_iter);
    out += fmt::format("grid.paper_to_paper_w = {}\n", fmt::join(bo.grid_paper_to_paper_w, ","));
    out += fmt::format("grid.train_to_topic_w = {}\n", fmt::join(bo.grid_train_to_topic_w, ","));
    out += fmt::format("grid.tau = {}\n", fmt::join(bo.grid_tau, ","));
    out += fmt::format("grid.sim_steps = {}\n", fmt::join(bo.grid_sim_steps, ","));
    return out;
}

} // namespace sgnn::config
