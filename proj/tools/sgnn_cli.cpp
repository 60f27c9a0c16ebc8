// sgnn: run / optimize / inspect front end.

#include "sgnn/pipeline.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

namespace {

using namespace sgnn;

enum Exit : int { ok = 0, internal = 1, usage = 2, io = 3, data = 4, value = 5 };

struct CommonFlags {
    std::string config_path;
    std::map<std::string, std::string> overrides;  // key order = canonical
};

void add_config_flags(CLI::App* cmd, CommonFlags& flags, bool with_bo)
{
    cmd->add_option("--config", flags.config_path, "key = value file; flags override it");
    for (const auto& key : config::known_keys()) {
        const bool bo_key = key.rfind("grid.", 0) == 0 || key == "bo_seed" || key == "n_init" || key == "n_iter";
        if (bo_key && !with_bo) continue;
        cmd->add_option_function<std::string>(
            "--" + key, [&flags, key](const std::string& v) { flags.overrides[key] = v; }, "config key " + key);
    }
}

config::Config resolve(const CommonFlags& flags)
{
    config::Config cfg = flags.config_path.empty() ? config::Config{} : config::load_config(flags.config_path);
    for (const auto& [k, v] : flags.overrides) config::apply(cfg, k, v);
    return cfg;
}

void require_dataset(const config::RunConfig& run)
{
    if (run.content.empty()) throw config::ConfigError("no content file given (content = ...)");
    if (run.cites.empty()) throw config::ConfigError("no cites file given (cites = ...)");
}

// Writes through a temporary file so a failure never leaves a partial report.
void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    const std::filesystem::path target(path);
    auto tmp = target;
    tmp += ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw graph::IoError("cannot write '" + path + "'");
        out << text;
        if (!out.flush()) throw graph::IoError("cannot write '" + path + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) throw graph::IoError("cannot write '" + path + "': " + ec.message());
}

int cmd_run(const CommonFlags& flags)
{
    const auto cfg = resolve(flags);
    require_dataset(cfg.run);
    cfg.run.validate();
    const auto data = pipeline::prepare(cfg.run);
    const auto report = pipeline::evaluate(data, cfg.run.params, cfg.run.set, cfg.run.workers);
    emit(cfg.run.output, pipeline::format_run_report(cfg.run, data, report));
    if (!cfg.run.output.empty()) {
        std::cerr << fmt::format("{} accuracy: {}/{}\n", report.set_name, report.correct, report.evaluated);
    }
    return ok;
}

int cmd_optimize(const CommonFlags& flags)
{
    const auto cfg = resolve(flags);
    require_dataset(cfg.run);
    cfg.run.validate();
    cfg.bo.validate();
    const auto data = pipeline::prepare(cfg.run);
    const auto space = pipeline::search_space(cfg.bo);
    const auto result = pipeline::search(cfg, data);
    emit(cfg.run.output, pipeline::format_search_report(cfg, space, result));

    auto& log = cfg.run.output.empty() ? std::cerr : std::cout;
    if (result.exhausted) log << "search space exhausted after " << result.history.size() << " evaluations\n";
    if (result.best) {
        const auto& b = result.history[*result.best];
        log << fmt::format("best: paper_to_paper_w={} train_to_topic_w={} tau={} sim_steps={} accuracy={:.6f}\n",
                           b.values[0], b.values[1], b.values[2], b.values[3], b.objective);
    } else {
        log << "best: none (every evaluation failed)\n";
    }
    return ok;
}

struct InspectFlags {
    std::vector<std::string> targets;
    std::string inject;
    std::string weights;
    std::int32_t steps = 30;
};

int cmd_inspect(const CommonFlags& flags, const InspectFlags& in)
{
    auto cfg = resolve(flags);
    if (in.targets.empty()) throw config::ValueError("no --target given");

    if (in.targets.size() == 1 && (in.targets[0] == "fig2-demo" || in.targets[0] == "fig2-plain")) {
        const auto rows = pipeline::two_neuron_demo(in.steps, in.targets[0] == "fig2-demo");
        emit(cfg.run.output, pipeline::format_trace_csv(rows));
        return ok;
    }

    std::vector<pipeline::NeuronSelector> neurons;
    for (const auto& t : in.targets) neurons.push_back(pipeline::parse_selector(t));
    std::optional<pipeline::NeuronSelector> inject;
    if (!in.inject.empty()) inject = pipeline::parse_selector(in.inject);

    require_dataset(cfg.run);
    cfg.run.validate();
    const auto data = pipeline::prepare(cfg.run);
    auto net = runtime::build(graph::compile(data.graph, data.split, cfg.run.params));
    const auto rows = pipeline::trace(net, neurons, inject, in.steps);
    if (!in.weights.empty()) emit(in.weights, pipeline::format_weights_csv(net));
    emit(cfg.run.output, pipeline::format_trace_csv(rows));
    return ok;
}

int fail(const char* category, const std::string& what, int code)
{
    std::string line = what;
    for (auto& c : line) {
        if (c == '\n') c = ' ';
    }
    std::cerr << "sgnn: " << category << ": " << line << '\n';
    return code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Graph node classification with a spiking network and STDP"};
    app.require_subcommand(1);

    CommonFlags run_flags, opt_flags, inspect_flags;
    InspectFlags inspect;

    auto* run = app.add_subcommand("run", "evaluate one configuration and write a report");
    add_config_flags(run, run_flags, false);

    auto* opt = app.add_subcommand("optimize", "Bayesian search over the parameter grid");
    add_config_flags(opt, opt_flags, true);

    auto* ins = app.add_subcommand("inspect", "dump per-step neuron traces as CSV");
    add_config_flags(ins, inspect_flags, false);
    ins->add_option("--target", inspect.targets, "fig2-demo | fig2-plain | cluster:index ...")->required();
    ins->add_option("--steps", inspect.steps, "timesteps to record")->check(CLI::NonNegativeNumber);
    ins->add_option("--inject", inspect.inject, "paper neuron (cluster:index) spiked each cycle");
    ins->add_option("--weights", inspect.weights, "also write learnable weights to this CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage error", e.what(), usage);
    } catch (const config::ValueError& e) {
        return fail("invalid parameter", e.what(), value);
    } catch (const config::ConfigError& e) {
        return fail("config error", e.what(), usage);
    }

    try {
        if (run->parsed()) return cmd_run(run_flags);
        if (opt->parsed()) return cmd_optimize(opt_flags);
        return cmd_inspect(inspect_flags, inspect);
    } catch (const config::ConfigError& e) {
        return fail("config error", e.what(), usage);
    } catch (const config::ValueError& e) {
        return fail("invalid parameter", e.what(), value);
    } catch (const graph::IoError& e) {
        return fail("io error", e.what(), io);
    } catch (const graph::ParseError& e) {
        return fail("dataset error", e.what(), data);
    } catch (const std::invalid_argument& e) {
        return fail("invalid parameter", e.what(), value);
    } catch (const std::exception& e) {
        return fail("internal error", e.what(), internal);
    }
}
