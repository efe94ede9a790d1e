// Experiment driver: seeded training runs, hyperparameter sweeps and
// figure-style SVG outputs for the point-mass GASIL lab.

#include <cstdio>
#include <filesystem>
#include <map>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gasil/errors.hpp"
#include "gasil/experiment.hpp"
#include "gasil/plot.hpp"

namespace fs = std::filesystem;
using namespace gasil;

namespace {

// Every ExperimentConfig field is exposed as a --key flag taking the same
// value syntax as the config file. The config file, when given, overrides
// flag values.
struct ConfigCli {
    static constexpr const char* kKeys[] = {
        "agent", "env", "delay", "obs_noise", "total_steps", "horizon", "epochs",
        "minibatch_size", "gamma", "gae_lambda", "entropy_coef", "learning_rate",
        "clip_ratio", "value_coef", "max_grad_norm", "disc_learning_rate", "disc_minibatch",
        "n_disc_updates", "buffer_capacity_steps", "alpha", "alpha_ramp_start",
        "alpha_ramp_end", "seed", "eval_interval", "eval_episodes", "incident_threshold",
        "output_dir", "max_steps", "max_speed", "actuation_cost", "random_start", "start_x",
        "start_y", "object"};

    std::map<std::string, std::vector<std::string>> flag_values;
    std::string config_file;

    void attach(CLI::App* app) {
        for (const char* key : kKeys) {
            app->add_option(std::string("--") + key, flag_values[key],
                            std::string("config field ") + key);
        }
        app->add_option("--config", config_file, "config file (overrides flags)");
    }

    ExperimentConfig resolve() const {
        ExperimentConfig config;
        for (const char* key : kKeys) {
            const auto it = flag_values.find(key);
            if (it == flag_values.end()) continue;
            for (const auto& value : it->second) apply_config_line(config, key, value);
        }
        if (!config_file.empty()) apply_config_file(config, config_file);
        validate(config);
        return config;
    }
};

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> values;
    std::stringstream in(csv);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) values.push_back(std::stod(item));
    }
    return values;
}

std::vector<std::uint64_t> parse_seeds(const std::string& csv) {
    std::vector<std::uint64_t> values;
    std::stringstream in(csv);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) values.push_back(std::stoull(item));
    }
    return values;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GASIL point-mass experiment lab"};
    app.require_subcommand(1);

    auto* train = app.add_subcommand("train", "run one seeded training experiment");
    ConfigCli train_cfg;
    train_cfg.attach(train);

    auto* sweep = app.add_subcommand("sweep", "grid sweep over one hyperparameter axis");
    ConfigCli sweep_cfg;
    sweep_cfg.attach(sweep);
    std::string axis_name = "alpha";
    std::string sweep_values = "0.1";
    std::string sweep_seeds;
    sweep->add_option("--axis", axis_name,
                      "buffer_capacity | n_disc | alpha | obs_noise | delay");
    sweep->add_option("--values", sweep_values, "comma-separated axis values");
    sweep->add_option("--seeds", sweep_seeds, "comma-separated seeds (default: base seed)");

    auto* plot = app.add_subcommand("plot", "learning-curve SVG from finished run directories");
    std::vector<std::string> plot_dirs;
    std::string plot_out = "curves.svg";
    plot->add_option("runs", plot_dirs, "run directories")->required();
    plot->add_option("--out", plot_out, "output SVG path");

    auto* snapshot = app.add_subcommand("snapshot", "three-panel point-mass visualization");
    std::string snap_dir;
    std::string snap_out = "snapshot.svg";
    int snap_grid = 24;
    snapshot->add_option("run", snap_dir, "run directory")->required();
    snapshot->add_option("--grid", snap_grid, "arrow-field resolution");
    snapshot->add_option("--out", snap_out, "output SVG path");

    auto* eval = app.add_subcommand("eval", "evaluate a checkpointed policy");
    std::string eval_dir;
    int eval_episodes = 10;
    bool stochastic = false;
    std::uint64_t eval_seed = 12345;
    eval->add_option("run", eval_dir, "run directory")->required();
    eval->add_option("--episodes", eval_episodes, "number of evaluation episodes");
    eval->add_flag("--stochastic", stochastic, "sample actions instead of using the mean");
    eval->add_option("--seed", eval_seed, "evaluation seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) {
            const RunRecord record = run_experiment(train_cfg.resolve());
            std::cout << "run complete: " << record.directory
                      << " final_eval_return=" << record.final_eval_return() << "\n";
        } else if (*sweep) {
            const auto records = run_sweep(sweep_cfg.resolve(), sweep_axis_from_string(axis_name),
                                           parse_doubles(sweep_values), parse_seeds(sweep_seeds));
            std::cout << "sweep complete: " << records.size() << " runs\n";
        } else if (*plot) {
            std::vector<RunRecord> records;
            for (const auto& dir : plot_dirs) records.push_back(load_run_record(dir));
            render_curves(records, plot_out);
            std::cout << "wrote " << plot_out << "\n";
        } else if (*snapshot) {
            render_pointmass_snapshot(snap_dir, snap_grid, snap_out);
            std::cout << "wrote " << snap_out << "\n";
        } else if (*eval) {
            ExperimentConfig config;
            apply_config_file(config, (fs::path(eval_dir) / "config_resolved.toml").string());
            std::vector<double> log_std;
            MlpNetwork net = load_checkpoint((fs::path(eval_dir) / "policy.ckpt").string(), &log_std);
            GaussianPolicy policy(std::move(net), log_std);
            auto env = make_env(config, 1);
            Rng rng(eval_seed);
            const EvalResult result =
                evaluate_policy(*env, policy, eval_episodes, rng, !stochastic);
            for (double r : result.episode_returns) std::cout << r << "\n";
            std::cout << "mean_return " << result.mean_return << "\n";
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "runtime incident: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
