#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gasil/env.hpp"
#include "gasil/point_mass.hpp"

namespace gasil {

enum class AgentKind { Ppo, PpoGasil };

std::string to_string(AgentKind kind);
AgentKind agent_kind_from_string(const std::string& name);

// Everything a run needs: agent choice, environment settings, optimization
// hyperparameters and the experiment protocol.
struct ExperimentConfig {
    AgentKind agent = AgentKind::PpoGasil;

    // environment
    std::string env = "point_mass";
    int delay = 1;             // reward delay; 1 = no delay
    double obs_noise = 0.0;    // Gaussian observation noise sigma
    PointMassConfig point_mass;

    // optimization
    std::int64_t total_steps = 196608;  // 96 iterations at the default horizon
    int horizon = 2048;
    int epochs = 10;
    int minibatch_size = 64;
    double gamma = 0.99;
    double gae_lambda = 0.95;
    double entropy_coef = 0.0;
    double learning_rate = 3e-4;       // policy and value
    double clip_ratio = 0.2;
    double value_coef = 0.5;
    double max_grad_norm = 0.5;

    // GASIL
    double disc_learning_rate = 1e-4;
    int disc_minibatch = 128;          // split evenly between policy and buffer pairs
    int n_disc_updates = 10;
    std::int64_t buffer_capacity_steps = 4000;
    double alpha = 0.05;
    // optional linear ramp of alpha from 0 between these step counts; off when end <= start
    std::int64_t alpha_ramp_start = 0;
    std::int64_t alpha_ramp_end = 0;

    // protocol
    std::uint64_t seed = 0;
    int eval_interval = 10;   // iterations between evaluations
    int eval_episodes = 10;
    int incident_threshold = 100;
    std::string output_dir = "runs/run";

    // alpha after the ramp schedule, given elapsed environment steps
    double effective_alpha(std::int64_t env_steps) const;
};

// Field-by-field validation; throws ConfigError naming the offending field.
void validate(const ExperimentConfig& config);

// TOML-style key-value file. Unknown keys are errors; `object = x y value radius`
// lines accumulate into the point-mass layout.
void apply_config_file(ExperimentConfig& config, const std::string& path);
void apply_config_line(ExperimentConfig& config, const std::string& key, const std::string& value);

// Canonical serialization: stable ordering, stable float formatting. Feeds
// both config_resolved.toml and the config hash.
std::string serialize(const ExperimentConfig& config);
std::uint64_t config_hash(const ExperimentConfig& config);

// Environment instantiation with per-purpose seeding (training vs eval use
// disjoint streams derived from the run seed).
std::unique_ptr<Env> make_env(const ExperimentConfig& config, std::uint64_t seed_offset);

}  // namespace gasil
