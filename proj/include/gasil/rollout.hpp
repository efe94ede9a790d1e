#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "gasil/env.hpp"
#include "gasil/episode.hpp"
#include "gasil/gaussian.hpp"
#include "gasil/rng.hpp"

namespace gasil {

// Fixed-horizon batch of transitions. All per-step arrays share one length.
struct RolloutBatch {
    std::vector<std::vector<double>> observations;
    std::vector<std::vector<double>> actions;
    std::vector<double> env_rewards;
    std::vector<double> shaped_rewards;
    std::vector<std::uint8_t> dones;
    std::vector<double> log_probs;   // behavior policy at collection time
    std::vector<double> values;
    double bootstrap_value = 0.0;    // V of the observation after the last step; 0 if done
    std::vector<double> advantages;
    std::vector<double> return_targets;

    std::size_t size() const { return observations.size(); }
};

enum class RewardMode { EnvOnly, GasilOnly, Combined };

// Steps the environment with the current policy. Episodes that cross the
// batch edge continue into the next collect() call; completed ones are
// returned for buffer insertion.
class Collector {
public:
    Collector(Env& env, double gamma) : env_(env), gamma_(gamma) {}

    std::pair<RolloutBatch, std::vector<Episode>> collect(const GaussianPolicy& policy,
                                                          int horizon, Rng& rng);

    // Observation the next collect() will act from (the bootstrap state).
    const std::vector<double>& frontier_observation() const { return current_obs_; }

private:
    Env& env_;
    double gamma_;
    std::vector<double> current_obs_;
    std::vector<Transition> pending_;  // in-progress episode
    bool started_ = false;
};

// Fills batch.values and batch.bootstrap_value from the value network.
void fill_values(RolloutBatch& batch, const MlpNetwork& value_net,
                 std::span<const double> frontier_obs);

// delta_t = r_t + gamma * V(s_{t+1}) * (1 - done_t) - V(s_t)
// A_t = sum_k (gamma * lambda)^k delta_{t+k}, cut at episode/batch ends.
std::pair<std::vector<double>, std::vector<double>> compute_gae(
    std::span<const double> rewards, std::span<const double> values,
    std::span<const std::uint8_t> dones, double bootstrap, double gamma, double lambda_gae);

// Applies GAE to batch.shaped_rewards, writing advantages and return targets.
void compute_gae(RolloutBatch& batch, double gamma, double lambda_gae);

// Discriminator output D(s, a) in (0, 1); clamped to [1e-8, 1-1e-8] before log.
using DiscriminatorFn =
    std::function<double(std::span<const double>, std::span<const double>)>;

// env_only: r; gasil_only: -log D; combined: r - alpha * log D.
void shape_rewards(RolloutBatch& batch, const DiscriminatorFn& discriminator, double alpha,
                   RewardMode mode);

// In-place per-batch standardization of the advantages (mean 0, std 1).
void normalize_advantages(RolloutBatch& batch);

}  // namespace gasil
