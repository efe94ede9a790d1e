#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "gasil/buffer.hpp"
#include "gasil/config.hpp"
#include "gasil/discriminator.hpp"
#include "gasil/ppo.hpp"
#include "gasil/rollout.hpp"

namespace gasil {

struct GasilSettings {
    RewardMode mode = RewardMode::Combined;
    double alpha = 0.1;
    int n_disc_updates = 5;
    int disc_minibatch = 128;  // half policy pairs, half buffer pairs
    double gamma = 0.99;
    double gae_lambda = 0.95;
    PpoConfig ppo;
};

struct GasilIterationStats {
    std::optional<double> disc_objective;  // mean pre-step objective; empty if no updates ran
    PpoStats ppo;
    bool shaping_active = false;  // false while the buffer is empty (warm-up)
};

// One full iteration: buffer update, discriminator steps, reward shaping,
// GAE, PPO. With mode EnvOnly and zero discriminator updates this is exactly
// a PPO iteration.
GasilIterationStats gasil_iteration(GaussianPolicy& policy, MlpNetwork& value_net,
                                    AdamState& policy_opt, AdamState& value_opt,
                                    Discriminator& disc, GoodTrajectoryBuffer& buffer,
                                    RolloutBatch& batch, std::vector<Episode> completed_episodes,
                                    std::span<const double> frontier_obs,
                                    const GasilSettings& settings, Rng& disc_rng,
                                    Rng& shuffle_rng);

// One CSV row of a training run. Optional fields print as empty cells.
struct IterationRow {
    int iteration = 0;
    std::int64_t env_steps = 0;
    std::optional<double> eval_mean_return;
    std::optional<double> buffer_min_return;
    std::optional<double> buffer_mean_return;
    std::int64_t buffer_episodes = 0;
    std::int64_t buffer_steps = 0;
    std::optional<double> disc_objective;
    PpoStats ppo;
    std::optional<double> train_mean_episode_return;  // raw env return of episodes finished this iteration
    int episodes_completed = 0;
    int incidents = 0;  // cumulative numeric incidents
};

// Owns every training component for one seeded run. Both agents share the
// same construction and random streams so the alpha=0, zero-discriminator
// GASIL configuration reproduces the PPO agent bit for bit.
class Trainer {
public:
    explicit Trainer(const ExperimentConfig& config);

    IterationRow run_iteration();  // advances one horizon of environment steps
    double evaluate();             // deterministic episodes on the eval env

    int iterations_total() const {
        return static_cast<int>(config_.total_steps / config_.horizon);
    }
    int iteration() const { return iteration_; }
    std::int64_t env_steps() const { return env_steps_; }
    int incidents() const { return incidents_; }

    const GaussianPolicy& policy() const { return policy_; }
    const MlpNetwork& value_net() const { return value_net_; }
    const Discriminator& discriminator() const { return disc_; }
    const GoodTrajectoryBuffer& buffer() const { return buffer_; }

    void save_artifacts(const std::string& dir) const;

private:
    ExperimentConfig config_;
    std::unique_ptr<Env> env_;
    std::unique_ptr<Env> eval_env_;
    GaussianPolicy policy_;
    MlpNetwork value_net_;
    Discriminator disc_;
    GoodTrajectoryBuffer buffer_;
    AdamState policy_opt_;
    AdamState value_opt_;
    Collector collector_;
    Rng action_rng_;
    Rng disc_rng_;
    Rng shuffle_rng_;
    Rng eval_rng_;
    int iteration_ = 0;
    std::int64_t env_steps_ = 0;
    int incidents_ = 0;
};

}  // namespace gasil
