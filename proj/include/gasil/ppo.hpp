#pragma once

#include <vector>

#include "gasil/adam.hpp"
#include "gasil/env.hpp"
#include "gasil/gaussian.hpp"
#include "gasil/rollout.hpp"
#include "gasil/rng.hpp"

namespace gasil {

struct PpoConfig {
    double clip_ratio = 0.2;
    int epochs = 10;
    int minibatch_size = 64;
    double value_coef = 0.5;
    double entropy_coef = 0.0;
    double max_grad_norm = 0.5;
};

struct PpoStats {
    double surrogate_loss = 0.0;  // negative mean clipped surrogate
    double value_loss = 0.0;
    double entropy = 0.0;
    double clip_fraction = 0.0;
    double approx_kl = 0.0;
    int skipped_minibatches = 0;  // non-finite loss incidents
};

// Clipped-surrogate PPO update over the batch's (shaped-reward) advantages.
// Shuffles and re-splits the batch each epoch using `rng`.
PpoStats ppo_update(GaussianPolicy& policy, MlpNetwork& value_net, const RolloutBatch& batch,
                    const PpoConfig& config, AdamState& policy_opt, AdamState& value_opt,
                    Rng& rng);

struct EvalResult {
    double mean_return = 0.0;  // undiscounted, raw env rewards
    std::vector<double> episode_returns;
};

// Runs full episodes and reports raw environment returns; never mutates the
// policy. Actions are the distribution mean when deterministic, sampled
// otherwise.
EvalResult evaluate_policy(Env& env, const GaussianPolicy& policy, int episodes, Rng& rng,
                           bool deterministic);

// Global L2 clip; returns the pre-clip norm.
double clip_gradient_norm(std::span<double> grad, double max_norm);

}  // namespace gasil
