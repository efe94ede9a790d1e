#include "gasil/rollout.hpp"

#include <algorithm>
#include <cmath>

#include "gasil/errors.hpp"

namespace gasil {

std::pair<RolloutBatch, std::vector<Episode>> Collector::collect(const GaussianPolicy& policy,
                                                                 int horizon, Rng& rng) {
    if (horizon <= 0) throw ConfigError("collect: horizon must be positive");
    if (!started_) {
        current_obs_ = env_.reset();
        started_ = true;
    }

    RolloutBatch batch;
    batch.observations.reserve(horizon);
    batch.actions.reserve(horizon);
    batch.env_rewards.reserve(horizon);
    batch.dones.reserve(horizon);
    batch.log_probs.reserve(horizon);
    std::vector<Episode> completed;

    for (int t = 0; t < horizon; ++t) {
        const DiagonalGaussian dist = policy.dist(current_obs_);
        std::vector<double> action = dist.sample(rng);
        const double logp = dist.log_prob(action);
        EnvStep result = env_.step(action);

        pending_.push_back({current_obs_, action, result.reward});
        batch.observations.push_back(std::move(current_obs_));
        batch.actions.push_back(std::move(action));
        batch.env_rewards.push_back(result.reward);
        batch.dones.push_back(result.done ? 1 : 0);
        batch.log_probs.push_back(logp);

        if (result.done) {
            completed.emplace_back(std::move(pending_), true, gamma_);
            pending_.clear();
            current_obs_ = env_.reset();
        } else {
            current_obs_ = std::move(result.observation);
        }
    }
    batch.shaped_rewards = batch.env_rewards;
    return {std::move(batch), std::move(completed)};
}

void fill_values(RolloutBatch& batch, const MlpNetwork& value_net,
                 std::span<const double> frontier_obs) {
    batch.values.resize(batch.size());
    for (std::size_t t = 0; t < batch.size(); ++t)
        batch.values[t] = value_net.forward(batch.observations[t])[0];
    const bool last_done = !batch.dones.empty() && batch.dones.back();
    batch.bootstrap_value = last_done ? 0.0 : value_net.forward(frontier_obs)[0];
}

std::pair<std::vector<double>, std::vector<double>> compute_gae(
    std::span<const double> rewards, std::span<const double> values,
    std::span<const std::uint8_t> dones, double bootstrap, double gamma, double lambda_gae) {
    const std::size_t n = rewards.size();
    if (values.size() != n || dones.size() != n)
        throw DimensionError("compute_gae: arrays must have equal length");
    if (lambda_gae < 0.0 || lambda_gae > 1.0)
        throw ConfigError("compute_gae: lambda must be in [0, 1]");

    std::vector<double> advantages(n, 0.0);
    std::vector<double> returns(n, 0.0);
    double running = 0.0;
    for (std::size_t t = n; t-- > 0;) {
        const double next_value = (t + 1 < n) ? values[t + 1] : bootstrap;
        const double not_done = dones[t] ? 0.0 : 1.0;
        const double delta = rewards[t] + gamma * next_value * not_done - values[t];
        running = delta + gamma * lambda_gae * not_done * running;
        advantages[t] = running;
        returns[t] = advantages[t] + values[t];
    }
    return {std::move(advantages), std::move(returns)};
}

void compute_gae(RolloutBatch& batch, double gamma, double lambda_gae) {
    auto [adv, ret] = compute_gae(batch.shaped_rewards, batch.values, batch.dones,
                                  batch.bootstrap_value, gamma, lambda_gae);
    batch.advantages = std::move(adv);
    batch.return_targets = std::move(ret);
}

void shape_rewards(RolloutBatch& batch, const DiscriminatorFn& discriminator, double alpha,
                   RewardMode mode) {
    batch.shaped_rewards.resize(batch.size());
    if (mode == RewardMode::EnvOnly) {
        batch.shaped_rewards = batch.env_rewards;
        return;
    }
    for (std::size_t t = 0; t < batch.size(); ++t) {
        double d = discriminator(batch.observations[t], batch.actions[t]);
        if (!std::isfinite(d)) throw NumericError("shape_rewards: non-finite discriminator output");
        d = std::clamp(d, 1e-8, 1.0 - 1e-8);
        const double log_d = std::log(d);
        batch.shaped_rewards[t] = (mode == RewardMode::GasilOnly)
                                      ? -log_d
                                      : batch.env_rewards[t] - alpha * log_d;
    }
}

void normalize_advantages(RolloutBatch& batch) {
    const std::size_t n = batch.advantages.size();
    if (n < 2) throw DimensionError("normalize_advantages: need at least 2 entries");
    double mean = 0.0;
    for (double a : batch.advantages) mean += a;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double a : batch.advantages) var += (a - mean) * (a - mean);
    var /= static_cast<double>(n);
    const double denom = std::sqrt(var) + 1e-8;
    for (auto& a : batch.advantages) a = (a - mean) / denom;
}

}  // namespace gasil
