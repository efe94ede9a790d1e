#include "gasil/ppo.hpp"

#include <algorithm>
#include <cmath>

#include "gasil/errors.hpp"

namespace gasil {

double clip_gradient_norm(std::span<double> grad, double max_norm) {
    double sq = 0.0;
    for (double g : grad) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        const double scale = max_norm / norm;
        for (auto& g : grad) g *= scale;
    }
    return norm;
}

PpoStats ppo_update(GaussianPolicy& policy, MlpNetwork& value_net, const RolloutBatch& batch,
                    const PpoConfig& config, AdamState& policy_opt, AdamState& value_opt,
                    Rng& rng) {
    const std::size_t n = batch.size();
    if (batch.advantages.size() != n || batch.return_targets.size() != n)
        throw DimensionError("ppo_update: advantages/returns not finalized");
    if (config.minibatch_size <= 0 || config.epochs <= 0)
        throw ConfigError("ppo_update: epochs and minibatch size must be positive");

    PpoStats stats;
    std::size_t stat_count = 0;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    std::vector<double> policy_grad(policy.param_count());
    std::vector<double> value_grad(value_net.param_count());
    MlpNetwork::ForwardCache cache;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        // Fisher-Yates over the index array
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t j = rng.uniform_int(i);
            std::swap(order[i - 1], order[j]);
        }
        for (std::size_t start = 0; start < n; start += config.minibatch_size) {
            const std::size_t end = std::min(n, start + config.minibatch_size);
            const double mb = static_cast<double>(end - start);
            std::fill(policy_grad.begin(), policy_grad.end(), 0.0);
            std::fill(value_grad.begin(), value_grad.end(), 0.0);

            double mb_surrogate = 0.0, mb_value = 0.0, mb_entropy = 0.0, mb_kl = 0.0;
            double mb_clipped = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                const std::size_t i = order[k];
                const auto& obs = batch.observations[i];
                const auto& act = batch.actions[i];
                const double adv = batch.advantages[i];

                const DiagonalGaussian dist = policy.dist(obs, &cache);
                const double logp = dist.log_prob(act);
                const double ratio = std::exp(logp - batch.log_probs[i]);
                const double lo = 1.0 - config.clip_ratio;
                const double hi = 1.0 + config.clip_ratio;
                const double unclipped = ratio * adv;
                const double clipped = std::clamp(ratio, lo, hi) * adv;
                mb_surrogate += std::min(unclipped, clipped);
                mb_kl += batch.log_probs[i] - logp;
                mb_entropy += dist.entropy();
                if (std::abs(ratio - 1.0) > config.clip_ratio) mb_clipped += 1.0;

                // gradient flows only where the min picks the live ratio term
                double surr_weight = 0.0;
                if (unclipped <= clipped) {
                    surr_weight = adv * ratio;
                } else if (ratio >= lo && ratio <= hi) {
                    surr_weight = adv * ratio;
                }
                // maximize surrogate + entropy bonus: accumulate the ascent
                // direction, negate once at the end for the minimizer.
                if (surr_weight != 0.0)
                    policy.accumulate_log_prob_grad(cache, dist, act, surr_weight / mb, policy_grad);
                if (config.entropy_coef != 0.0)
                    policy.accumulate_entropy_grad(config.entropy_coef / mb, policy_grad);

                const double value = value_net.forward(obs, &cache)[0];
                const double err = value - batch.return_targets[i];
                mb_value += err * err;
                const double vgrad[1] = {config.value_coef * 2.0 * err / mb};
                value_net.backward_accumulate(cache, vgrad, value_grad);
            }

            for (auto& g : policy_grad) g = -g;
            clip_gradient_norm(policy_grad, config.max_grad_norm);
            clip_gradient_norm(value_grad, config.max_grad_norm);
            const auto finite = [](std::span<const double> g) {
                for (double v : g)
                    if (!std::isfinite(v)) return false;
                return true;
            };
            if (!finite(policy_grad) || !finite(value_grad)) {
                stats.skipped_minibatches += 1;
                continue;
            }
            try {
                auto pflat = policy.flatten();
                adam_step(pflat, policy_grad, policy_opt);
                policy.unflatten(pflat);
                auto vflat = value_net.flatten();
                adam_step(vflat, value_grad, value_opt);
                value_net.unflatten(vflat);
            } catch (const NumericError&) {
                stats.skipped_minibatches += 1;
                continue;
            }

            stats.surrogate_loss += -mb_surrogate / mb;
            stats.value_loss += mb_value / mb;
            stats.entropy += mb_entropy / mb;
            stats.approx_kl += mb_kl / mb;
            stats.clip_fraction += mb_clipped / mb;
            stat_count += 1;
        }
    }
    if (stat_count > 0) {
        const double c = static_cast<double>(stat_count);
        stats.surrogate_loss /= c;
        stats.value_loss /= c;
        stats.entropy /= c;
        stats.approx_kl /= c;
        stats.clip_fraction /= c;
    }
    return stats;
}

EvalResult evaluate_policy(Env& env, const GaussianPolicy& policy, int episodes, Rng& rng,
                           bool deterministic) {
    if (episodes < 1) throw ConfigError("evaluate_policy: episodes must be >= 1");
    EvalResult result;
    result.episode_returns.reserve(episodes);
    for (int e = 0; e < episodes; ++e) {
        auto obs = env.reset();
        double total = 0.0;
        bool done = false;
        while (!done) {
            const DiagonalGaussian dist = policy.dist(obs);
            const std::vector<double> action = deterministic ? dist.mean : dist.sample(rng);
            EnvStep step = env.step(action);
            total += step.reward;
            done = step.done;
            obs = std::move(step.observation);
        }
        result.episode_returns.push_back(total);
        result.mean_return += total;
    }
    result.mean_return /= static_cast<double>(episodes);
    return result;
}

}  // namespace gasil
