#include "gasil/trainer.hpp"

#include <filesystem>

#include "gasil/errors.hpp"

namespace gasil {

GasilIterationStats gasil_iteration(GaussianPolicy& policy, MlpNetwork& value_net,
                                    AdamState& policy_opt, AdamState& value_opt,
                                    Discriminator& disc, GoodTrajectoryBuffer& buffer,
                                    RolloutBatch& batch, std::vector<Episode> completed_episodes,
                                    std::span<const double> frontier_obs,
                                    const GasilSettings& settings, Rng& disc_rng,
                                    Rng& shuffle_rng) {
    GasilIterationStats stats;
    int disc_skips = 0;

    buffer.update(std::move(completed_episodes));

    if (settings.n_disc_updates > 0 && !buffer.empty()) {
        const std::size_t half = static_cast<std::size_t>(settings.disc_minibatch) / 2;
        double objective_sum = 0.0;
        int steps_done = 0;
        for (int u = 0; u < settings.n_disc_updates; ++u) {
            std::vector<StateActionPair> policy_pairs;
            policy_pairs.reserve(half);
            for (std::size_t i = 0; i < half; ++i) {
                const std::size_t idx = disc_rng.uniform_int(batch.size());
                policy_pairs.push_back({batch.observations[idx], batch.actions[idx]});
            }
            auto buffer_pairs = buffer.sample(half, disc_rng);
            try {
                objective_sum += disc.train_step(policy_pairs, *buffer_pairs);
                steps_done += 1;
            } catch (const NumericError&) {
                disc_skips += 1;  // counted as an incident by the caller
            }
        }
        if (steps_done > 0) stats.disc_objective = objective_sum / steps_done;
    }

    // Warm-up: fall back to raw env rewards until the buffer holds something.
    RewardMode mode = settings.mode;
    if (mode != RewardMode::EnvOnly && buffer.empty()) mode = RewardMode::EnvOnly;
    stats.shaping_active = mode != RewardMode::EnvOnly;
    shape_rewards(
        batch,
        [&disc](std::span<const double> obs, std::span<const double> act) {
            return disc.output(obs, act);
        },
        settings.alpha, mode);

    fill_values(batch, value_net, frontier_obs);
    compute_gae(batch, settings.gamma, settings.gae_lambda);
    normalize_advantages(batch);

    stats.ppo = ppo_update(policy, value_net, batch, settings.ppo, policy_opt, value_opt,
                           shuffle_rng);
    stats.ppo.skipped_minibatches += disc_skips;
    return stats;
}

namespace {

GaussianPolicy build_policy(const ExperimentConfig& config, int obs_dim, int act_dim) {
    Rng rng = Rng::stream(config.seed, 1);
    return GaussianPolicy::initialized(obs_dim, act_dim, {64, 64}, rng);
}

MlpNetwork build_value_net(const ExperimentConfig& config, int obs_dim) {
    Rng rng = Rng::stream(config.seed, 2);
    return MlpNetwork::initialized({obs_dim, 64, 64, 1}, 1.0, rng);
}

Discriminator build_discriminator(const ExperimentConfig& config, int obs_dim, int act_dim) {
    Rng rng = Rng::stream(config.seed, 3);
    return Discriminator::initialized(obs_dim, act_dim, {64, 64}, config.disc_learning_rate, rng);
}

}  // namespace

Trainer::Trainer(const ExperimentConfig& config)
    : config_(config),
      env_(make_env(config, 0)),
      eval_env_(make_env(config, 1)),
      policy_(build_policy(config, env_->obs_dim(), env_->act_dim())),
      value_net_(build_value_net(config, env_->obs_dim())),
      disc_(build_discriminator(config, env_->obs_dim(), env_->act_dim())),
      buffer_(static_cast<std::size_t>(config.buffer_capacity_steps)),
      policy_opt_(policy_.param_count(), config.learning_rate),
      value_opt_(value_net_.param_count(), config.learning_rate),
      collector_(*env_, config.gamma),
      action_rng_(Rng::stream(config.seed, 4)),
      disc_rng_(Rng::stream(config.seed, 5)),
      shuffle_rng_(Rng::stream(config.seed, 6)),
      eval_rng_(Rng::stream(config.seed, 7)) {
    validate(config_);
}

IterationRow Trainer::run_iteration() {
    auto [batch, episodes] = collector_.collect(policy_, config_.horizon, action_rng_);
    env_steps_ += config_.horizon;
    iteration_ += 1;

    IterationRow row;
    row.iteration = iteration_;
    row.env_steps = env_steps_;
    row.episodes_completed = static_cast<int>(episodes.size());
    if (!episodes.empty()) {
        double total = 0.0;
        for (const auto& ep : episodes) total += ep.undiscounted_return();
        row.train_mean_episode_return = total / static_cast<double>(episodes.size());
    }

    GasilSettings settings;
    settings.gamma = config_.gamma;
    settings.gae_lambda = config_.gae_lambda;
    settings.disc_minibatch = config_.disc_minibatch;
    settings.ppo.clip_ratio = config_.clip_ratio;
    settings.ppo.epochs = config_.epochs;
    settings.ppo.minibatch_size = config_.minibatch_size;
    settings.ppo.value_coef = config_.value_coef;
    settings.ppo.entropy_coef = config_.entropy_coef;
    settings.ppo.max_grad_norm = config_.max_grad_norm;
    if (config_.agent == AgentKind::Ppo) {
        settings.mode = RewardMode::EnvOnly;
        settings.n_disc_updates = 0;
        settings.alpha = 0.0;
    } else {
        settings.mode = RewardMode::Combined;
        settings.n_disc_updates = config_.n_disc_updates;
        settings.alpha = config_.effective_alpha(env_steps_);
    }

    auto stats = gasil_iteration(policy_, value_net_, policy_opt_, value_opt_, disc_, buffer_,
                                 batch, std::move(episodes), collector_.frontier_observation(),
                                 settings, disc_rng_, shuffle_rng_);
    incidents_ += stats.ppo.skipped_minibatches;
    row.incidents = incidents_;
    row.disc_objective = stats.disc_objective;
    row.ppo = stats.ppo;
    if (!buffer_.empty()) {
        row.buffer_min_return = buffer_.min_return();
        row.buffer_mean_return = buffer_.mean_return();
        row.buffer_episodes = static_cast<std::int64_t>(buffer_.episode_count());
        row.buffer_steps = static_cast<std::int64_t>(buffer_.total_steps());
    }
    return row;
}

double Trainer::evaluate() {
    return evaluate_policy(*eval_env_, policy_, config_.eval_episodes, eval_rng_, true)
        .mean_return;
}

void Trainer::save_artifacts(const std::string& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    save_checkpoint((fs::path(dir) / "policy.ckpt").string(), policy_.net(), policy_.log_std());
    save_checkpoint((fs::path(dir) / "value.ckpt").string(), value_net_);
    save_checkpoint((fs::path(dir) / "discriminator.ckpt").string(), disc_.net());
    buffer_.save_snapshot((fs::path(dir) / "buffer.snapshot").string());
}

}  // namespace gasil
