// Acceptance gate: one line per criterion, PASS or FAIL, with the measured
// quantity and its pinned tolerance. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "gasil/buffer.hpp"
#include "gasil/config.hpp"
#include "gasil/discriminator.hpp"
#include "gasil/errors.hpp"
#include "gasil/experiment.hpp"
#include "gasil/gaussian.hpp"
#include "gasil/mlp.hpp"
#include "gasil/rollout.hpp"
#include "gasil/trainer.hpp"
#include "gasil/wrappers.hpp"

using namespace gasil;
namespace fs = std::filesystem;

namespace {

int failures = 0;

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s criterion %2d (%s): %s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------- criterion 1

double fd_gradient(const std::function<double(std::span<const double>)>& f,
                   std::vector<double> params, std::size_t i, double h = 1e-5) {
    const double saved = params[i];
    params[i] = saved + h;
    const double up = f(params);
    params[i] = saved - h;
    const double down = f(params);
    return (up - down) / (2.0 * h);
}

double probe_mlp_gradient(Rng& rng) {
    const int n_in = 2 + static_cast<int>(rng.uniform_int(5));
    const int n_hidden = 2 + static_cast<int>(rng.uniform_int(6));
    const int n_out = 1 + static_cast<int>(rng.uniform_int(3));
    MlpNetwork net = MlpNetwork::initialized({n_in, n_hidden, n_out}, 1.0, rng);
    std::vector<double> input(n_in), cotangent(n_out);
    for (auto& v : input) v = rng.normal();
    for (auto& v : cotangent) v = rng.normal();

    MlpNetwork::ForwardCache cache;
    net.forward(input, &cache);
    std::vector<double> analytic(net.param_count(), 0.0);
    net.backward_accumulate(cache, cotangent, analytic);

    MlpNetwork probe = net;
    const auto loss = [&](std::span<const double> flat) {
        probe.unflatten(flat);
        const auto out = probe.forward(input);
        double total = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) total += cotangent[i] * out[i];
        return total;
    };

    const auto flat = net.flatten();
    double max_rel = 0.0;
    for (std::size_t i = 0; i < flat.size(); ++i) {
        const double fd = fd_gradient(loss, flat, i);
        const double rel =
            std::abs(analytic[i] - fd) / std::max({std::abs(analytic[i]), std::abs(fd), 1e-6});
        max_rel = std::max(max_rel, rel);
    }
    return max_rel;
}

double probe_policy_gradient(Rng& rng) {
    const int n_obs = 2 + static_cast<int>(rng.uniform_int(4));
    const int n_act = 1 + static_cast<int>(rng.uniform_int(3));
    GaussianPolicy policy = GaussianPolicy::initialized(n_obs, n_act, {6}, rng);
    std::vector<double> obs(n_obs);
    for (auto& v : obs) v = rng.normal();
    MlpNetwork::ForwardCache cache;
    const DiagonalGaussian dist = policy.dist(obs, &cache);
    const std::vector<double> action = dist.sample(rng);
    const double weight = rng.normal();

    std::vector<double> analytic(policy.param_count(), 0.0);
    policy.accumulate_log_prob_grad(cache, dist, action, weight, analytic);

    GaussianPolicy probe = policy;
    const auto loss = [&](std::span<const double> flat) {
        probe.unflatten(flat);
        return weight * probe.dist(obs).log_prob(action);
    };
    const auto flat = policy.flatten();
    double max_rel = 0.0;
    for (std::size_t i = 0; i < flat.size(); ++i) {
        const double fd = fd_gradient(loss, flat, i);
        const double rel =
            std::abs(analytic[i] - fd) / std::max({std::abs(analytic[i]), std::abs(fd), 1e-6});
        max_rel = std::max(max_rel, rel);
    }
    return max_rel;
}

void criterion_1() {
    Timer timer;
    Rng rng(101);
    double worst = 0.0;
    for (int probe = 0; probe < 100; ++probe) worst = std::max(worst, probe_mlp_gradient(rng));
    for (int probe = 0; probe < 100; ++probe) worst = std::max(worst, probe_policy_gradient(rng));
    const double elapsed = timer.seconds();
    report(1, "gradient correctness", worst < 1e-4 && elapsed < 10.0,
           "max relative error " + fmt(worst) + " (tol 1e-4) over 200 probes in " + fmt(elapsed) +
               " s (budget 10 s)");
}

// ---------------------------------------------------------------- criterion 2

void criterion_2() {
    Timer timer;
    Rng rng(202);
    double worst = 0.0;
    for (int episode = 0; episode < 1000; ++episode) {
        const std::size_t n = 1 + rng.uniform_int(16);
        std::vector<double> rewards(n), values(n);
        std::vector<std::uint8_t> dones(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            rewards[i] = 5.0 * rng.normal();
            values[i] = 3.0 * rng.normal();
            dones[i] = rng.uniform() < 0.2 ? 1 : 0;
        }
        const double bootstrap = rng.normal();
        const double gamma = 0.9 + 0.0999 * rng.uniform();
        const double lambda = rng.uniform();
        const auto [adv, ret] = compute_gae(rewards, values, dones, bootstrap, gamma, lambda);
        for (std::size_t t = 0; t < n; ++t) {
            double expected = 0.0;
            double coef = 1.0;
            for (std::size_t k = t; k < n; ++k) {
                const double next_value = (k + 1 < n) ? values[k + 1] : bootstrap;
                const double not_done = dones[k] ? 0.0 : 1.0;
                expected += coef * (rewards[k] + gamma * next_value * not_done - values[k]);
                if (dones[k]) break;
                coef *= gamma * lambda;
            }
            worst = std::max(worst, std::abs(adv[t] - expected));
            worst = std::max(worst, std::abs(ret[t] - (adv[t] + values[t])));
        }
    }
    const double elapsed = timer.seconds();
    report(2, "GAE oracle", worst < 1e-10 && elapsed < 5.0,
           "max abs deviation " + fmt(worst) + " (tol 1e-10) over 1000 episodes in " +
               fmt(elapsed) + " s (budget 5 s)");
}

// ---------------------------------------------------------------- criterion 3

class ReplayEnv final : public Env {
public:
    explicit ReplayEnv(std::vector<double> rewards) : rewards_(std::move(rewards)) {}
    std::vector<double> reset() override {
        t_ = 0;
        return {0.0};
    }
    EnvStep step(std::span<const double>) override {
        EnvStep s;
        s.reward = rewards_[t_];
        t_ += 1;
        s.done = t_ == rewards_.size();
        s.observation = {0.0};
        return s;
    }
    int obs_dim() const override { return 1; }
    int act_dim() const override { return 1; }

private:
    std::vector<double> rewards_;
    std::size_t t_ = 0;
};

void criterion_3() {
    Rng rng(303);
    bool integer_exact = true;
    double worst_real = 0.0;
    for (int episode = 0; episode < 1000; ++episode) {
        const std::size_t len = 1 + rng.uniform_int(50);
        std::vector<double> int_rewards(len), real_rewards(len);
        for (std::size_t i = 0; i < len; ++i) {
            int_rewards[i] = std::floor(rng.uniform() * 21.0) - 10.0;
            real_rewards[i] = 10.0 * rng.normal();
        }
        for (int delay : {1, 2, 7, 20}) {
            for (int variant = 0; variant < 2; ++variant) {
                const auto& rewards = variant == 0 ? int_rewards : real_rewards;
                DelayedRewardWrapper env(std::make_unique<ReplayEnv>(rewards), delay);
                env.reset();
                double wrapped = 0.0, raw = 0.0;
                for (std::size_t i = 0; i < len; ++i)
                    wrapped += env.step(std::vector<double>{0.0}).reward;
                for (double r : rewards) raw += r;
                if (variant == 0) {
                    if (wrapped != raw) integer_exact = false;
                } else {
                    worst_real = std::max(worst_real,
                                          std::abs(wrapped - raw) / std::max(1.0, std::abs(raw)));
                }
            }
        }
    }
    report(3, "delay-wrapper conservation", integer_exact && worst_real < 1e-12,
           std::string("integer rewards ") + (integer_exact ? "bitwise equal" : "NOT equal") +
               ", real-valued max relative deviation " + fmt(worst_real) + " (tol 1e-12)");
}

// ---------------------------------------------------------------- criterion 4

void criterion_4() {
    Timer timer;
    Rng rng(404);
    bool ok = true;
    std::string detail;
    int updates_done = 0;
    for (const std::size_t capacity : {50ul, 200ul, 1000ul, 10000ul}) {
        GoodTrajectoryBuffer buffer(capacity);
        double prev_min = -1e300;
        std::size_t prev_steps = 0;
        for (int update = 0; update < 2500 && ok; ++update) {
            std::vector<Episode> batch;
            const int count = 1 + static_cast<int>(rng.uniform_int(3));
            for (int e = 0; e < count; ++e) {
                const std::size_t len = 1 + rng.uniform_int(capacity / 5 + 4);
                std::vector<Transition> steps(len);
                const double total = 20.0 * rng.normal();
                for (std::size_t i = 0; i < len; ++i) {
                    steps[i].observation = {rng.normal()};
                    steps[i].action = {rng.normal()};
                    steps[i].reward = i == 0 ? total : 0.0;
                }
                batch.emplace_back(std::move(steps), true, 1.0);
            }
            buffer.update(std::move(batch));
            ++updates_done;
            if (buffer.empty()) {
                ok = false;
                detail = "buffer became empty";
            } else if (buffer.episode_count() > 1 && buffer.total_steps() > capacity) {
                ok = false;
                detail = "capacity exceeded with multiple episodes stored";
            } else if (buffer.total_steps() <= prev_steps && buffer.min_return() < prev_min) {
                // Monotonicity, conditioned on the step budget: the minimum
                // stored return may only drop when total stored steps grow.
                ok = false;
                detail = "min return dropped without the stored step count growing";
            }
            prev_min = buffer.min_return();
            prev_steps = buffer.total_steps();
        }
    }
    const double elapsed = timer.seconds();
    if (ok)
        detail = "capacity bound and conditional min-return monotonicity held for " +
                 std::to_string(updates_done) + " updates";
    report(4, "buffer properties", ok && elapsed < 10.0,
           detail + " in " + fmt(elapsed) + " s (budget 10 s)");
}

// ---------------------------------------------------------------- criterion 5

void criterion_5() {
    Timer timer;
    Rng rng(505);
    // Part A: linearly separable clusters.
    Discriminator sep = Discriminator::initialized(2, 1, {64, 64}, 1e-3, rng);
    std::vector<StateActionPair> policy_pairs, buffer_pairs;
    for (int i = 0; i < 64; ++i) {
        policy_pairs.push_back({{1.0 + 0.2 * rng.normal(), 0.2 * rng.normal()}, {0.5}});
        buffer_pairs.push_back({{-1.0 + 0.2 * rng.normal(), 0.2 * rng.normal()}, {-0.5}});
    }
    for (int step = 0; step < 200; ++step) sep.train_step(policy_pairs, buffer_pairs);
    int correct = 0;
    for (const auto& p : policy_pairs)
        if (sep.output(p.observation, p.action) > 0.5) ++correct;
    for (const auto& p : buffer_pairs)
        if (sep.output(p.observation, p.action) < 0.5) ++correct;
    const double accuracy = correct / 128.0;

    // Part B: identical distributions must stay near the 0.5 fixed point.
    Discriminator same = Discriminator::initialized(2, 1, {64, 64}, 1e-3, rng);
    std::vector<StateActionPair> shared;
    for (int i = 0; i < 128; ++i) shared.push_back({{rng.normal(), rng.normal()}, {rng.normal()}});
    for (int step = 0; step < 500; ++step) same.train_step(shared, shared);
    double mean_d = 0.0;
    for (const auto& p : shared) mean_d += same.output(p.observation, p.action) / shared.size();

    const double elapsed = timer.seconds();
    report(5, "discriminator sanity",
           accuracy >= 0.95 && std::abs(mean_d - 0.5) <= 0.05 && elapsed < 30.0,
           "separable accuracy " + fmt(accuracy) + " (need >= 0.95), p=q mean output " +
               fmt(mean_d) + " (need 0.5 +/- 0.05) in " + fmt(elapsed) + " s (budget 30 s)");
}

// ------------------------------------------------------------ criteria 6 to 8

struct PairedResult {
    std::vector<double> ppo;
    std::vector<double> gasil;
    double ppo_mean = 0.0;
    double gasil_mean = 0.0;
    int gasil_wins = 0;
};

double final_return(ExperimentConfig config) {
    Trainer trainer(config);
    const int iterations = trainer.iterations_total();
    for (int i = 0; i < iterations; ++i) trainer.run_iteration();
    // Score the final policy on 50 deterministic episodes: wider than the
    // periodic in-run evaluation, so seed-paired comparisons are less noisy.
    const auto env = make_env(config, 1);
    Rng eval_rng = Rng::stream(config.seed, 7);
    return evaluate_policy(*env, trainer.policy(), 50, eval_rng, true).mean_return;
}

PairedResult paired_comparison(const ExperimentConfig& base, int seeds) {
    PairedResult result;
    for (int seed = 0; seed < seeds; ++seed) {
        ExperimentConfig ppo = base;
        ppo.agent = AgentKind::Ppo;
        ppo.seed = seed;
        ExperimentConfig gasil = base;
        gasil.agent = AgentKind::PpoGasil;
        gasil.seed = seed;
        const double r_ppo = final_return(ppo);
        const double r_gasil = final_return(gasil);
        result.ppo.push_back(r_ppo);
        result.gasil.push_back(r_gasil);
        result.ppo_mean += r_ppo / seeds;
        result.gasil_mean += r_gasil / seeds;
        if (r_gasil > r_ppo) ++result.gasil_wins;
    }
    return result;
}

double dense_margin = 0.0;  // criterion 6's improvement, reused by criterion 7

void criterion_6() {
    Timer timer;
    ExperimentConfig base;  // dense point mass, library defaults
    const PairedResult r = paired_comparison(base, 10);
    dense_margin = r.gasil_mean - r.ppo_mean;
    const double elapsed = timer.seconds();
    report(6, "dense ordinal replication",
           r.gasil_mean > r.ppo_mean && r.gasil_wins >= 7 && elapsed < 1200.0,
           "GASIL mean " + fmt(r.gasil_mean) + " vs PPO mean " + fmt(r.ppo_mean) + ", wins " +
               std::to_string(r.gasil_wins) + "/10 (need mean greater and >= 7 wins) in " +
               fmt(elapsed) + " s (budget 1200 s)");
}

void criterion_7() {
    Timer timer;
    ExperimentConfig base;
    base.delay = 20;
    const PairedResult r = paired_comparison(base, 10);
    const double margin = r.gasil_mean - r.ppo_mean;
    const double elapsed = timer.seconds();
    report(7, "delayed-reward replication",
           margin >= dense_margin && r.gasil_mean > r.ppo_mean && elapsed < 1200.0,
           "delay-20 margin " + fmt(margin) + " vs dense margin " + fmt(dense_margin) +
               " (need at least as large), GASIL mean " + fmt(r.gasil_mean) + " vs PPO mean " +
               fmt(r.ppo_mean) + " in " + fmt(elapsed) + " s (budget 1200 s)");
}

void criterion_8() {
    Timer timer;
    ExperimentConfig base;
    base.obs_noise = 0.1;
    const PairedResult r = paired_comparison(base, 10);
    const double elapsed = timer.seconds();
    report(8, "noise robustness", r.gasil_mean > r.ppo_mean,
           "sigma 0.1: GASIL mean " + fmt(r.gasil_mean) + " vs PPO mean " + fmt(r.ppo_mean) +
               " (need greater) across 10 seeds in " + fmt(elapsed) + " s");
}

// ------------------------------------------------------------ criteria 9, 10

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ExperimentConfig short_config(const std::string& dir) {
    ExperimentConfig config;
    config.total_steps = 4096;
    config.horizon = 512;
    config.eval_interval = 2;
    config.eval_episodes = 3;
    config.point_mass.max_steps = 64;
    config.buffer_capacity_steps = 256;
    config.seed = 7;
    config.output_dir = dir;
    return config;
}

void criterion_9() {
    const fs::path root = fs::temp_directory_path() / "gasil_acceptance" / "identity";
    fs::remove_all(root);
    ExperimentConfig ppo = short_config((root / "ppo").string());
    ppo.agent = AgentKind::Ppo;
    ExperimentConfig gasil0 = short_config((root / "gasil0").string());
    gasil0.agent = AgentKind::PpoGasil;
    gasil0.alpha = 0.0;
    gasil0.n_disc_updates = 0;
    run_experiment(ppo);
    run_experiment(gasil0);
    bool ok = true;
    std::string mismatch;
    for (const char* name : {"run.csv", "policy.ckpt", "value.ckpt", "buffer.snapshot"}) {
        if (read_file(root / "ppo" / name) != read_file(root / "gasil0" / name)) {
            ok = false;
            mismatch += std::string(" ") + name;
        }
    }
    fs::remove_all(root);
    report(9, "ablation identity", ok,
           ok ? "alpha=0 / zero-discriminator run is byte-identical to pure PPO"
              : "byte mismatch in" + mismatch);
}

void criterion_10() {
    const fs::path root = fs::temp_directory_path() / "gasil_acceptance" / "determinism";
    fs::remove_all(root);
    run_experiment(short_config((root / "a").string()));
    run_experiment(short_config((root / "b").string()));
    const bool csv_equal = read_file(root / "a" / "run.csv") == read_file(root / "b" / "run.csv");
    const bool ckpt_equal =
        read_file(root / "a" / "policy.ckpt") == read_file(root / "b" / "policy.ckpt");
    fs::remove_all(root);
    report(10, "rerun determinism", csv_equal && ckpt_equal,
           csv_equal ? "repeated (config, seed) run reproduced run.csv and checkpoints bitwise"
                     : "run.csv bytes differ between reruns");
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    std::printf("%s: %d of 10 criteria passed\n", failures == 0 ? "ALL PASS" : "FAILURES",
                10 - failures);
    return failures;
}
