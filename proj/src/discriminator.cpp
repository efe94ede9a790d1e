#include "gasil/discriminator.hpp"

#include <algorithm>
#include <cmath>

#include "gasil/errors.hpp"

namespace gasil {

Discriminator::Discriminator(MlpNetwork net, int obs_dim, double learning_rate)
    : net_(std::move(net)), obs_dim_(obs_dim), opt_(net_.param_count(), learning_rate) {
    if (net_.output_dim() != 1) throw DimensionError("Discriminator: network must output one logit");
    if (obs_dim_ <= 0 || obs_dim_ >= net_.input_dim())
        throw DimensionError("Discriminator: obs_dim inconsistent with network input");
}

Discriminator Discriminator::initialized(int obs_dim, int act_dim, std::vector<int> hidden,
                                         double learning_rate, Rng& rng) {
    std::vector<int> sizes;
    sizes.push_back(obs_dim + act_dim);
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(1);
    auto net = MlpNetwork::initialized(std::move(sizes), 1.0, rng);
    return Discriminator(std::move(net), obs_dim, learning_rate);
}

std::vector<double> Discriminator::concat(std::span<const double> obs,
                                          std::span<const double> act) const {
    if (static_cast<int>(obs.size()) != obs_dim_ ||
        static_cast<int>(obs.size() + act.size()) != net_.input_dim())
        throw DimensionError("Discriminator: pair dimensions do not match the network input");
    std::vector<double> input;
    input.reserve(obs.size() + act.size());
    input.insert(input.end(), obs.begin(), obs.end());
    input.insert(input.end(), act.begin(), act.end());
    return input;
}

double Discriminator::output(std::span<const double> obs, std::span<const double> act) const {
    const double logit = net_.forward(concat(obs, act))[0];
    return 1.0 / (1.0 + std::exp(-logit));
}

double Discriminator::reward(std::span<const double> obs, std::span<const double> act) const {
    const double d = std::clamp(output(obs, act), 1e-8, 1.0 - 1e-8);
    return -std::log(d);
}

double Discriminator::train_step(std::span<const StateActionPair> policy_pairs,
                                 std::span<const StateActionPair> buffer_pairs) {
    if (policy_pairs.empty() || buffer_pairs.empty())
        throw DimensionError("discriminator train_step: both minibatches must be non-empty");

    std::vector<double> ascent_grad(net_.param_count(), 0.0);
    MlpNetwork::ForwardCache cache;
    double objective = 0.0;

    // E_policy[log D]: d/dlogit log D = 1 - D
    for (const auto& pair : policy_pairs) {
        const auto input = concat(pair.observation, pair.action);
        const double logit = net_.forward(input, &cache)[0];
        const double d = 1.0 / (1.0 + std::exp(-logit));
        objective += std::log(std::clamp(d, 1e-12, 1.0)) / static_cast<double>(policy_pairs.size());
        const double g[1] = {(1.0 - d) / static_cast<double>(policy_pairs.size())};
        net_.backward_accumulate(cache, g, ascent_grad);
    }
    // E_buffer[log(1 - D)]: d/dlogit log(1 - D) = -D
    for (const auto& pair : buffer_pairs) {
        const auto input = concat(pair.observation, pair.action);
        const double logit = net_.forward(input, &cache)[0];
        const double d = 1.0 / (1.0 + std::exp(-logit));
        objective += std::log(std::clamp(1.0 - d, 1e-12, 1.0)) / static_cast<double>(buffer_pairs.size());
        const double g[1] = {-d / static_cast<double>(buffer_pairs.size())};
        net_.backward_accumulate(cache, g, ascent_grad);
    }

    if (!std::isfinite(objective)) throw NumericError("discriminator train_step: non-finite loss");
    // Adam minimizes; negate for ascent.
    for (auto& g : ascent_grad) g = -g;
    auto params = net_.flatten();
    adam_step(params, ascent_grad, opt_);
    net_.unflatten(params);
    return objective;
}

}  // namespace gasil
