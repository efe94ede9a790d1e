#include "gasil/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gasil/errors.hpp"

namespace gasil {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)
}

DiagonalGaussian::DiagonalGaussian(std::vector<double> mean_in, std::vector<double> log_std_in)
    : mean(std::move(mean_in)), log_std(std::move(log_std_in)) {
    if (mean.size() != log_std.size())
        throw DimensionError("DiagonalGaussian: mean and log_std dimensions differ");
    for (auto& ls : log_std) ls = std::clamp(ls, kLogStdMin, kLogStdMax);
}

double DiagonalGaussian::log_prob(std::span<const double> action) const {
    if (action.size() != mean.size())
        throw DimensionError("log_prob: action dimension mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < mean.size(); ++i) {
        const double sigma = std::exp(log_std[i]);
        const double z = (action[i] - mean[i]) / sigma;
        total += -0.5 * z * z - log_std[i] - 0.5 * kLog2Pi;
    }
    return total;
}

double DiagonalGaussian::entropy() const {
    double total = 0.0;
    for (double ls : log_std) total += ls + 0.5 * (kLog2Pi + 1.0);
    return total;
}

std::vector<double> DiagonalGaussian::sample(Rng& rng) const {
    std::vector<double> action(mean.size());
    for (std::size_t i = 0; i < mean.size(); ++i)
        action[i] = mean[i] + std::exp(log_std[i]) * rng.normal();
    return action;
}

GaussianPolicy::GaussianPolicy(MlpNetwork net, std::vector<double> log_std)
    : net_(std::move(net)), log_std_(std::move(log_std)) {
    if (static_cast<int>(log_std_.size()) != net_.output_dim())
        throw DimensionError("GaussianPolicy: log_std length must equal the action dimension");
}

GaussianPolicy GaussianPolicy::initialized(int obs_dim, int act_dim, std::vector<int> hidden,
                                           Rng& rng) {
    std::vector<int> sizes;
    sizes.push_back(obs_dim);
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(act_dim);
    // small output gain keeps the initial mean near zero
    auto net = MlpNetwork::initialized(std::move(sizes), 0.01, rng);
    return GaussianPolicy(std::move(net), std::vector<double>(act_dim, 0.0));
}

DiagonalGaussian GaussianPolicy::dist(std::span<const double> obs,
                                      MlpNetwork::ForwardCache* cache) const {
    return DiagonalGaussian(net_.forward(obs, cache), log_std_);
}

void GaussianPolicy::accumulate_log_prob_grad(const MlpNetwork::ForwardCache& cache,
                                              const DiagonalGaussian& dist,
                                              std::span<const double> action, double weight,
                                              std::span<double> param_grad) const {
    const std::size_t act_dim = dist.dim();
    std::vector<double> mean_grad(act_dim);
    for (std::size_t i = 0; i < act_dim; ++i) {
        const double sigma = std::exp(dist.log_std[i]);
        const double z = (action[i] - dist.mean[i]) / sigma;
        mean_grad[i] = weight * z / sigma;  // d logp / d mean
        // d logp / d log_std; zero where the clamp is active
        if (log_std_[i] > kLogStdMin && log_std_[i] < kLogStdMax) {
            param_grad[net_.param_count() + i] += weight * (z * z - 1.0);
        }
    }
    net_.backward_accumulate(cache, mean_grad, param_grad.subspan(0, net_.param_count()));
}

void GaussianPolicy::accumulate_entropy_grad(double weight, std::span<double> param_grad) const {
    for (std::size_t i = 0; i < log_std_.size(); ++i) {
        if (log_std_[i] > kLogStdMin && log_std_[i] < kLogStdMax)
            param_grad[net_.param_count() + i] += weight;
    }
}

std::vector<double> GaussianPolicy::flatten() const {
    auto flat = net_.flatten();
    flat.insert(flat.end(), log_std_.begin(), log_std_.end());
    return flat;
}

void GaussianPolicy::unflatten(std::span<const double> flat) {
    if (flat.size() != param_count())
        throw DimensionError("GaussianPolicy::unflatten: wrong parameter count");
    net_.unflatten(flat.subspan(0, net_.param_count()));
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(net_.param_count()), flat.end(),
              log_std_.begin());
}

}  // namespace gasil
