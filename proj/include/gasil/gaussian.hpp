#pragma once

#include <span>
#include <vector>

#include "gasil/mlp.hpp"
#include "gasil/rng.hpp"

namespace gasil {

constexpr double kLogStdMin = -20.0;
constexpr double kLogStdMax = 2.0;

// Diagonal Gaussian over actions. log_std is clamped to [-20, 2] at
// construction so sampled actions and densities stay finite.
struct DiagonalGaussian {
    std::vector<double> mean;
    std::vector<double> log_std;

    DiagonalGaussian(std::vector<double> mean_in, std::vector<double> log_std_in);

    std::size_t dim() const { return mean.size(); }
    double log_prob(std::span<const double> action) const;
    double entropy() const;
    std::vector<double> sample(Rng& rng) const;
};

// Policy network: MLP maps observation to the action mean; log_std is a free
// parameter vector independent of the state. Flat parameters are the network
// parameters followed by log_std.
class GaussianPolicy {
public:
    GaussianPolicy(MlpNetwork net, std::vector<double> log_std);
    static GaussianPolicy initialized(int obs_dim, int act_dim, std::vector<int> hidden, Rng& rng);

    int obs_dim() const { return net_.input_dim(); }
    int act_dim() const { return net_.output_dim(); }
    std::size_t param_count() const { return net_.param_count() + log_std_.size(); }

    DiagonalGaussian dist(std::span<const double> obs, MlpNetwork::ForwardCache* cache = nullptr) const;

    // Gradient of (weight * log pi(action | obs)) w.r.t. all policy
    // parameters, accumulated into `param_grad`. The cache must come from the
    // dist() call that produced this mean.
    void accumulate_log_prob_grad(const MlpNetwork::ForwardCache& cache,
                                  const DiagonalGaussian& dist, std::span<const double> action,
                                  double weight, std::span<double> param_grad) const;

    // Gradient of (weight * entropy) w.r.t. parameters (touches log_std only).
    void accumulate_entropy_grad(double weight, std::span<double> param_grad) const;

    std::vector<double> flatten() const;
    void unflatten(std::span<const double> flat);

    const MlpNetwork& net() const { return net_; }
    const std::vector<double>& log_std() const { return log_std_; }

private:
    MlpNetwork net_;
    std::vector<double> log_std_;  // raw, clamped at use
};

}  // namespace gasil
