#pragma once

#include <span>
#include <vector>

#include "gasil/adam.hpp"
#include "gasil/buffer.hpp"
#include "gasil/mlp.hpp"
#include "gasil/rng.hpp"

namespace gasil {

// Binary classifier over (observation, action) pairs. The network outputs a
// single logit; D = sigmoid(logit) is the probability the pair came from the
// current policy (class 1) rather than the good-trajectory buffer (class 0).
class Discriminator {
public:
    Discriminator(MlpNetwork net, int obs_dim, double learning_rate);
    static Discriminator initialized(int obs_dim, int act_dim, std::vector<int> hidden,
                                     double learning_rate, Rng& rng);

    int obs_dim() const { return obs_dim_; }
    int act_dim() const { return net_.input_dim() - obs_dim_; }

    double output(std::span<const double> obs, std::span<const double> act) const;

    // -log(clamp(D, 1e-8, 1-1e-8)); strictly positive, higher for buffer-like pairs.
    double reward(std::span<const double> obs, std::span<const double> act) const;

    // One gradient-ascent step on
    //   E_policy[log D] + E_buffer[log(1 - D)].
    // Returns the pre-step objective. Throws NumericError (leaving the
    // parameters untouched) if the loss or gradient is non-finite.
    double train_step(std::span<const StateActionPair> policy_pairs,
                      std::span<const StateActionPair> buffer_pairs);

    const MlpNetwork& net() const { return net_; }
    MlpNetwork& net() { return net_; }
    const AdamState& optimizer() const { return opt_; }

private:
    std::vector<double> concat(std::span<const double> obs, std::span<const double> act) const;

    MlpNetwork net_;  // input obs_dim + act_dim, output 1 logit
    int obs_dim_;
    AdamState opt_;
};

}  // namespace gasil
