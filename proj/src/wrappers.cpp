#include "gasil/wrappers.hpp"

#include "gasil/errors.hpp"

namespace gasil {

DelayedRewardWrapper::DelayedRewardWrapper(std::unique_ptr<Env> inner, int delay)
    : inner_(std::move(inner)), delay_(delay) {
    if (delay_ < 1) throw ConfigError("DelayedRewardWrapper: delay must be >= 1");
}

std::vector<double> DelayedRewardWrapper::reset() {
    accumulated_ = 0.0;
    steps_since_release_ = 0;
    return inner_->reset();
}

EnvStep DelayedRewardWrapper::step(std::span<const double> action) {
    EnvStep result = inner_->step(action);
    accumulated_ += result.reward;
    steps_since_release_ += 1;
    result.info["raw_reward"] = result.reward;
    if (steps_since_release_ == delay_ || result.done) {
        result.reward = accumulated_;
        accumulated_ = 0.0;
        steps_since_release_ = 0;
    } else {
        result.reward = 0.0;
    }
    return result;
}

ObservationNoiseWrapper::ObservationNoiseWrapper(std::unique_ptr<Env> inner, double sigma,
                                                 std::uint64_t seed)
    : inner_(std::move(inner)), sigma_(sigma), rng_(seed) {
    if (sigma_ < 0.0) throw ConfigError("ObservationNoiseWrapper: sigma must be >= 0");
}

void ObservationNoiseWrapper::add_noise(std::vector<double>& obs) {
    if (sigma_ == 0.0) return;
    for (auto& v : obs) v += sigma_ * rng_.normal();
}

std::vector<double> ObservationNoiseWrapper::reset() {
    auto obs = inner_->reset();
    add_noise(obs);
    return obs;
}

EnvStep ObservationNoiseWrapper::step(std::span<const double> action) {
    EnvStep result = inner_->step(action);
    add_noise(result.observation);
    return result;
}

}  // namespace gasil
