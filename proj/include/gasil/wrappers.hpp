#pragma once

#include <memory>

#include "gasil/env.hpp"
#include "gasil/rng.hpp"

namespace gasil {

// Withholds rewards and releases the accumulated sum on every delay-th step
// and on termination, so the episode total is conserved exactly.
class DelayedRewardWrapper final : public Env {
public:
    DelayedRewardWrapper(std::unique_ptr<Env> inner, int delay);

    std::vector<double> reset() override;
    EnvStep step(std::span<const double> action) override;
    int obs_dim() const override { return inner_->obs_dim(); }
    int act_dim() const override { return inner_->act_dim(); }

private:
    std::unique_ptr<Env> inner_;
    int delay_;
    double accumulated_ = 0.0;
    int steps_since_release_ = 0;
};

// Adds i.i.d. Gaussian noise to every observation component; rewards and
// termination are untouched.
class ObservationNoiseWrapper final : public Env {
public:
    ObservationNoiseWrapper(std::unique_ptr<Env> inner, double sigma, std::uint64_t seed);

    std::vector<double> reset() override;
    EnvStep step(std::span<const double> action) override;
    int obs_dim() const override { return inner_->obs_dim(); }
    int act_dim() const override { return inner_->act_dim(); }

private:
    void add_noise(std::vector<double>& obs);

    std::unique_ptr<Env> inner_;
    double sigma_;
    Rng rng_;
};

}  // namespace gasil
