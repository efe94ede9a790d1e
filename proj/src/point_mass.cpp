#include "gasil/point_mass.hpp"

#include <algorithm>
#include <cmath>

#include "gasil/errors.hpp"

namespace gasil {

std::vector<PointMassObject> PointMassConfig::default_layout() {
    // Greens sit at the top behind orange distractors; blues are easy side
    // pickups. A greedy nearest-reward policy grabs a blue or a single green
    // and stalls; collecting both greens requires threading past the oranges.
    return {
        {0.25, 0.85, 10.0, 0.06},  // green
        {0.75, 0.85, 10.0, 0.06},  // green
        {0.10, 0.45, 5.0, 0.06},   // blue
        {0.90, 0.45, 5.0, 0.06},   // blue
        {0.25, 0.62, -5.0, 0.06},  // orange guards
        {0.75, 0.62, -5.0, 0.06},
        {0.50, 0.78, -5.0, 0.06},
    };
}

PointMass2D::PointMass2D(PointMassConfig config, std::uint64_t seed)
    : config_(std::move(config)), rng_(seed) {
    if (config_.objects.empty()) config_.objects = PointMassConfig::default_layout();
    collected_.assign(config_.objects.size(), false);
}

std::vector<double> PointMass2D::observe() const {
    std::vector<double> obs;
    obs.reserve(obs_dim());
    obs.push_back(x_);
    obs.push_back(y_);
    for (std::size_t i = 0; i < config_.objects.size(); ++i) {
        const auto& o = config_.objects[i];
        obs.push_back(o.x - x_);
        obs.push_back(o.y - y_);
        obs.push_back(collected_[i] ? 1.0 : 0.0);
        obs.push_back(o.value / 10.0);
    }
    return obs;
}

std::vector<double> PointMass2D::reset() {
    if (config_.random_start) {
        x_ = rng_.uniform();
        y_ = rng_.uniform();
    } else {
        x_ = config_.start_x;
        y_ = config_.start_y;
    }
    std::fill(collected_.begin(), collected_.end(), false);
    steps_ = 0;
    needs_reset_ = false;
    return observe();
}

EnvStep PointMass2D::step(std::span<const double> action) {
    if (needs_reset_) throw ProtocolError("PointMass2D: step() after done without reset()");
    if (action.size() != 2) throw DimensionError("PointMass2D: action must be 2-dimensional");

    const double ax = std::clamp(action[0], -config_.max_speed, config_.max_speed);
    const double ay = std::clamp(action[1], -config_.max_speed, config_.max_speed);
    x_ = std::clamp(x_ + ax, 0.0, 1.0);
    y_ = std::clamp(y_ + ay, 0.0, 1.0);
    steps_ += 1;

    double reward = -config_.actuation_cost * std::sqrt(ax * ax + ay * ay);
    double objects_collected = 0.0;
    for (std::size_t i = 0; i < config_.objects.size(); ++i) {
        if (collected_[i]) continue;
        const auto& o = config_.objects[i];
        const double dx = x_ - o.x;
        const double dy = y_ - o.y;
        if (dx * dx + dy * dy <= o.radius * o.radius) {
            collected_[i] = true;
            reward += o.value;
            objects_collected += 1.0;
        }
    }

    EnvStep result;
    result.reward = reward;
    result.done = steps_ >= config_.max_steps;
    result.observation = observe();
    result.info["objects_collected"] = objects_collected;
    if (result.done) needs_reset_ = true;
    return result;
}

}  // namespace gasil
