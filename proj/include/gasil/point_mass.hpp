#pragma once

#include <vector>

#include "gasil/env.hpp"
#include "gasil/rng.hpp"

namespace gasil {

struct PointMassObject {
    double x = 0.0;
    double y = 0.0;
    double value = 0.0;   // +5 blue, +10 green, -5 distractor
    double radius = 0.06;
};

struct PointMassConfig {
    std::vector<PointMassObject> objects;  // empty -> default layout
    double max_speed = 0.05;               // per-step clip on each action component
    double actuation_cost = 0.1;           // penalty coefficient on ||action||_2
    int max_steps = 128;
    double start_x = 0.5;
    double start_y = 0.1;
    bool random_start = true;  // uniform over the arena instead of (start_x, start_y)

    // 2 green (+10) guarded by distractors, 2 blue (+5), 3 orange (-5).
    static std::vector<PointMassObject> default_layout();
};

// 2D point mass in the unit square. Actions set the velocity directly; each
// object pays its value once, on first contact; every step costs
// actuation_cost * ||clipped action||.
//
// Observation: agent position, then per object (relative position, collected
// flag, value / 10). Length 2 + 4 * objects.
class PointMass2D final : public Env {
public:
    PointMass2D(PointMassConfig config, std::uint64_t seed);

    std::vector<double> reset() override;
    EnvStep step(std::span<const double> action) override;
    int obs_dim() const override { return 2 + 4 * static_cast<int>(config_.objects.size()); }
    int act_dim() const override { return 2; }

    const PointMassConfig& config() const { return config_; }
    double agent_x() const { return x_; }
    double agent_y() const { return y_; }

private:
    std::vector<double> observe() const;

    PointMassConfig config_;
    Rng rng_;
    double x_ = 0.0;
    double y_ = 0.0;
    std::vector<bool> collected_;
    int steps_ = 0;
    bool needs_reset_ = true;
};

}  // namespace gasil
