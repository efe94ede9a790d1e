#pragma once

#include <span>
#include <vector>

#include "gasil/errors.hpp"

namespace gasil {

struct Transition {
    std::vector<double> observation;
    std::vector<double> action;
    double reward = 0.0;
};

// Discounted return sum_t gamma^t r_t.
inline double episode_return(std::span<const double> rewards, double gamma) {
    if (gamma <= 0.0 || gamma > 1.0) throw ConfigError("episode_return: gamma must be in (0, 1]");
    double total = 0.0;
    double discount = 1.0;
    for (double r : rewards) {
        total += discount * r;
        discount *= gamma;
    }
    return total;
}

// A finished (or truncated) trajectory with its discounted return cached.
class Episode {
public:
    Episode(std::vector<Transition> transitions, bool terminal, double gamma)
        : transitions_(std::move(transitions)), terminal_(terminal) {
        std::vector<double> rewards;
        rewards.reserve(transitions_.size());
        for (const auto& t : transitions_) rewards.push_back(t.reward);
        return_ = episode_return(rewards, gamma);
    }

    const std::vector<Transition>& transitions() const { return transitions_; }
    std::size_t length() const { return transitions_.size(); }
    bool terminal() const { return terminal_; }
    double discounted_return() const { return return_; }

    double undiscounted_return() const {
        double total = 0.0;
        for (const auto& t : transitions_) total += t.reward;
        return total;
    }

private:
    std::vector<Transition> transitions_;
    bool terminal_;
    double return_;
};

}  // namespace gasil
