#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gasil/episode.hpp"
#include "gasil/rng.hpp"

namespace gasil {

struct StateActionPair {
    std::vector<double> observation;
    std::vector<double> action;
};

// Top-return episode store with a total-step budget. Admission is greedy by
// descending return: the merged pool is scanned from the top and cut at the
// first episode that would overflow capacity. The buffer always keeps at
// least one episode, even when that episode alone exceeds the budget.
class GoodTrajectoryBuffer {
public:
    explicit GoodTrajectoryBuffer(std::size_t capacity_steps);

    void update(std::vector<Episode> new_episodes);

    bool empty() const { return entries_.empty(); }
    std::size_t episode_count() const { return entries_.size(); }
    std::size_t total_steps() const { return total_steps_; }
    std::size_t capacity_steps() const { return capacity_steps_; }
    double min_return() const;
    double mean_return() const;
    const Episode& episode(std::size_t i) const { return entries_[i].episode; }

    // n state-action pairs drawn uniformly with replacement over all stored
    // transitions. nullopt when the buffer is empty (caller falls back to
    // env-only rewards this iteration).
    std::optional<std::vector<StateActionPair>> sample(std::size_t n, Rng& rng) const;

    void save_snapshot(const std::string& path) const;
    static GoodTrajectoryBuffer load_snapshot(const std::string& path, std::size_t capacity_steps,
                                              double gamma);

private:
    struct Entry {
        Episode episode;
        std::uint64_t insertion_id;
    };

    std::size_t capacity_steps_;
    std::size_t total_steps_ = 0;
    std::uint64_t next_insertion_id_ = 0;
    std::vector<Entry> entries_;  // sorted by return descending
};

}  // namespace gasil
