#include "gasil/buffer.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <limits>

#include "gasil/errors.hpp"

namespace gasil {

GoodTrajectoryBuffer::GoodTrajectoryBuffer(std::size_t capacity_steps)
    : capacity_steps_(capacity_steps) {
    if (capacity_steps_ == 0) throw ConfigError("GoodTrajectoryBuffer: capacity must be positive");
}

namespace {

// Canonical order within one update call: return desc, length asc, then
// content, so admission is invariant to the order episodes arrive in.
bool canonical_less(const Episode& a, const Episode& b) {
    if (a.discounted_return() != b.discounted_return())
        return a.discounted_return() > b.discounted_return();
    if (a.length() != b.length()) return a.length() < b.length();
    const auto& ta = a.transitions();
    const auto& tb = b.transitions();
    for (std::size_t i = 0; i < ta.size(); ++i) {
        if (ta[i].reward != tb[i].reward) return ta[i].reward < tb[i].reward;
        if (ta[i].observation != tb[i].observation) return ta[i].observation < tb[i].observation;
        if (ta[i].action != tb[i].action) return ta[i].action < tb[i].action;
    }
    return false;
}

}  // namespace

void GoodTrajectoryBuffer::update(std::vector<Episode> new_episodes) {
    std::sort(new_episodes.begin(), new_episodes.end(), canonical_less);

    std::vector<Entry> pool = std::move(entries_);
    entries_.clear();
    pool.reserve(pool.size() + new_episodes.size());
    // Newer episodes win return ties; within this call, ids run backwards so
    // the canonical (shorter-first) order survives the id tiebreak.
    const std::size_t k = new_episodes.size();
    for (std::size_t i = 0; i < k; ++i) {
        pool.push_back({std::move(new_episodes[i]), next_insertion_id_ + (k - 1 - i)});
    }
    next_insertion_id_ += k;

    std::sort(pool.begin(), pool.end(), [](const Entry& a, const Entry& b) {
        if (a.episode.discounted_return() != b.episode.discounted_return())
            return a.episode.discounted_return() > b.episode.discounted_return();
        return a.insertion_id > b.insertion_id;
    });

    total_steps_ = 0;
    for (auto& entry : pool) {
        const std::size_t len = entry.episode.length();
        if (!entries_.empty() && total_steps_ + len > capacity_steps_) break;
        total_steps_ += len;
        entries_.push_back(std::move(entry));
    }
}

double GoodTrajectoryBuffer::min_return() const {
    if (entries_.empty()) throw ProtocolError("min_return on empty buffer");
    return entries_.back().episode.discounted_return();
}

double GoodTrajectoryBuffer::mean_return() const {
    if (entries_.empty()) throw ProtocolError("mean_return on empty buffer");
    double total = 0.0;
    for (const auto& e : entries_) total += e.episode.discounted_return();
    return total / static_cast<double>(entries_.size());
}

std::optional<std::vector<StateActionPair>> GoodTrajectoryBuffer::sample(std::size_t n,
                                                                         Rng& rng) const {
    if (entries_.empty()) return std::nullopt;
    // flat index over all stored transitions
    std::vector<std::size_t> cumulative;
    cumulative.reserve(entries_.size());
    std::size_t total = 0;
    for (const auto& e : entries_) {
        total += e.episode.length();
        cumulative.push_back(total);
    }
    std::vector<StateActionPair> pairs;
    pairs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t flat = rng.uniform_int(total);
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), flat);
        const std::size_t ep = static_cast<std::size_t>(it - cumulative.begin());
        const std::size_t offset = flat - (ep == 0 ? 0 : cumulative[ep - 1]);
        const auto& t = entries_[ep].episode.transitions()[offset];
        pairs.push_back({t.observation, t.action});
    }
    return pairs;
}

namespace {

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

void write_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(b), 8);
}

double read_f64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void GoodTrajectoryBuffer::save_snapshot(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open buffer snapshot for writing: " + path);
    const std::uint32_t obs_dim =
        entries_.empty() ? 0 : static_cast<std::uint32_t>(entries_[0].episode.transitions()[0].observation.size());
    const std::uint32_t act_dim =
        entries_.empty() ? 0 : static_cast<std::uint32_t>(entries_[0].episode.transitions()[0].action.size());
    write_u32(out, static_cast<std::uint32_t>(entries_.size()));
    write_u32(out, obs_dim);
    write_u32(out, act_dim);
    for (const auto& entry : entries_) {
        write_u32(out, static_cast<std::uint32_t>(entry.episode.length()));
        write_f64(out, entry.episode.discounted_return());
        for (const auto& t : entry.episode.transitions()) {
            for (double v : t.observation) write_f64(out, v);
            for (double v : t.action) write_f64(out, v);
            write_f64(out, t.reward);
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

GoodTrajectoryBuffer GoodTrajectoryBuffer::load_snapshot(const std::string& path,
                                                         std::size_t capacity_steps, double gamma) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open buffer snapshot: " + path);
    const std::uint32_t count = read_u32(in);
    const std::uint32_t obs_dim = read_u32(in);
    const std::uint32_t act_dim = read_u32(in);
    std::vector<Episode> episodes;
    episodes.reserve(count);
    for (std::uint32_t e = 0; e < count; ++e) {
        const std::uint32_t len = read_u32(in);
        (void)read_f64(in);  // stored return; recomputed from gamma below
        std::vector<Transition> transitions;
        transitions.reserve(len);
        for (std::uint32_t t = 0; t < len; ++t) {
            Transition tr;
            tr.observation.resize(obs_dim);
            for (auto& v : tr.observation) v = read_f64(in);
            tr.action.resize(act_dim);
            for (auto& v : tr.action) v = read_f64(in);
            tr.reward = read_f64(in);
            transitions.push_back(std::move(tr));
        }
        episodes.emplace_back(std::move(transitions), true, gamma);
    }
    if (!in) throw IoError("truncated buffer snapshot: " + path);
    GoodTrajectoryBuffer buffer(capacity_steps);
    buffer.update(std::move(episodes));
    return buffer;
}

}  // namespace gasil
