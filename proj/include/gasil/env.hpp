#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace gasil {

struct EnvStep {
    std::vector<double> observation;
    double reward = 0.0;
    bool done = false;
    std::map<std::string, double> info;  // diagnostics, e.g. raw reward before wrapping
};

// Episodic environment interface. step() after done and before reset() is a
// ProtocolError.
class Env {
public:
    virtual ~Env() = default;
    virtual std::vector<double> reset() = 0;
    virtual EnvStep step(std::span<const double> action) = 0;
    virtual int obs_dim() const = 0;
    virtual int act_dim() const = 0;
};

}  // namespace gasil
