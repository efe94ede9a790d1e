#include "gasil/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gasil/errors.hpp"
#include "gasil/rng.hpp"
#include "gasil/wrappers.hpp"

namespace gasil {

std::string to_string(AgentKind kind) {
    return kind == AgentKind::Ppo ? "ppo" : "ppo_gasil";
}

AgentKind agent_kind_from_string(const std::string& name) {
    if (name == "ppo") return AgentKind::Ppo;
    if (name == "ppo_gasil") return AgentKind::PpoGasil;
    throw ConfigError("agent: unknown agent '" + name + "' (expected ppo or ppo_gasil)");
}

double ExperimentConfig::effective_alpha(std::int64_t env_steps) const {
    if (alpha_ramp_end <= alpha_ramp_start) return alpha;
    if (env_steps <= alpha_ramp_start) return 0.0;
    if (env_steps >= alpha_ramp_end) return alpha;
    const double frac = static_cast<double>(env_steps - alpha_ramp_start) /
                        static_cast<double>(alpha_ramp_end - alpha_ramp_start);
    return alpha * frac;
}

void validate(const ExperimentConfig& c) {
    const auto fail = [](const std::string& field, const std::string& why) {
        throw ConfigError(field + ": " + why);
    };
    if (c.env != "point_mass") fail("env", "unknown environment '" + c.env + "'");
    if (c.total_steps <= 0) fail("total_steps", "must be positive");
    if (c.horizon <= 0) fail("horizon", "must be positive");
    if (c.total_steps % c.horizon != 0) fail("total_steps", "must be divisible by horizon");
    if (c.epochs <= 0) fail("epochs", "must be positive");
    if (c.minibatch_size <= 0) fail("minibatch_size", "must be positive");
    if (c.gamma <= 0.0 || c.gamma > 1.0) fail("gamma", "must be in (0, 1]");
    if (c.gae_lambda < 0.0 || c.gae_lambda > 1.0) fail("gae_lambda", "must be in [0, 1]");
    if (c.entropy_coef < 0.0) fail("entropy_coef", "must be >= 0");
    if (c.learning_rate <= 0.0) fail("learning_rate", "must be positive");
    if (c.clip_ratio <= 0.0) fail("clip_ratio", "must be positive");
    if (c.value_coef <= 0.0) fail("value_coef", "must be positive");
    if (c.max_grad_norm <= 0.0) fail("max_grad_norm", "must be positive");
    if (c.disc_learning_rate <= 0.0) fail("disc_learning_rate", "must be positive");
    if (c.disc_minibatch < 2) fail("disc_minibatch", "must be >= 2");
    if (c.n_disc_updates < 0) fail("n_disc_updates", "must be >= 0");
    if (c.buffer_capacity_steps <= 0) fail("buffer_capacity_steps", "must be positive");
    if (c.alpha < 0.0) fail("alpha", "must be >= 0");
    if (c.delay < 1) fail("delay", "must be >= 1");
    if (c.obs_noise < 0.0) fail("obs_noise", "must be >= 0");
    if (c.eval_interval <= 0) fail("eval_interval", "must be positive");
    if (c.eval_episodes <= 0) fail("eval_episodes", "must be positive");
    if (c.incident_threshold < 0) fail("incident_threshold", "must be >= 0");
    if (c.point_mass.max_steps <= 0) fail("max_steps", "must be positive");
    if (c.point_mass.max_speed <= 0.0) fail("max_speed", "must be positive");
    if (c.point_mass.actuation_cost < 0.0) fail("actuation_cost", "must be >= 0");
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string unquote(std::string v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    return v;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double value = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return value;
    } catch (const std::exception&) {
        throw ConfigError(key + ": not a number: '" + v + "'");
    }
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const std::int64_t value = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return value;
    } catch (const std::exception&) {
        throw ConfigError(key + ": not an integer: '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(key + ": not a boolean: '" + v + "'");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void apply_config_line(ExperimentConfig& c, const std::string& key, const std::string& raw) {
    const std::string v = unquote(raw);
    if (key == "agent") c.agent = agent_kind_from_string(v);
    else if (key == "env") c.env = v;
    else if (key == "delay") c.delay = static_cast<int>(parse_int(key, v));
    else if (key == "obs_noise") c.obs_noise = parse_double(key, v);
    else if (key == "total_steps") c.total_steps = parse_int(key, v);
    else if (key == "horizon") c.horizon = static_cast<int>(parse_int(key, v));
    else if (key == "epochs") c.epochs = static_cast<int>(parse_int(key, v));
    else if (key == "minibatch_size") c.minibatch_size = static_cast<int>(parse_int(key, v));
    else if (key == "gamma") c.gamma = parse_double(key, v);
    else if (key == "gae_lambda") c.gae_lambda = parse_double(key, v);
    else if (key == "entropy_coef") c.entropy_coef = parse_double(key, v);
    else if (key == "learning_rate") c.learning_rate = parse_double(key, v);
    else if (key == "clip_ratio") c.clip_ratio = parse_double(key, v);
    else if (key == "value_coef") c.value_coef = parse_double(key, v);
    else if (key == "max_grad_norm") c.max_grad_norm = parse_double(key, v);
    else if (key == "disc_learning_rate") c.disc_learning_rate = parse_double(key, v);
    else if (key == "disc_minibatch") c.disc_minibatch = static_cast<int>(parse_int(key, v));
    else if (key == "n_disc_updates") c.n_disc_updates = static_cast<int>(parse_int(key, v));
    else if (key == "buffer_capacity_steps") c.buffer_capacity_steps = parse_int(key, v);
    else if (key == "alpha") c.alpha = parse_double(key, v);
    else if (key == "alpha_ramp_start") c.alpha_ramp_start = parse_int(key, v);
    else if (key == "alpha_ramp_end") c.alpha_ramp_end = parse_int(key, v);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(key, v));
    else if (key == "eval_interval") c.eval_interval = static_cast<int>(parse_int(key, v));
    else if (key == "eval_episodes") c.eval_episodes = static_cast<int>(parse_int(key, v));
    else if (key == "incident_threshold") c.incident_threshold = static_cast<int>(parse_int(key, v));
    else if (key == "output_dir") c.output_dir = v;
    else if (key == "max_steps") c.point_mass.max_steps = static_cast<int>(parse_int(key, v));
    else if (key == "max_speed") c.point_mass.max_speed = parse_double(key, v);
    else if (key == "actuation_cost") c.point_mass.actuation_cost = parse_double(key, v);
    else if (key == "random_start") c.point_mass.random_start = parse_bool(key, v);
    else if (key == "start_x") c.point_mass.start_x = parse_double(key, v);
    else if (key == "start_y") c.point_mass.start_y = parse_double(key, v);
    else if (key == "object") {
        std::istringstream parts(v);
        PointMassObject obj;
        if (!(parts >> obj.x >> obj.y >> obj.value >> obj.radius))
            throw ConfigError("object: expected 'x y value radius', got '" + v + "'");
        c.point_mass.objects.push_back(obj);
    } else {
        throw ConfigError(key + ": unknown configuration key");
    }
}

void apply_config_file(ExperimentConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file: cannot open '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config file: line " + std::to_string(lineno) + " is not 'key = value'");
        apply_config_line(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

std::string serialize(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "agent = \"" << to_string(c.agent) << "\"\n";
    out << "env = \"" << c.env << "\"\n";
    out << "delay = " << c.delay << "\n";
    out << "obs_noise = " << fmt(c.obs_noise) << "\n";
    out << "total_steps = " << c.total_steps << "\n";
    out << "horizon = " << c.horizon << "\n";
    out << "epochs = " << c.epochs << "\n";
    out << "minibatch_size = " << c.minibatch_size << "\n";
    out << "gamma = " << fmt(c.gamma) << "\n";
    out << "gae_lambda = " << fmt(c.gae_lambda) << "\n";
    out << "entropy_coef = " << fmt(c.entropy_coef) << "\n";
    out << "learning_rate = " << fmt(c.learning_rate) << "\n";
    out << "clip_ratio = " << fmt(c.clip_ratio) << "\n";
    out << "value_coef = " << fmt(c.value_coef) << "\n";
    out << "max_grad_norm = " << fmt(c.max_grad_norm) << "\n";
    out << "disc_learning_rate = " << fmt(c.disc_learning_rate) << "\n";
    out << "disc_minibatch = " << c.disc_minibatch << "\n";
    out << "n_disc_updates = " << c.n_disc_updates << "\n";
    out << "buffer_capacity_steps = " << c.buffer_capacity_steps << "\n";
    out << "alpha = " << fmt(c.alpha) << "\n";
    out << "alpha_ramp_start = " << c.alpha_ramp_start << "\n";
    out << "alpha_ramp_end = " << c.alpha_ramp_end << "\n";
    out << "seed = " << c.seed << "\n";
    out << "eval_interval = " << c.eval_interval << "\n";
    out << "eval_episodes = " << c.eval_episodes << "\n";
    out << "incident_threshold = " << c.incident_threshold << "\n";
    out << "max_steps = " << c.point_mass.max_steps << "\n";
    out << "max_speed = " << fmt(c.point_mass.max_speed) << "\n";
    out << "actuation_cost = " << fmt(c.point_mass.actuation_cost) << "\n";
    out << "random_start = " << (c.point_mass.random_start ? "true" : "false") << "\n";
    out << "start_x = " << fmt(c.point_mass.start_x) << "\n";
    out << "start_y = " << fmt(c.point_mass.start_y) << "\n";
    const auto& objects =
        c.point_mass.objects.empty() ? PointMassConfig::default_layout() : c.point_mass.objects;
    for (const auto& o : objects) {
        out << "object = \"" << fmt(o.x) << " " << fmt(o.y) << " " << fmt(o.value) << " "
            << fmt(o.radius) << "\"\n";
    }
    return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& config) {
    // FNV-1a over the canonical serialization
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (unsigned char ch : serialize(config)) {
        hash ^= ch;
        hash *= 0x100000001B3ULL;
    }
    return hash;
}

std::unique_ptr<Env> make_env(const ExperimentConfig& config, std::uint64_t seed_offset) {
    if (config.env != "point_mass") throw ConfigError("env: unknown environment '" + config.env + "'");
    const std::uint64_t env_seed =
        Rng::stream(config.seed, 1000 + seed_offset).next_u64();
    std::unique_ptr<Env> env =
        std::make_unique<PointMass2D>(config.point_mass, env_seed);
    if (config.delay > 1)
        env = std::make_unique<DelayedRewardWrapper>(std::move(env), config.delay);
    if (config.obs_noise > 0.0) {
        const std::uint64_t noise_seed = Rng::stream(config.seed, 2000 + seed_offset).next_u64();
        env = std::make_unique<ObservationNoiseWrapper>(std::move(env), config.obs_noise, noise_seed);
    }
    return env;
}

}  // namespace gasil
