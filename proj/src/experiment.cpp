#include "gasil/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gasil/errors.hpp"

namespace gasil {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string opt_cell(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

}  // namespace

double RunRecord::final_eval_return() const {
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
        if (it->eval_mean_return) return *it->eval_mean_return;
    }
    throw ProtocolError("RunRecord: no evaluation rows");
}

std::string csv_header() {
    return "iteration,env_steps,eval_mean_return,buffer_min_return,buffer_mean_return,"
           "buffer_episodes,buffer_steps,disc_objective,surrogate_loss,value_loss,entropy,"
           "clip_fraction,approx_kl,train_mean_episode_return,episodes_completed,incidents";
}

std::string csv_row(const IterationRow& r) {
    std::ostringstream out;
    out << r.iteration << ',' << r.env_steps << ',' << opt_cell(r.eval_mean_return) << ','
        << opt_cell(r.buffer_min_return) << ',' << opt_cell(r.buffer_mean_return) << ','
        << r.buffer_episodes << ',' << r.buffer_steps << ',' << opt_cell(r.disc_objective) << ','
        << fmt(r.ppo.surrogate_loss) << ',' << fmt(r.ppo.value_loss) << ',' << fmt(r.ppo.entropy)
        << ',' << fmt(r.ppo.clip_fraction) << ',' << fmt(r.ppo.approx_kl) << ','
        << opt_cell(r.train_mean_episode_return) << ',' << r.episodes_completed << ','
        << r.incidents;
    return out.str();
}

RunRecord run_experiment(const ExperimentConfig& config) {
    validate(config);
    const auto started = std::chrono::steady_clock::now();

    fs::create_directories(config.output_dir);
    {
        std::ofstream cfg(fs::path(config.output_dir) / "config_resolved.toml");
        if (!cfg) throw IoError("cannot write config into " + config.output_dir);
        cfg << serialize(config);
    }

    Trainer trainer(config);
    RunRecord record;
    record.config = config;
    record.directory = config.output_dir;

    std::ofstream csv(fs::path(config.output_dir) / "run.csv");
    if (!csv) throw IoError("cannot write run.csv into " + config.output_dir);
    csv << csv_header() << '\n';

    const int iterations = trainer.iterations_total();
    for (int i = 0; i < iterations; ++i) {
        IterationRow row = trainer.run_iteration();
        const bool eval_now = (row.iteration % config.eval_interval == 0) || i + 1 == iterations;
        if (eval_now) row.eval_mean_return = trainer.evaluate();
        csv << csv_row(row) << '\n';
        csv.flush();
        record.rows.push_back(std::move(row));
        if (trainer.incidents() > config.incident_threshold)
            throw NumericError("run aborted: numeric incident threshold exceeded");
    }
    trainer.save_artifacts(config.output_dir);

    record.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    {
        std::ofstream meta(fs::path(config.output_dir) / "meta.txt");
        meta << "config_hash = " << config_hash(config) << "\n";
        meta << "seed = " << config.seed << "\n";
        meta << "wall_clock_seconds = " << fmt(record.wall_clock_seconds) << "\n";
    }
    return record;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

std::optional<double> parse_opt(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    return std::stod(cell);
}

}  // namespace

RunRecord load_run_record(const std::string& dir) {
    RunRecord record;
    record.directory = dir;
    apply_config_file(record.config, (fs::path(dir) / "config_resolved.toml").string());

    std::ifstream csv(fs::path(dir) / "run.csv");
    if (!csv) throw IoError("cannot open run.csv in " + dir);
    std::string line;
    if (!std::getline(csv, line) || line != csv_header())
        throw IoError("unexpected run.csv header in " + dir);
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 16) throw IoError("malformed run.csv row in " + dir);
        IterationRow row;
        row.iteration = std::stoi(cells[0]);
        row.env_steps = std::stoll(cells[1]);
        row.eval_mean_return = parse_opt(cells[2]);
        row.buffer_min_return = parse_opt(cells[3]);
        row.buffer_mean_return = parse_opt(cells[4]);
        row.buffer_episodes = std::stoll(cells[5]);
        row.buffer_steps = std::stoll(cells[6]);
        row.disc_objective = parse_opt(cells[7]);
        row.ppo.surrogate_loss = std::stod(cells[8]);
        row.ppo.value_loss = std::stod(cells[9]);
        row.ppo.entropy = std::stod(cells[10]);
        row.ppo.clip_fraction = std::stod(cells[11]);
        row.ppo.approx_kl = std::stod(cells[12]);
        row.train_mean_episode_return = parse_opt(cells[13]);
        row.episodes_completed = std::stoi(cells[14]);
        row.incidents = std::stoi(cells[15]);
        record.rows.push_back(std::move(row));
    }
    return record;
}

SweepAxis sweep_axis_from_string(const std::string& name) {
    if (name == "buffer_capacity") return SweepAxis::BufferCapacity;
    if (name == "n_disc") return SweepAxis::DiscUpdates;
    if (name == "alpha") return SweepAxis::Alpha;
    if (name == "obs_noise") return SweepAxis::ObsNoise;
    if (name == "delay") return SweepAxis::Delay;
    throw ConfigError("axis: unknown sweep axis '" + name + "'");
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::BufferCapacity: return "buffer_capacity";
        case SweepAxis::DiscUpdates: return "n_disc";
        case SweepAxis::Alpha: return "alpha";
        case SweepAxis::ObsNoise: return "obs_noise";
        case SweepAxis::Delay: return "delay";
    }
    throw ConfigError("axis: invalid value");
}

std::vector<RunRecord> run_sweep(const ExperimentConfig& base, SweepAxis axis,
                                 const std::vector<double>& values,
                                 const std::vector<std::uint64_t>& seeds) {
    if (values.empty()) throw ConfigError("sweep values: must be non-empty");
    const std::vector<std::uint64_t> seed_list = seeds.empty()
                                                     ? std::vector<std::uint64_t>{base.seed}
                                                     : seeds;
    std::vector<RunRecord> records;
    std::ofstream summary;
    fs::create_directories(base.output_dir);
    summary.open(fs::path(base.output_dir) / "summary.csv");
    summary << "axis,value,seed,status,final_eval_return\n";

    for (const double value : values) {
        for (const std::uint64_t seed : seed_list) {
            ExperimentConfig config = base;
            config.seed = seed;
            switch (axis) {
                case SweepAxis::BufferCapacity:
                    config.buffer_capacity_steps = static_cast<std::int64_t>(value);
                    break;
                case SweepAxis::DiscUpdates:
                    config.n_disc_updates = static_cast<int>(value);
                    break;
                case SweepAxis::Alpha:
                    config.alpha = value;
                    break;
                case SweepAxis::ObsNoise:
                    config.obs_noise = value;
                    break;
                case SweepAxis::Delay:
                    config.delay = static_cast<int>(value);
                    break;
            }
            std::ostringstream name;
            name << to_string(axis) << "_" << fmt(value) << "_seed" << seed;
            config.output_dir = (fs::path(base.output_dir) / name.str()).string();
            try {
                RunRecord record = run_experiment(config);
                summary << to_string(axis) << ',' << fmt(value) << ',' << seed << ",ok,"
                        << fmt(record.final_eval_return()) << '\n';
                records.push_back(std::move(record));
            } catch (const Error&) {
                summary << to_string(axis) << ',' << fmt(value) << ',' << seed << ",failed,\n";
            }
            summary.flush();
        }
    }
    return records;
}

}  // namespace gasil
