#include "gasil/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "gasil/errors.hpp"
#include "gasil/gaussian.hpp"
#include "gasil/discriminator.hpp"
#include "gasil/ppo.hpp"

namespace gasil {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Series {
    std::vector<double> x;
    std::vector<double> y;
};

Series eval_series(const RunRecord& record) {
    Series s;
    for (const auto& row : record.rows) {
        if (row.eval_mean_return) {
            s.x.push_back(static_cast<double>(row.env_steps));
            s.y.push_back(*row.eval_mean_return);
        }
    }
    if (s.x.empty()) throw ProtocolError("render_curves: record has no evaluation rows");
    return s;
}

double interpolate(const Series& s, double x) {
    if (x <= s.x.front()) return s.y.front();
    if (x >= s.x.back()) return s.y.back();
    const auto it = std::upper_bound(s.x.begin(), s.x.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - s.x.begin());
    const std::size_t lo = hi - 1;
    const double t = (x - s.x[lo]) / (s.x[hi] - s.x[lo]);
    return s.y[lo] + t * (s.y[hi] - s.y[lo]);
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

void render_curves(const std::vector<RunRecord>& records, const std::string& out_path) {
    if (records.empty()) throw ConfigError("render_curves: no records given");

    // group by agent name, preserving first-seen order
    std::vector<std::string> agents;
    std::map<std::string, std::vector<Series>> grouped;
    for (const auto& record : records) {
        const std::string name = to_string(record.config.agent);
        if (!grouped.count(name)) agents.push_back(name);
        grouped[name].push_back(eval_series(record));
    }

    const std::vector<double>& grid = grouped[agents.front()].front().x;
    struct Band {
        std::vector<double> mean, lo, hi;
    };
    std::map<std::string, Band> bands;
    double ymin = 1e300, ymax = -1e300;
    for (const auto& name : agents) {
        Band band;
        for (double x : grid) {
            double sum = 0.0, lo = 1e300, hi = -1e300;
            for (const auto& s : grouped[name]) {
                const double v = interpolate(s, x);
                sum += v;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            band.mean.push_back(sum / static_cast<double>(grouped[name].size()));
            band.lo.push_back(lo);
            band.hi.push_back(hi);
            ymin = std::min(ymin, lo);
            ymax = std::max(ymax, hi);
        }
        bands[name] = std::move(band);
    }
    if (ymax <= ymin) ymax = ymin + 1.0;
    const double xmin = grid.front(), xmax = std::max(grid.back(), grid.front() + 1.0);

    const double w = 640, h = 480, ml = 70, mr = 20, mt = 20, mb = 50;
    const auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
    const auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    svg << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
        << h - mb << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
        << "\" stroke=\"black\"/>\n";
    // axis labels and extents
    svg << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 12
        << "\" text-anchor=\"middle\" font-size=\"14\">environment steps</text>\n";
    svg << "<text x=\"16\" y=\"" << (mt + h - mb) / 2
        << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 16 "
        << (mt + h - mb) / 2 << ")\">mean eval return</text>\n";
    svg << "<text x=\"" << ml << "\" y=\"" << h - mb + 18 << "\" font-size=\"12\">" << fmt(xmin)
        << "</text>\n";
    svg << "<text x=\"" << w - mr << "\" y=\"" << h - mb + 18
        << "\" text-anchor=\"end\" font-size=\"12\">" << fmt(xmax) << "</text>\n";
    svg << "<text x=\"" << ml - 6 << "\" y=\"" << h - mb << "\" text-anchor=\"end\" font-size=\"12\">"
        << fmt(ymin) << "</text>\n";
    svg << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 10
        << "\" text-anchor=\"end\" font-size=\"12\">" << fmt(ymax) << "</text>\n";

    int color = 0;
    for (const auto& name : agents) {
        const auto& band = bands[name];
        const char* c = kPalette[color % 6];
        if (grouped[name].size() > 1) {
            svg << "<polygon fill=\"" << c << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
            for (std::size_t i = 0; i < grid.size(); ++i)
                svg << fmt(px(grid[i])) << "," << fmt(py(band.hi[i])) << " ";
            for (std::size_t i = grid.size(); i-- > 0;)
                svg << fmt(px(grid[i])) << "," << fmt(py(band.lo[i])) << " ";
            svg << "\"/>\n";
        }
        svg << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < grid.size(); ++i)
            svg << fmt(px(grid[i])) << "," << fmt(py(band.mean[i])) << " ";
        svg << "\"/>\n";
        const double ly = mt + 16 + 18 * color;
        svg << "<line x1=\"" << ml + 10 << "\" y1=\"" << ly << "\" x2=\"" << ml + 34 << "\" y2=\""
            << ly << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << ml + 40 << "\" y=\"" << ly + 4 << "\" font-size=\"13\">" << name
            << "</text>\n";
        ++color;
    }
    svg << "</svg>\n";

    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write plot: " + out_path);
    out << svg.str();
}

namespace {

void draw_arena(std::ostringstream& svg, const PointMassConfig& pm, double ox, double oy,
                double size) {
    const auto px = [&](double x) { return ox + x * size; };
    const auto py = [&](double y) { return oy + (1.0 - y) * size; };
    svg << "<rect x=\"" << ox << "\" y=\"" << oy << "\" width=\"" << size << "\" height=\"" << size
        << "\" fill=\"#fafafa\" stroke=\"black\"/>\n";
    const auto& objects = pm.objects.empty() ? PointMassConfig::default_layout() : pm.objects;
    for (const auto& o : objects) {
        const char* c = o.value >= 10.0 ? "#2ca02c" : (o.value > 0.0 ? "#1f77b4" : "#ff7f0e");
        svg << "<circle cx=\"" << fmt(px(o.x)) << "\" cy=\"" << fmt(py(o.y)) << "\" r=\""
            << fmt(o.radius * size) << "\" fill=\"" << c << "\" fill-opacity=\"0.7\"/>\n";
    }
}

void draw_trajectory(std::ostringstream& svg, const std::vector<std::pair<double, double>>& points,
                     double ox, double oy, double size, const char* color) {
    if (points.empty()) return;
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1\" stroke-opacity=\"0.6\" points=\"";
    for (const auto& [x, y] : points)
        svg << fmt(ox + x * size) << "," << fmt(oy + (1.0 - y) * size) << " ";
    svg << "\"/>\n";
}

}  // namespace

void render_pointmass_snapshot(const std::string& run_dir, int grid_resolution,
                               const std::string& out_path) {
    if (grid_resolution < 2) throw ConfigError("grid_resolution: must be >= 2");

    ExperimentConfig config;
    apply_config_file(config, (fs::path(run_dir) / "config_resolved.toml").string());
    if (config.env != "point_mass")
        throw ConfigError("env: snapshot rendering supports point_mass runs only");

    std::vector<double> log_std;
    MlpNetwork policy_net = load_checkpoint((fs::path(run_dir) / "policy.ckpt").string(), &log_std);
    GaussianPolicy policy(std::move(policy_net), log_std);
    MlpNetwork disc_net =
        load_checkpoint((fs::path(run_dir) / "discriminator.ckpt").string(), nullptr);
    Discriminator disc(std::move(disc_net), policy.obs_dim(), 1.0);
    GoodTrajectoryBuffer buffer = GoodTrajectoryBuffer::load_snapshot(
        (fs::path(run_dir) / "buffer.snapshot").string(),
        static_cast<std::size_t>(config.buffer_capacity_steps), config.gamma);

    const double panel = 440, gap = 30, margin = 30, title_h = 26;
    const double width = 3 * panel + 2 * gap + 2 * margin;
    const double height = panel + 2 * margin + title_h;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

    const char* titles[3] = {"policy trajectories", "buffer trajectories", "discriminator reward"};
    double panel_x[3];
    for (int p = 0; p < 3; ++p) {
        panel_x[p] = margin + p * (panel + gap);
        svg << "<text x=\"" << panel_x[p] + panel / 2 << "\" y=\"" << margin + 14
            << "\" text-anchor=\"middle\" font-size=\"15\">" << titles[p] << "</text>\n";
        draw_arena(svg, config.point_mass, panel_x[p], margin + title_h, panel);
    }
    const double panel_y = margin + title_h;

    // panel 1: fresh rollouts of the checkpointed policy
    {
        auto env = make_env(config, 99);
        Rng rng(config.seed ^ 0xA5A5A5A5ULL);
        for (int e = 0; e < 8; ++e) {
            auto obs = env->reset();
            std::vector<std::pair<double, double>> points{{obs[0], obs[1]}};
            bool done = false;
            while (!done) {
                const auto dist = policy.dist(obs);
                const auto action = dist.sample(rng);
                EnvStep step = env->step(action);
                done = step.done;
                obs = std::move(step.observation);
                points.emplace_back(obs[0], obs[1]);
            }
            draw_trajectory(svg, points, panel_x[0], panel_y, panel, "#1f77b4");
        }
    }

    // panel 2: stored good trajectories (observation prefix is the agent position)
    for (std::size_t e = 0; e < buffer.episode_count(); ++e) {
        std::vector<std::pair<double, double>> points;
        for (const auto& t : buffer.episode(e).transitions())
            points.emplace_back(t.observation[0], t.observation[1]);
        draw_trajectory(svg, points, panel_x[1], panel_y, panel, "#d62728");
    }

    // panel 3: best compass action per cell, opacity proportional to reward
    {
        PointMass2D probe(config.point_mass, 0);
        probe.reset();
        const auto& pm = probe.config();
        struct Arrow {
            double x, y, dx, dy, reward;
        };
        std::vector<Arrow> arrows;
        double max_reward = 0.0;
        for (int gy = 0; gy < grid_resolution; ++gy) {
            for (int gx = 0; gx < grid_resolution; ++gx) {
                const double x = (gx + 0.5) / grid_resolution;
                const double y = (gy + 0.5) / grid_resolution;
                // observation for an agent at (x, y), nothing collected
                std::vector<double> obs{x, y};
                for (const auto& o : pm.objects) {
                    obs.push_back(o.x - x);
                    obs.push_back(o.y - y);
                    obs.push_back(0.0);
                    obs.push_back(o.value / 10.0);
                }
                Arrow best{x, y, 0.0, 0.0, -1.0};
                for (int k = 0; k < 8; ++k) {
                    const double angle = k * std::numbers::pi / 4.0;
                    const double ax = pm.max_speed * std::cos(angle);
                    const double ay = pm.max_speed * std::sin(angle);
                    const double action[2] = {ax, ay};
                    const double r = disc.reward(obs, action);
                    if (r > best.reward) best = {x, y, ax, ay, r};
                }
                max_reward = std::max(max_reward, best.reward);
                arrows.push_back(best);
            }
        }
        const double len = panel / grid_resolution * 0.42;
        for (const auto& a : arrows) {
            const double cx = panel_x[2] + a.x * panel;
            const double cy = panel_y + (1.0 - a.y) * panel;
            const double norm = std::hypot(a.dx, a.dy);
            const double ux = a.dx / norm, uy = a.dy / norm;
            const double opacity = max_reward > 0.0 ? a.reward / max_reward : 0.0;
            svg << "<line x1=\"" << fmt(cx - ux * len) << "\" y1=\"" << fmt(cy + uy * len)
                << "\" x2=\"" << fmt(cx + ux * len) << "\" y2=\"" << fmt(cy - uy * len)
                << "\" stroke=\"#333333\" stroke-opacity=\"" << fmt(opacity)
                << "\" stroke-width=\"1.5\" marker-end=\"url(#ah)\"/>\n";
        }
    }
    // arrowhead marker (referenced above; definition order is fine in SVG)
    svg << "<defs><marker id=\"ah\" markerWidth=\"6\" markerHeight=\"6\" refX=\"5\" refY=\"3\" "
           "orient=\"auto\"><path d=\"M0,0 L6,3 L0,6 z\" fill=\"#333333\"/></marker></defs>\n";
    svg << "</svg>\n";

    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write plot: " + out_path);
    out << svg.str();
}

}  // namespace gasil
