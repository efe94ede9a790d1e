#pragma once

#include <string>
#include <vector>

#include "gasil/experiment.hpp"

namespace gasil {

// Learning-curve SVG: one mean curve per agent with a min-max band across
// seeds, x = env steps, y = mean eval return. Records are interpolated onto
// the first record's evaluation grid when the grids differ. Output is
// byte-stable for fixed input.
void render_curves(const std::vector<RunRecord>& records, const std::string& out_path);

// Three-panel point-mass SVG from a finished run directory: policy rollouts,
// buffer trajectories, and a discriminator-reward arrow field (best of 8
// compass actions per grid cell, opacity proportional to the reward).
void render_pointmass_snapshot(const std::string& run_dir, int grid_resolution,
                               const std::string& out_path);

}  // namespace gasil
