#pragma once

#include <string>
#include <string_view>

#include "saddle/experiment.hpp"

namespace saddle {

// Experiment config files are flat `key = value` lines. Blank lines and
// everything after `#` are ignored; keys may appear once.
//
//   problem             fixture name (see fixture_by_name)
//   method              gd | prox | cd | bcd | manifold-gd | mw | mirror-euclidean
//   alpha               step size > 0
//   blocks              BCD partition, e.g. 0,1;2,3
//   n_inits             number of trajectories (defaults to the number of
//                       points for init = points, else 1000)
//   init                auto | box | sphere | dirichlet | points
//   box_lo, box_hi      scalar or comma list per coordinate
//   points              explicit initializations, e.g. 0.2,0;-0.2,0
//   max_iters, tol_grad, tol_step, divergence_radius, saddle_match_radius
//   master_seed         unsigned 64-bit integer
//   output              CSV path
//   summary             summary path (default <output>.summary)
//   strict_stepsize     true | false

ExperimentConfig parse_config(std::string_view text);
/// Throws IoError if the file cannot be read, ConfigError if it does not parse.
ExperimentConfig load_config(const std::string& path);
/// Inverse of parse_config (round-trips every field).
std::string config_to_text(const ExperimentConfig& config);

InitDistribution::Kind parse_init_kind(std::string_view s);

}  // namespace saddle
