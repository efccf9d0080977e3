#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "saddle/optimizer_maps.hpp"

namespace saddle {

enum class Termination { Converged, Diverged, MaxIters, Boundary };
enum class LimitClass { LocalMin, StrictSaddle, UnmatchedCritical, None };

inline constexpr std::array kTerminations = {Termination::Converged, Termination::Diverged, Termination::MaxIters,
                                             Termination::Boundary};
inline constexpr std::array kLimitClasses = {LimitClass::LocalMin, LimitClass::StrictSaddle,
                                             LimitClass::UnmatchedCritical, LimitClass::None};

std::string to_string(Termination t);
std::string to_string(LimitClass c);

struct InitDistribution {
    /// Auto picks the canonical distribution for the domain: a box for
    /// Euclidean problems, uniform on the sphere, Dirichlet(1) on the simplex.
    enum class Kind { Auto, UniformBox, UniformSphere, DirichletUniform, Points };
    Kind kind = Kind::Auto;
    /// Per-coordinate bounds; a single entry broadcasts to every coordinate.
    Vector lo = Vector::Constant(1, -1.0);
    Vector hi = Vector::Constant(1, 1.0);
    /// Explicit initializations, used in order and cycled by run index.
    std::vector<Vector> points;
};

std::string to_string(InitDistribution::Kind k);

struct TrajectoryLimits {
    long long max_iters = 100000;
    double tol_grad = 1e-9;
    double tol_step = 1e-12;
    double divergence_radius = 1e6;
    double saddle_match_radius = 1e-4;
};

struct ExperimentConfig {
    std::string problem = "nesterov";
    Method method = Method::GradientDescent;
    double alpha = 0.1;
    /// Block partition for BCD, as index lists.
    std::vector<std::vector<int>> blocks;
    int n_inits = 1000;
    InitDistribution init;
    TrajectoryLimits limits;
    std::uint64_t master_seed = 0;
    /// CSV destination; empty means nothing is written.
    std::string output_path;
    /// Summary destination; defaults to output_path + ".summary".
    std::string summary_path;
    /// Inadmissible step sizes are an error instead of a warning.
    bool strict_stepsize = false;
};

struct TrajectoryRecord {
    int run_index = 0;
    std::uint64_t seed = 0;
    Vector x0;
    Vector x_final;
    long long iters = 0;
    double final_grad_norm = 0.0;
    Termination termination = Termination::MaxIters;
    LimitClass limit_class = LimitClass::None;
    std::optional<int> matched_critical_point;
    /// Distance from x_final to the nearest registered critical point
    /// (infinity when the problem registers none).
    double distance_to_match = 0.0;
};

struct ExperimentSummary {
    ExperimentConfig config;
    std::array<int, 4> limit_counts{};        // indexed like kLimitClasses
    std::array<int, 4> termination_counts{};  // indexed like kTerminations
    double saddle_fraction = 0.0;
    double wall_time_seconds = 0.0;
    std::vector<std::string> warnings;

    int count(LimitClass c) const { return limit_counts[static_cast<std::size_t>(c)]; }
    int count(Termination t) const { return termination_counts[static_cast<std::size_t>(t)]; }
};

struct ExperimentRun {
    std::vector<TrajectoryRecord> records;
    ExperimentSummary summary;
};

/// Called with (iteration, iterate) for x0 and every accepted iterate.
using TrajectoryObserver = std::function<void(long long, const Vector&)>;

/// Iterates x_{k+1} = g(x_k) from x0. Termination is checked in this order:
/// non-finite / outside the divergence radius / outside the problem's trust
/// region (diverged); simplex underflow (boundary); Riemannian gradient
/// below tol_grad (converged); last step below tol_step (converged, or
/// boundary on the simplex when the gradient is not small); iteration cap.
/// Numerical failures inside the map also end the run as diverged.
TrajectoryRecord run_trajectory(const OptimizerMap& map, const Vector& x0, const TrajectoryLimits& limits,
                                const TrajectoryObserver& observer = {});

/// Classify an end point against the registered critical points.
void classify_limit(const ObjectiveProblem& problem, const TrajectoryLimits& limits, TrajectoryRecord& record);

/// Initialization for one run, drawn from its own derived seed.
Vector sample_initialization(const InitDistribution& init, const DomainDescriptor& domain, int run_index,
                             std::uint64_t seed);

/// Resolves the fixture and builds the map; checks the config against the
/// problem. Step-size warnings are appended to `warnings` (or become a
/// ConfigError under strict_stepsize). Throws ConfigError.
OptimizerMap prepare_experiment(const ExperimentConfig& config, std::vector<std::string>* warnings = nullptr);

/// Worker count: explicit request if given, else SADDLE_DYNAMICS_THREADS,
/// 0 meaning hardware concurrency.
unsigned resolve_thread_count(std::optional<unsigned> requested = std::nullopt);

/// Runs every trajectory without touching the filesystem. Output does not
/// depend on the thread count.
ExperimentRun run_trajectories(const ExperimentConfig& config, std::optional<unsigned> threads = std::nullopt);

/// run_trajectories plus the CSV and summary files when output_path is set.
/// Files are written to a temporary name and renamed on success.
ExperimentSummary run_experiment(const ExperimentConfig& config, std::optional<unsigned> threads = std::nullopt);

/// One experiment per alpha, with master seeds derived from (master_seed,
/// alpha index) and CSVs at <stem>.alpha<i><ext> when output_path is set.
std::vector<ExperimentSummary> sweep_stepsize(const ExperimentConfig& config, const std::vector<double>& alphas,
                                              std::optional<unsigned> threads = std::nullopt);

ExperimentSummary summarize(const ExperimentConfig& config, const std::vector<TrajectoryRecord>& records);

std::string format_csv(const std::vector<TrajectoryRecord>& records, int dim);
/// key = value text: the config echo followed by the counts. Wall time is
/// left out so reruns produce identical files.
std::string format_summary(const ExperimentSummary& summary);
/// Plot-ready table, one row per alpha.
std::string format_sweep_table(const std::vector<ExperimentSummary>& summaries);

/// Writes to <path>.tmp then renames. Throws IoError.
void write_file_atomic(const std::string& path, const std::string& content);

std::string sweep_output_path(const std::string& path, std::size_t index);

}  // namespace saddle
