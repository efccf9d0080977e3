#include "saddle/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "saddle/config.hpp"
#include "saddle/parse.hpp"
#include "saddle/problems.hpp"
#include "saddle/seeding.hpp"

namespace saddle {

std::string to_string(Termination t) {
    switch (t) {
        case Termination::Converged: return "converged";
        case Termination::Diverged: return "diverged";
        case Termination::MaxIters: return "max_iters";
        case Termination::Boundary: return "boundary";
    }
    return "?";
}

std::string to_string(LimitClass c) {
    switch (c) {
        case LimitClass::LocalMin: return "local_min";
        case LimitClass::StrictSaddle: return "strict_saddle";
        case LimitClass::UnmatchedCritical: return "unmatched_critical";
        case LimitClass::None: return "none";
    }
    return "?";
}

std::string to_string(InitDistribution::Kind k) {
    switch (k) {
        case InitDistribution::Kind::Auto: return "auto";
        case InitDistribution::Kind::UniformBox: return "box";
        case InitDistribution::Kind::UniformSphere: return "sphere";
        case InitDistribution::Kind::DirichletUniform: return "dirichlet";
        case InitDistribution::Kind::Points: return "points";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Single trajectories

namespace {

bool escaped(const ObjectiveProblem& problem, const TrajectoryLimits& limits, const Vector& x) {
    if (!x.allFinite()) return true;
    if (x.norm() > limits.divergence_radius) return true;
    return problem.region() && !problem.region()->contains(x);
}

}  // namespace

TrajectoryRecord run_trajectory(const OptimizerMap& map, const Vector& x0, const TrajectoryLimits& limits,
                                const TrajectoryObserver& observer) {
    const ObjectiveProblem& problem = map.problem();
    problem.domain().require(x0);
    const bool on_simplex = problem.domain().kind() == DomainKind::SimplexInterior;

    TrajectoryRecord rec;
    rec.x0 = x0;
    Vector x = x0;
    if (observer) observer(0, x);

    auto finish = [&](Termination t, long long iters) {
        rec.termination = t;
        rec.iters = iters;
        rec.x_final = x;
        rec.final_grad_norm = x.allFinite() ? riemannian_gradient(problem, x).norm()
                                            : std::numeric_limits<double>::infinity();
        classify_limit(problem, limits, rec);
        return rec;
    };

    double grad = riemannian_gradient(problem, x).norm();
    if (grad <= limits.tol_grad) return finish(Termination::Converged, 0);

    for (long long k = 1; k <= limits.max_iters; ++k) {
        Vector next;
        try {
            next = map(x);
        } catch (const NonFiniteIterate&) {
            return finish(Termination::Diverged, k - 1);
        } catch (const InnerSolveFailure&) {
            return finish(Termination::Diverged, k - 1);
        } catch (const ZeroProjection&) {
            return finish(Termination::Diverged, k - 1);
        } catch (const SingularMatrix&) {
            return finish(Termination::Diverged, k - 1);
        }
        const double step = (next - x).norm();
        x = std::move(next);
        if (observer) observer(k, x);

        if (escaped(problem, limits, x)) return finish(Termination::Diverged, k);
        if (on_simplex && x.minCoeff() < kSimplexUnderflow) return finish(Termination::Boundary, k);
        grad = riemannian_gradient(problem, x).norm();
        if (grad <= limits.tol_grad) return finish(Termination::Converged, k);
        if (step <= limits.tol_step) {
            // On the simplex a stalled iterate with a large gradient is
            // sliding into a face rather than sitting at a critical point.
            const bool stalled_at_face = on_simplex && grad > std::sqrt(limits.tol_grad);
            return finish(stalled_at_face ? Termination::Boundary : Termination::Converged, k);
        }
    }
    return finish(Termination::MaxIters, limits.max_iters);
}

void classify_limit(const ObjectiveProblem& problem, const TrajectoryLimits& limits, TrajectoryRecord& record) {
    record.limit_class = LimitClass::None;
    record.matched_critical_point.reset();
    record.distance_to_match = std::numeric_limits<double>::infinity();

    int nearest = -1;
    if (record.x_final.allFinite()) {
        const auto& cps = problem.known_critical_points();
        for (std::size_t i = 0; i < cps.size(); ++i) {
            const double d = (record.x_final - cps[i].point).norm();
            if (d < record.distance_to_match) {
                record.distance_to_match = d;
                nearest = static_cast<int>(i);
            }
        }
    }
    if (record.termination != Termination::Converged) return;
    if (nearest >= 0 && record.distance_to_match <= limits.saddle_match_radius) {
        record.matched_critical_point = nearest;
        const auto label = problem.known_critical_points()[static_cast<std::size_t>(nearest)].label;
        record.limit_class = label == CriticalLabel::StrictSaddle ? LimitClass::StrictSaddle : LimitClass::LocalMin;
    } else {
        record.limit_class = LimitClass::UnmatchedCritical;
    }
}

// ---------------------------------------------------------------------------
// Initializations

namespace {

InitDistribution::Kind resolve_kind(InitDistribution::Kind kind, DomainKind domain) {
    if (kind != InitDistribution::Kind::Auto) return kind;
    switch (domain) {
        case DomainKind::Euclidean: return InitDistribution::Kind::UniformBox;
        case DomainKind::UnitSphere: return InitDistribution::Kind::UniformSphere;
        case DomainKind::SimplexInterior: return InitDistribution::Kind::DirichletUniform;
    }
    return kind;
}

double bound_at(const Vector& b, Eigen::Index i) { return b.size() == 1 ? b[0] : b[i]; }

void check_init(const InitDistribution& init, const DomainDescriptor& domain) {
    const int d = domain.ambient_dim();
    const auto kind = resolve_kind(init.kind, domain.kind());
    const std::string where = " for the " + domain.describe() + " domain";
    switch (kind) {
        case InitDistribution::Kind::UniformBox:
            if (domain.kind() != DomainKind::Euclidean) throw ConfigError("box initialization is not valid" + where);
            for (const Vector* b : {&init.lo, &init.hi})
                if (b->size() != 1 && b->size() != d)
                    throw ConfigError("box bounds need 1 or " + std::to_string(d) + " entries");
            for (Eigen::Index i = 0; i < d; ++i) {
                const double lo = bound_at(init.lo, i), hi = bound_at(init.hi, i);
                if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
                    throw ConfigError("box bounds must be finite with box_lo < box_hi");
            }
            break;
        case InitDistribution::Kind::UniformSphere:
            if (domain.kind() != DomainKind::UnitSphere) throw ConfigError("sphere initialization is not valid" + where);
            break;
        case InitDistribution::Kind::DirichletUniform:
            if (domain.kind() != DomainKind::SimplexInterior)
                throw ConfigError("dirichlet initialization is not valid" + where);
            break;
        case InitDistribution::Kind::Points:
            if (init.points.empty()) throw ConfigError("init = points needs at least one point");
            for (const auto& p : init.points) {
                if (p.size() != d)
                    throw ConfigError("initial point has dimension " + std::to_string(p.size()) + ", expected " +
                                      std::to_string(d));
                if (!domain.contains(p)) throw ConfigError("initial point " + format_vector(p) + " is outside" + where);
            }
            break;
        case InitDistribution::Kind::Auto: break;
    }
}

}  // namespace

Vector sample_initialization(const InitDistribution& init, const DomainDescriptor& domain, int run_index,
                             std::uint64_t seed) {
    const int d = domain.ambient_dim();
    Engine eng(seed);
    Vector x(d);
    switch (resolve_kind(init.kind, domain.kind())) {
        case InitDistribution::Kind::UniformBox:
            for (int i = 0; i < d; ++i) x[i] = uniform(eng, bound_at(init.lo, i), bound_at(init.hi, i));
            break;
        case InitDistribution::Kind::UniformSphere: {
            double n = 0.0;
            do {
                for (int i = 0; i < d; ++i) x[i] = standard_normal(eng);
                n = x.norm();
            } while (n < 1e-12);
            x /= n;
            break;
        }
        case InitDistribution::Kind::DirichletUniform:
            for (int i = 0; i < d; ++i) x[i] = standard_exponential(eng);
            x /= x.sum();
            break;
        case InitDistribution::Kind::Points:
            x = init.points[static_cast<std::size_t>(run_index) % init.points.size()];
            break;
        case InitDistribution::Kind::Auto: break;
    }
    return x;
}

// ---------------------------------------------------------------------------
// Experiments

OptimizerMap prepare_experiment(const ExperimentConfig& config, std::vector<std::string>* warnings) {
    const auto& lim = config.limits;
    if (config.n_inits < 1) throw ConfigError("n_inits must be at least 1");
    if (lim.max_iters < 1) throw ConfigError("max_iters must be at least 1");
    if (!(lim.tol_grad > 0) || !(lim.tol_step > 0) || !(lim.saddle_match_radius > 0))
        throw ConfigError("tol_grad, tol_step and saddle_match_radius must be positive");
    if (!(lim.divergence_radius > lim.saddle_match_radius))
        throw ConfigError("divergence_radius must exceed saddle_match_radius");
    if (!std::isfinite(config.alpha) || !(config.alpha > 0))
        throw ConfigError("alpha must be a positive finite number, got " + format_double(config.alpha));

    ProblemPtr problem = fixture_by_name(config.problem);
    check_init(config.init, problem->domain());

    std::optional<BlockPartition> partition;
    std::vector<std::string> notes;
    if (config.method == Method::BlockCoordinateDescent) {
        if (config.blocks.empty()) throw ConfigError("method bcd needs a 'blocks' partition");
        try {
            partition = BlockPartition(config.blocks, problem->dim());
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
    } else if (!config.blocks.empty()) {
        notes.push_back("blocks are ignored by method " + to_string(config.method));
    }

    std::optional<OptimizerMap> map;
    try {
        map.emplace(config.method, config.alpha, problem, partition);
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }

    const StepSizeBound bound = map->step_size_bound();
    switch (bound.validate(config.alpha)) {
        case StepSizeVerdict::Admissible: break;
        case StepSizeVerdict::Inadmissible: {
            const std::string msg = "alpha = " + format_double(config.alpha) + " is not below the step-size bound " +
                                    format_double(*bound.bound) + " (" + bound.description + ")";
            if (config.strict_stepsize) throw ConfigError(msg);
            notes.push_back(msg);
            break;
        }
        case StepSizeVerdict::Unknown:
            notes.push_back("no computable step-size bound for " + to_string(config.method) + " (" +
                            bound.description + ")");
            break;
    }
    if (warnings) warnings->insert(warnings->end(), notes.begin(), notes.end());
    return *map;
}

unsigned resolve_thread_count(std::optional<unsigned> requested) {
    unsigned n = 0;
    if (requested) {
        n = *requested;
    } else if (const char* env = std::getenv("SADDLE_DYNAMICS_THREADS"); env && *env) {
        const long long v = parse_int(env);
        if (v < 0) throw ConfigError("SADDLE_DYNAMICS_THREADS must be non-negative");
        n = static_cast<unsigned>(v);
    }
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

ExperimentRun run_trajectories(const ExperimentConfig& config, std::optional<unsigned> threads) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::string> warnings;
    const OptimizerMap map = prepare_experiment(config, &warnings);
    const int n = config.n_inits;

    std::vector<TrajectoryRecord> records(static_cast<std::size_t>(n));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            const auto slot = static_cast<std::size_t>(i);
            try {
                const std::uint64_t seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(i));
                const Vector x0 = sample_initialization(config.init, map.problem().domain(), i, seed);
                records[slot] = run_trajectory(map, x0, config.limits);
                records[slot].run_index = i;
                records[slot].seed = seed;
            } catch (...) {
                errors[slot] = std::current_exception();
            }
        }
    };

    const unsigned workers = std::min<unsigned>(resolve_thread_count(threads), static_cast<unsigned>(n));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    ExperimentRun run;
    run.summary = summarize(config, records);
    run.summary.warnings = std::move(warnings);
    run.summary.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    run.records = std::move(records);
    return run;
}

ExperimentSummary summarize(const ExperimentConfig& config, const std::vector<TrajectoryRecord>& records) {
    ExperimentSummary s;
    s.config = config;
    for (const auto& r : records) {
        ++s.limit_counts[static_cast<std::size_t>(r.limit_class)];
        ++s.termination_counts[static_cast<std::size_t>(r.termination)];
    }
    s.saddle_fraction =
        records.empty() ? 0.0 : static_cast<double>(s.count(LimitClass::StrictSaddle)) / static_cast<double>(records.size());
    return s;
}

namespace {

std::string summary_destination(const ExperimentConfig& config) {
    if (!config.summary_path.empty()) return config.summary_path;
    if (!config.output_path.empty()) return config.output_path + ".summary";
    return {};
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& config, std::optional<unsigned> threads) {
    ExperimentRun run = run_trajectories(config, threads);
    if (!config.output_path.empty()) {
        const int dim = run.records.empty() ? 0 : static_cast<int>(run.records.front().x0.size());
        write_file_atomic(config.output_path, format_csv(run.records, dim));
    }
    if (const std::string dest = summary_destination(config); !dest.empty())
        write_file_atomic(dest, format_summary(run.summary));
    return run.summary;
}

std::vector<ExperimentSummary> sweep_stepsize(const ExperimentConfig& config, const std::vector<double>& alphas,
                                              std::optional<unsigned> threads) {
    for (double a : alphas)
        if (!std::isfinite(a) || !(a > 0)) throw ConfigError("every alpha must be positive, got " + format_double(a));
    std::vector<ExperimentSummary> out;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        // A repeated alpha reuses the seed of its first occurrence.
        std::size_t seed_index = i;
        for (std::size_t j = 0; j < i; ++j)
            if (alphas[j] == alphas[i]) {
                seed_index = j;
                break;
            }
        ExperimentConfig c = config;
        c.alpha = alphas[i];
        c.master_seed = derive_seed(config.master_seed, seed_index);
        if (!config.output_path.empty()) c.output_path = sweep_output_path(config.output_path, i);
        if (!config.summary_path.empty()) c.summary_path = sweep_output_path(config.summary_path, i);
        out.push_back(run_experiment(c, threads));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Output

std::string format_csv(const std::vector<TrajectoryRecord>& records, int dim) {
    std::ostringstream os;
    os << "run_index,seed";
    for (int i = 0; i < dim; ++i) os << ",x0_" << i;
    for (int i = 0; i < dim; ++i) os << ",xf_" << i;
    os << ",iters,final_grad_norm,termination,limit_class,matched_cp,distance\n";
    for (const auto& r : records) {
        os << r.run_index << ',' << r.seed;
        for (int i = 0; i < dim; ++i) os << ',' << format_double(r.x0[i]);
        for (int i = 0; i < dim; ++i) os << ',' << format_double(r.x_final[i]);
        os << ',' << r.iters << ',' << format_double(r.final_grad_norm) << ',' << to_string(r.termination) << ','
           << to_string(r.limit_class) << ',';
        if (r.matched_critical_point) os << *r.matched_critical_point;
        os << ',' << format_double(r.distance_to_match) << '\n';
    }
    return os.str();
}

std::string format_summary(const ExperimentSummary& s) {
    std::ostringstream os;
    os << "# config\n" << config_to_text(s.config) << "# results\n";
    int total = 0;
    for (auto c : kLimitClasses) {
        os << "limit_" << to_string(c) << " = " << s.count(c) << '\n';
        total += s.count(c);
    }
    for (auto t : kTerminations) os << "termination_" << to_string(t) << " = " << s.count(t) << '\n';
    os << "runs = " << total << '\n';
    os << "saddle_fraction = " << format_double(s.saddle_fraction) << '\n';
    for (std::size_t i = 0; i < s.warnings.size(); ++i) os << "warning_" << i << " = " << s.warnings[i] << '\n';
    return os.str();
}

std::string format_sweep_table(const std::vector<ExperimentSummary>& summaries) {
    std::ostringstream os;
    os << "alpha,saddle_fraction";
    for (auto c : kLimitClasses) os << ',' << to_string(c);
    for (auto t : kTerminations) os << ',' << to_string(t);
    os << '\n';
    for (const auto& s : summaries) {
        os << format_double(s.config.alpha) << ',' << format_double(s.saddle_fraction);
        for (auto c : kLimitClasses) os << ',' << s.count(c);
        for (auto t : kTerminations) os << ',' << s.count(t);
        os << '\n';
    }
    return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp + "' for writing");
        out << content;
        out.flush();
        if (!out) {
            out.close();
            std::remove(tmp.c_str());
            throw IoError("failed writing '" + tmp + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::remove(tmp.c_str());
        throw IoError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
    }
}

std::string sweep_output_path(const std::string& path, std::size_t index) {
    const std::filesystem::path p(path);
    const std::string tag = ".alpha" + std::to_string(index);
    if (!p.has_extension()) return path + tag;
    return (p.parent_path() / (p.stem().string() + tag + p.extension().string())).string();
}

}  // namespace saddle
