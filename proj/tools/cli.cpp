#include "cli.hpp"

#include <CLI11.hpp>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "saddle/config.hpp"
#include "saddle/experiment.hpp"
#include "saddle/jacobian.hpp"
#include "saddle/parse.hpp"
#include "saddle/problems.hpp"

namespace saddle::cli {

namespace {

std::string format_complex(std::complex<double> z) {
    if (z.imag() == 0.0) return format_double(z.real());
    std::string s = format_double(z.real());
    if (!std::signbit(z.imag())) s += '+';
    return s + format_double(z.imag()) + 'i';
}

std::optional<BlockPartition> partition_from(const std::string& blocks, const ObjectiveProblem& problem) {
    if (blocks.empty()) return std::nullopt;
    return BlockPartition(parse_blocks(blocks), problem.dim());
}

struct LimitFlags {
    TrajectoryLimits limits;
    void attach(CLI::App* cmd) {
        cmd->add_option("--max-iters", limits.max_iters, "Iteration cap")->capture_default_str();
        cmd->add_option("--tol-grad", limits.tol_grad, "Gradient-norm convergence tolerance")->capture_default_str();
        cmd->add_option("--tol-step", limits.tol_step, "Step-norm convergence tolerance")->capture_default_str();
        cmd->add_option("--divergence-radius", limits.divergence_radius)->capture_default_str();
        cmd->add_option("--saddle-match-radius", limits.saddle_match_radius)->capture_default_str();
    }
};

int cmd_classify(const std::string& problem_name, const std::string& point, ClassifyTolerances tol,
                 std::ostream& out) {
    const ProblemPtr problem = fixture_by_name(problem_name);
    const Vector x = parse_vector(point);
    problem->domain().require(x);
    const FixedPointReport rep = fixed_point_report(*problem, x, tol);
    out << "problem: " << problem->name() << '\n'
        << "point: " << format_vector(x) << '\n'
        << "gradient_residual: " << format_double(rep.gradient_residual) << '\n'
        << "hessian_eigenvalues: " << format_vector(rep.hessian_eigenvalues) << '\n'
        << "classification: " << to_string(rep.classification) << '\n';
    return kOk;
}

int cmd_spectrum(const std::string& problem_name, const std::string& method, double alpha, const std::string& point,
                 const std::string& blocks, bool check_fd, std::ostream& out) {
    const ProblemPtr problem = fixture_by_name(problem_name);
    const Method m = parse_method(method);
    const Vector x = parse_vector(point);
    problem->domain().require(x);
    const OptimizerMap map(m, alpha, problem, partition_from(blocks, *problem));
    const MapDifferential dg = analytic_differential(map, x);
    const SpectralReport rep = spectral_report(dg);

    out << "problem: " << problem->name() << '\n'
        << "method: " << to_string(m) << '\n'
        << "alpha: " << format_double(alpha) << '\n'
        << "point: " << format_vector(x) << '\n'
        << "eigenvalues:";
    for (const auto& z : rep.eigenvalues) out << ' ' << format_complex(z);
    out << '\n'
        << "spectral_radius: " << format_double(rep.spectral_radius) << '\n'
        << "det: " << format_double(rep.det) << '\n'
        << "verdict: " << (rep.is_unstable ? "unstable" : "not_unstable") << '\n';
    if (check_fd) {
        const MapDifferential fd = fd_differential(map, x);
        out << "fd_relative_error: " << format_double(relative_frobenius_error(fd.matrix, dg.matrix)) << '\n';
    }
    return kOk;
}

int cmd_trajectory(ExperimentConfig cfg, const std::string& x0_text, const std::string& history_path,
                   std::ostream& out, std::ostream& err) {
    const Vector x0 = parse_vector(x0_text);
    cfg.init.kind = InitDistribution::Kind::Points;
    cfg.init.points = {x0};
    cfg.n_inits = 1;
    std::vector<std::string> warnings;
    const OptimizerMap map = prepare_experiment(cfg, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << '\n';

    std::ostringstream history;
    TrajectoryObserver observer;
    if (!history_path.empty()) {
        history << "iter";
        for (Eigen::Index i = 0; i < x0.size(); ++i) history << ",x_" << i;
        history << ",value,grad_norm\n";
        observer = [&](long long k, const Vector& x) {
            history << k << ',' << format_vector(x) << ',' << format_double(map.problem().value(x)) << ','
                    << format_double(riemannian_gradient(map.problem(), x).norm()) << '\n';
        };
    }
    const TrajectoryRecord rec = run_trajectory(map, x0, cfg.limits, observer);
    if (!history_path.empty()) write_file_atomic(history_path, history.str());

    out << "x0: " << format_vector(rec.x0) << '\n'
        << "x_final: " << format_vector(rec.x_final) << '\n'
        << "iters: " << rec.iters << '\n'
        << "final_grad_norm: " << format_double(rec.final_grad_norm) << '\n'
        << "termination: " << to_string(rec.termination) << '\n'
        << "limit_class: " << to_string(rec.limit_class) << '\n'
        << "matched_cp: " << (rec.matched_critical_point ? std::to_string(*rec.matched_critical_point) : "") << '\n'
        << "distance: " << format_double(rec.distance_to_match) << '\n';
    return kOk;
}

std::optional<unsigned> thread_request(int threads) {
    if (threads < 0) return std::nullopt;
    return static_cast<unsigned>(threads);
}

int cmd_run(const std::string& config_path, bool strict, const std::string& output, int threads, std::ostream& out,
            std::ostream& err) {
    ExperimentConfig cfg = load_config(config_path);
    if (strict) cfg.strict_stepsize = true;
    if (!output.empty()) cfg.output_path = output;
    const ExperimentSummary s = run_experiment(cfg, thread_request(threads));
    for (const auto& w : s.warnings) err << "warning: " << w << '\n';
    out << format_summary(s) << "wall_time_seconds = " << format_double(s.wall_time_seconds) << '\n';
    return kOk;
}

int cmd_sweep(const std::string& config_path, const std::string& alphas_text, bool strict, const std::string& table,
              int threads, std::ostream& out, std::ostream& err) {
    ExperimentConfig cfg = load_config(config_path);
    if (strict) cfg.strict_stepsize = true;
    std::vector<double> alphas;
    if (!trim(alphas_text).empty()) {
        const Vector v = parse_vector(alphas_text);
        alphas.assign(v.data(), v.data() + v.size());
    }
    const auto summaries = sweep_stepsize(cfg, alphas, thread_request(threads));
    for (std::size_t i = 0; i < summaries.size(); ++i)
        for (const auto& w : summaries[i].warnings) err << "warning (alpha " << i << "): " << w << '\n';
    const std::string text = format_sweep_table(summaries);
    if (!table.empty()) write_file_atomic(table, text);
    out << text;
    return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Saddle-point dynamics of first-order methods", "saddle-dynamics"};
    app.require_subcommand(1);

    std::string problem = "nesterov", point, method = "gd", blocks, x0, history, config_path, alphas, output;
    double alpha = 0.1;
    bool check_fd = false, strict = false;
    int threads = -1;
    ClassifyTolerances tol;
    LimitFlags limit_flags;

    auto* classify = app.add_subcommand("classify", "Classify a candidate critical point");
    classify->add_option("--problem", problem, "Fixture name")->required();
    classify->add_option("--point", point, "Comma-separated coordinates")->required();
    classify->add_option("--tol-grad", tol.tol_grad)->capture_default_str();
    classify->add_option("--tol-eig", tol.tol_eig)->capture_default_str();

    auto* spectrum = app.add_subcommand("spectrum", "Spectrum of the map differential at a point");
    spectrum->add_option("--problem", problem)->required();
    spectrum->add_option("--method", method)->required();
    spectrum->add_option("--alpha", alpha)->required();
    spectrum->add_option("--point", point)->required();
    spectrum->add_option("--blocks", blocks, "BCD partition, e.g. 0,1;2,3");
    spectrum->add_flag("--check-fd", check_fd, "Also report the finite-difference cross-check error");

    auto* trajectory = app.add_subcommand("trajectory", "Iterate one trajectory");
    trajectory->add_option("--problem", problem)->required();
    trajectory->add_option("--method", method)->required();
    trajectory->add_option("--alpha", alpha)->required();
    trajectory->add_option("--x0", x0)->required();
    trajectory->add_option("--blocks", blocks);
    trajectory->add_option("--history", history, "CSV file for every iterate");
    trajectory->add_flag("--strict-stepsize", strict);
    limit_flags.attach(trajectory);

    auto* run = app.add_subcommand("run", "Run an experiment from a config file");
    run->add_option("--config", config_path)->required();
    run->add_option("--output", output, "Override the CSV path");
    run->add_option("--threads", threads, "Worker count (0 = auto)");
    run->add_flag("--strict-stepsize", strict);

    auto* sweep = app.add_subcommand("sweep", "Run an experiment per step size");
    sweep->add_option("--config", config_path)->required();
    sweep->add_option("--alphas", alphas, "Comma-separated step sizes")->required();
    sweep->add_option("--output", output, "Write the table to this file");
    sweep->add_option("--threads", threads, "Worker count (0 = auto)");
    sweep->add_flag("--strict-stepsize", strict);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    try {
        if (*classify) return cmd_classify(problem, point, tol, out);
        if (*spectrum) return cmd_spectrum(problem, method, alpha, point, blocks, check_fd, out);
        if (*trajectory) {
            ExperimentConfig cfg;
            cfg.problem = problem;
            cfg.method = parse_method(method);
            cfg.alpha = alpha;
            if (!blocks.empty()) cfg.blocks = parse_blocks(blocks);
            cfg.limits = limit_flags.limits;
            cfg.strict_stepsize = strict;
            return cmd_trajectory(cfg, x0, history, out, err);
        }
        if (*run) return cmd_run(config_path, strict, output, threads, out, err);
        if (*sweep) return cmd_sweep(config_path, alphas, strict, output, threads, out, err);
    } catch (const NotAFixedPoint& e) {
        err << "error: " << e.what() << '\n';
        return kNotFixedPoint;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainViolation& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const RepeatedEigenvalues& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const RowSumMismatch& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}

}  // namespace saddle::cli
