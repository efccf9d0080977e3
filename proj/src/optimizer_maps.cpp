#include "saddle/optimizer_maps.hpp"

#include <cmath>
#include <sstream>

namespace saddle {

namespace {

Vector checked(Vector v, const char* what) {
    if (!v.allFinite()) throw NonFiniteIterate(std::string(what) + " produced a non-finite iterate");
    return v;
}

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::GradientDescent: return "gd";
        case Method::ProximalPoint: return "prox";
        case Method::CoordinateDescent: return "cd";
        case Method::BlockCoordinateDescent: return "bcd";
        case Method::ManifoldGradientDescent: return "manifold-gd";
        case Method::MirrorDescentEntropy: return "mw";
        case Method::MirrorDescentEuclidean: return "mirror-euclidean";
    }
    return "?";
}

Method parse_method(const std::string& name) {
    if (name == "gd") return Method::GradientDescent;
    if (name == "prox") return Method::ProximalPoint;
    if (name == "cd") return Method::CoordinateDescent;
    if (name == "bcd") return Method::BlockCoordinateDescent;
    if (name == "manifold-gd") return Method::ManifoldGradientDescent;
    if (name == "mw" || name == "mirror-entropy") return Method::MirrorDescentEntropy;
    if (name == "mirror-euclidean") return Method::MirrorDescentEuclidean;
    throw ConfigError("unknown method '" + name +
                      "' (expected gd, prox, cd, bcd, manifold-gd, mw, mirror-entropy, mirror-euclidean)");
}

DomainKind required_domain(Method m) {
    switch (m) {
        case Method::ManifoldGradientDescent: return DomainKind::UnitSphere;
        case Method::MirrorDescentEntropy: return DomainKind::SimplexInterior;
        default: return DomainKind::Euclidean;
    }
}

// ---------------------------------------------------------------------------

Vector gd_step(const ObjectiveProblem& problem, double alpha, const Vector& x) {
    return checked(x - alpha * problem.gradient(x), "gradient descent");
}

double prox_residual(const ObjectiveProblem& problem, double alpha, const Vector& x, const Vector& z) {
    return (z + alpha * problem.gradient(z) - x).norm();
}

Vector prox_step(const ObjectiveProblem& problem, double alpha, const Vector& x, ProxOptions opts) {
    const Eigen::Index n = x.size();
    auto residual = [&](const Vector& z) -> Vector { return z + alpha * problem.gradient(z) - x; };
    auto newton_direction = [&](const Vector& z, const Vector& r) -> Vector {
        const Matrix jac = Matrix::Identity(n, n) + alpha * problem.hessian(z);
        Eigen::PartialPivLU<Matrix> lu(jac);
        Vector dz = -lu.solve(r);
        if (!dz.allFinite()) throw InnerSolveFailure("proximal Newton system is singular");
        return dz;
    };

    Vector z = x;
    Vector r = residual(z);
    double rn = r.norm();
    int iters = 0;
    while (!(rn <= opts.residual_tol)) {
        if (!std::isfinite(rn)) throw NonFiniteIterate("proximal subproblem residual is not finite");
        if (iters == opts.max_iters) {
            std::ostringstream os;
            os << "proximal subproblem did not reach residual " << opts.residual_tol << " within " << opts.max_iters
               << " Newton iterations (residual " << rn << ")";
            throw InnerSolveFailure(os.str());
        }
        const Vector dz = newton_direction(z, r);
        // Backtracking on the residual norm; the Newton direction is a
        // descent direction for |r|^2 whenever the Jacobian is nonsingular.
        double t = 1.0;
        bool accepted = false;
        while (t >= 1e-12) {
            Vector zt = z + t * dz;
            Vector rt = residual(zt);
            const double rtn = rt.norm();
            if (std::isfinite(rtn) && rtn <= (1.0 - 1e-4 * t) * rn) {
                z = std::move(zt);
                r = std::move(rt);
                rn = rtn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) throw InnerSolveFailure("proximal Newton line search stalled");
        ++iters;
    }
    for (int polish = 0; polish < 3 && rn > 0.0; ++polish) {
        Vector zt = z + newton_direction(z, r);
        Vector rt = residual(zt);
        const double rtn = rt.norm();
        if (!(rtn < rn)) break;
        z = std::move(zt);
        r = std::move(rt);
        rn = rtn;
    }
    return checked(std::move(z), "proximal point");
}

SweepTrace cd_sweep_traced(const ObjectiveProblem& problem, double alpha, const Vector& x) {
    SweepTrace trace;
    trace.intermediates.reserve(x.size());
    Vector y = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        trace.intermediates.push_back(y);
        const Vector g = problem.gradient(y);
        y[i] = y[i] - alpha * g[i];
    }
    trace.result = checked(std::move(y), "coordinate descent");
    return trace;
}

Vector cd_sweep(const ObjectiveProblem& problem, double alpha, const Vector& x) {
    Vector y = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const Vector g = problem.gradient(y);
        y[i] = y[i] - alpha * g[i];
    }
    return checked(std::move(y), "coordinate descent");
}

SweepTrace bcd_sweep_traced(const ObjectiveProblem& problem, double alpha, const Vector& x,
                            const BlockPartition& partition) {
    if (partition.dim() != x.size()) throw InvalidArgument("block partition dimension does not match the point");
    SweepTrace trace;
    trace.intermediates.reserve(partition.size());
    Vector y = x;
    for (const auto& block : partition.blocks()) {
        trace.intermediates.push_back(y);
        const Vector g = problem.gradient(y);
        for (int j : block) y[j] = y[j] - alpha * g[j];
    }
    trace.result = checked(std::move(y), "block coordinate descent");
    return trace;
}

Vector bcd_sweep(const ObjectiveProblem& problem, double alpha, const Vector& x, const BlockPartition& partition) {
    return bcd_sweep_traced(problem, alpha, x, partition).result;
}

Vector manifold_gd_step(const ObjectiveProblem& problem, double alpha, const Vector& x) {
    const Vector rg = riemannian_gradient(problem, x);
    Vector v = x - alpha * rg;
    const double nv = v.norm();
    if (!std::isfinite(nv)) throw NonFiniteIterate("manifold gradient descent produced a non-finite iterate");
    if (nv < 1e-14) throw ZeroProjection("cannot retract a near-zero vector onto the sphere");
    return checked(v / nv, "manifold gradient descent");
}

Vector mirror_descent_entropy_step(const ObjectiveProblem& problem, double alpha, const Vector& x) {
    problem.domain().require(x);
    const Vector g = problem.gradient(x);
    const Eigen::ArrayXd logits = x.array().log() - alpha * g.array();
    if (!logits.allFinite()) throw NonFiniteIterate("multiplicative weights produced non-finite log weights");
    const Eigen::ArrayXd w = (logits - logits.maxCoeff()).exp();
    return checked((w / w.sum()).matrix(), "multiplicative weights");
}

Vector mirror_descent_euclidean_step(const ObjectiveProblem& problem, double alpha, const Vector& x) {
    return checked(x - alpha * problem.gradient(x), "mirror descent");
}

// ---------------------------------------------------------------------------

StepSizeVerdict StepSizeBound::validate(double alpha) const {
    if (!bound) return StepSizeVerdict::Unknown;
    return alpha < *bound ? StepSizeVerdict::Admissible : StepSizeVerdict::Inadmissible;
}

StepSizeBound step_size_bound(Method method, const ObjectiveProblem& problem,
                              const std::optional<BlockPartition>& partition) {
    const auto& c = problem.constants();
    switch (method) {
        case Method::GradientDescent:
        case Method::ProximalPoint:
            return {1.0 / c.L, "1/L"};
        case Method::MirrorDescentEuclidean:
            return {1.0 / c.L, "mu/L with mu = 1"};
        case Method::CoordinateDescent:
            return {1.0 / c.L_max, "1/L_max"};
        case Method::BlockCoordinateDescent:
            if (!partition) throw InvalidArgument("block coordinate descent needs a partition");
            return {1.0 / c.L_b(*partition), "1/L_b"};
        case Method::MirrorDescentEntropy:
            return {kEntropyStrongConvexity / c.L, "mu/L with mu = 1"};
        case Method::ManifoldGradientDescent:
            return {std::nullopt, "no closed-form constant on the sphere"};
    }
    return {};
}

OptimizerMap::OptimizerMap(Method method, double alpha, ProblemPtr problem, std::optional<BlockPartition> partition,
                           bool allow_zero_step)
    : method_(method), alpha_(alpha), problem_(std::move(problem)), partition_(std::move(partition)) {
    if (!problem_) throw InvalidArgument("optimizer map needs a problem");
    if (!std::isfinite(alpha_) || alpha_ < 0.0 || (alpha_ == 0.0 && !allow_zero_step))
        throw InvalidArgument("step size must be positive");
    const DomainKind want = required_domain(method_);
    if (problem_->domain().kind() != want)
        throw InvalidArgument("method " + to_string(method_) + " requires a " + to_string(want) +
                              " domain, problem '" + problem_->name() + "' is " + problem_->domain().describe());
    if (method_ == Method::BlockCoordinateDescent) {
        if (!partition_) throw InvalidArgument("block coordinate descent needs a block partition");
        if (partition_->dim() != problem_->dim())
            throw InvalidArgument("block partition dimension does not match the problem");
    } else if (method_ == Method::CoordinateDescent) {
        partition_ = BlockPartition::singletons(problem_->dim());
    } else {
        partition_.reset();
    }
}

Vector OptimizerMap::operator()(const Vector& x) const {
    const ObjectiveProblem& p = *problem_;
    p.domain().require(x);
    switch (method_) {
        case Method::GradientDescent: return gd_step(p, alpha_, x);
        case Method::ProximalPoint: return prox_step(p, alpha_, x);
        case Method::CoordinateDescent: return cd_sweep(p, alpha_, x);
        case Method::BlockCoordinateDescent: return bcd_sweep(p, alpha_, x, *partition_);
        case Method::ManifoldGradientDescent: return manifold_gd_step(p, alpha_, x);
        case Method::MirrorDescentEntropy: return mirror_descent_entropy_step(p, alpha_, x);
        case Method::MirrorDescentEuclidean: return mirror_descent_euclidean_step(p, alpha_, x);
    }
    return x;
}

StepSizeBound OptimizerMap::step_size_bound() const { return saddle::step_size_bound(method_, *problem_, partition_); }

OptimizerMap OptimizerMap::with_alpha(double alpha) const {
    return OptimizerMap(method_, alpha, problem_, method_ == Method::BlockCoordinateDescent ? partition_ : std::nullopt,
                        true);
}

}  // namespace saddle
