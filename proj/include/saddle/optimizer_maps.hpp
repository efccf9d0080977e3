#pragma once

#include <optional>
#include <string>
#include <vector>

#include "saddle/objective.hpp"

namespace saddle {

enum class Method {
    GradientDescent,
    ProximalPoint,
    CoordinateDescent,
    BlockCoordinateDescent,
    ManifoldGradientDescent,
    MirrorDescentEntropy,
    MirrorDescentEuclidean,
};

/// CLI spelling: gd, prox, cd, bcd, manifold-gd, mw, mirror-euclidean.
std::string to_string(Method m);
/// Accepts the CLI spellings plus "mirror-entropy". Throws ConfigError.
Method parse_method(const std::string& name);

/// Domain the method is defined on.
DomainKind required_domain(Method m);

// ---------------------------------------------------------------------------
// Single steps

/// Below this minimum component an entropy iterate is treated as having hit
/// the simplex boundary.
inline constexpr double kSimplexUnderflow = 1e-300;

struct ProxOptions {
    int max_iters = 100;
    double residual_tol = 1e-10;
};

Vector gd_step(const ObjectiveProblem& problem, double alpha, const Vector& x);

/// Solves z + alpha * grad f(z) = x by damped Newton from z = x. Once the
/// residual tolerance is met, extra Newton steps are taken for as long as
/// they keep reducing the residual, so the returned point is accurate to
/// rounding.
Vector prox_step(const ObjectiveProblem& problem, double alpha, const Vector& x, ProxOptions opts = {});

/// Residual |z + alpha * grad f(z) - x|_2 of the proximal optimality identity.
double prox_residual(const ObjectiveProblem& problem, double alpha, const Vector& x, const Vector& z);

/// Gauss-Seidel sweep plus the points it visited: intermediates[i] is the
/// point at which coordinate i's (or block i's) partial gradient was taken.
struct SweepTrace {
    Vector result;
    std::vector<Vector> intermediates;
};

Vector cd_sweep(const ObjectiveProblem& problem, double alpha, const Vector& x);
SweepTrace cd_sweep_traced(const ObjectiveProblem& problem, double alpha, const Vector& x);

Vector bcd_sweep(const ObjectiveProblem& problem, double alpha, const Vector& x, const BlockPartition& partition);
SweepTrace bcd_sweep_traced(const ObjectiveProblem& problem, double alpha, const Vector& x,
                            const BlockPartition& partition);

/// x - alpha * P_T grad f(x), renormalized onto the sphere.
Vector manifold_gd_step(const ObjectiveProblem& problem, double alpha, const Vector& x);

/// Multiplicative weights: x_i exp(-alpha d_i f) / sum_j x_j exp(-alpha d_j f),
/// evaluated in log space with a max shift.
Vector mirror_descent_entropy_step(const ObjectiveProblem& problem, double alpha, const Vector& x);

/// Quadratic mirror map; the conjugate map is the identity so this is
/// exactly gd_step.
Vector mirror_descent_euclidean_step(const ObjectiveProblem& problem, double alpha, const Vector& x);

// ---------------------------------------------------------------------------
// Step-size admissibility

enum class StepSizeVerdict { Admissible, Inadmissible, Unknown };

struct StepSizeBound {
    /// Unset for manifold GD, whose constant is not computable in closed form.
    std::optional<double> bound;
    std::string description;

    /// Admissible iff alpha is strictly below the bound.
    StepSizeVerdict validate(double alpha) const;
};

/// Strong-convexity modulus of the entropy mirror map on the simplex.
inline constexpr double kEntropyStrongConvexity = 1.0;

// ---------------------------------------------------------------------------
// OptimizerMap

/// A first-order method bound to a problem and a step size: the map g.
/// Immutable after construction.
class OptimizerMap {
public:
    /// Validates alpha > 0 (alpha == 0 is allowed only when allow_zero_step
    /// is set, for the identity-map checks), method/domain compatibility and,
    /// for BCD, the partition.
    OptimizerMap(Method method, double alpha, ProblemPtr problem,
                 std::optional<BlockPartition> partition = std::nullopt, bool allow_zero_step = false);

    Method method() const { return method_; }
    double alpha() const { return alpha_; }
    const ObjectiveProblem& problem() const { return *problem_; }
    const ProblemPtr& problem_ptr() const { return problem_; }
    /// Declared partition for BCD; singletons for CD.
    const std::optional<BlockPartition>& partition() const { return partition_; }

    /// g(x). Checks domain membership of x.
    Vector operator()(const Vector& x) const;

    StepSizeBound step_size_bound() const;

    /// Same method and problem with another step size; zero is accepted.
    OptimizerMap with_alpha(double alpha) const;

private:
    Method method_;
    double alpha_;
    ProblemPtr problem_;
    std::optional<BlockPartition> partition_;
};

/// Step-size bound for a method on a problem, independent of alpha.
StepSizeBound step_size_bound(Method method, const ObjectiveProblem& problem,
                              const std::optional<BlockPartition>& partition = std::nullopt);

}  // namespace saddle
