#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "saddle/common.hpp"

namespace saddle {

// ---------------------------------------------------------------------------
// Domains
// ---------------------------------------------------------------------------

enum class DomainKind { Euclidean, UnitSphere, SimplexInterior };

inline constexpr double kMembershipTol = 1e-10;

class DomainDescriptor {
public:
    static DomainDescriptor euclidean(int dim);
    static DomainDescriptor unit_sphere(int ambient_dim);
    static DomainDescriptor simplex_interior(int ambient_dim);

    DomainKind kind() const { return kind_; }
    int ambient_dim() const { return ambient_dim_; }
    /// d for Euclidean, D-1 for the sphere and the simplex.
    int tangent_dim() const { return kind_ == DomainKind::Euclidean ? ambient_dim_ : ambient_dim_ - 1; }

    bool contains(const Vector& x) const;
    /// Throws DomainViolation with a description of the failed test.
    void require(const Vector& x) const;

    /// Orthogonal projector onto the tangent space at x (ambient coordinates).
    Matrix tangent_projector(const Vector& x) const;
    Vector project_tangent(const Vector& x, const Vector& v) const;

    /// Orthonormal basis (ambient_dim x tangent_dim) of the tangent space at x,
    /// obtained from a column-pivoted QR of the projector. Identity on
    /// Euclidean domains.
    Matrix tangent_basis(const Vector& x) const;

    std::string describe() const;

private:
    DomainDescriptor(DomainKind kind, int dim) : kind_(kind), ambient_dim_(dim) {}

    DomainKind kind_;
    int ambient_dim_;
};

// ---------------------------------------------------------------------------
// Block partitions
// ---------------------------------------------------------------------------

/// Ordered list of disjoint, nonempty index blocks covering {0..d-1}.
class BlockPartition {
public:
    /// Validates coverage and disjointness; throws InvalidArgument.
    BlockPartition(std::vector<std::vector<int>> blocks, int dim);

    static BlockPartition singletons(int dim);
    static BlockPartition single_block(int dim);

    const std::vector<std::vector<int>>& blocks() const { return blocks_; }
    int dim() const { return dim_; }
    std::size_t size() const { return blocks_.size(); }

    /// "0,1;2,3"
    std::string to_string() const;

    bool operator==(const BlockPartition&) const = default;

private:
    std::vector<std::vector<int>> blocks_;
    int dim_;
};

// ---------------------------------------------------------------------------
// Objectives
// ---------------------------------------------------------------------------

enum class CriticalLabel { LocalMin, StrictSaddle };

struct KnownCriticalPoint {
    Vector point;
    CriticalLabel label;
};

/// Curvature constants. Smallest known valid values or conservative upper
/// bounds, valid on the problem's trust region when it has one.
struct LipschitzConstants {
    double L = 1.0;
    double L_max = 1.0;
    /// L_b for a given partition; when unset, L is used (always valid since
    /// every principal submatrix norm is bounded by the full norm).
    std::function<double(const BlockPartition&)> block_bound;

    double L_b(const BlockPartition& partition) const { return block_bound ? block_bound(partition) : L; }
};

/// Region on which the Lipschitz constants hold. Experiments report iterates
/// leaving it as diverged.
struct TrustRegion {
    enum class Norm { Infinity, Two };
    Norm norm = Norm::Infinity;
    double radius = 0.0;

    bool contains(const Vector& x) const;
};

using ValueFn = std::function<double(const Vector&)>;
using GradientFn = std::function<Vector(const Vector&)>;
using HessianFn = std::function<Matrix(const Vector&)>;

class ObjectiveProblem {
public:
    ObjectiveProblem(std::string name, DomainDescriptor domain, ValueFn value, GradientFn gradient,
                     HessianFn hessian, LipschitzConstants constants,
                     std::vector<KnownCriticalPoint> critical_points = {},
                     std::optional<TrustRegion> region = std::nullopt);

    const std::string& name() const { return name_; }
    const DomainDescriptor& domain() const { return domain_; }
    int dim() const { return domain_.ambient_dim(); }
    const LipschitzConstants& constants() const { return constants_; }
    const std::vector<KnownCriticalPoint>& known_critical_points() const { return critical_points_; }
    const std::optional<TrustRegion>& region() const { return region_; }

    double value(const Vector& x) const { return value_(x); }
    Vector gradient(const Vector& x) const;
    /// Always symmetric: the raw oracle output is replaced by (H + H^T) / 2.
    Matrix hessian(const Vector& x) const;

private:
    std::string name_;
    DomainDescriptor domain_;
    ValueFn value_;
    GradientFn gradient_;
    HessianFn hessian_;
    LipschitzConstants constants_;
    std::vector<KnownCriticalPoint> critical_points_;
    std::optional<TrustRegion> region_;
};

using ProblemPtr = std::shared_ptr<const ObjectiveProblem>;

// ---------------------------------------------------------------------------
// Riemannian derivatives
// ---------------------------------------------------------------------------

/// Tangent projection of the Euclidean gradient (ambient coordinates).
Vector riemannian_gradient(const ObjectiveProblem& problem, const Vector& x);

/// Riemannian Hessian as an ambient matrix acting on the tangent space.
///   Euclidean:  H
///   simplex:    P H P
///   sphere:     P (H - (x^T grad) I) P
Matrix riemannian_hessian(const ObjectiveProblem& problem, const Vector& x);

/// B^T riemannian_hessian B in the orthonormal tangent basis B at x.
Matrix tangent_hessian(const ObjectiveProblem& problem, const Vector& x);

/// Ascending eigenvalues of the tangent-restricted Riemannian Hessian.
Vector tangent_hessian_eigenvalues(const ObjectiveProblem& problem, const Vector& x);

// ---------------------------------------------------------------------------
// Finite-difference oracles (verification only)
// ---------------------------------------------------------------------------

/// 1e-5 * max(1, |x|_inf)
double default_gradient_step(const Vector& x);
/// 1e-4 * max(1, |x|_inf); second differences of values lose two orders of
/// magnitude to cancellation, so the optimal step is larger.
double default_hessian_step(const Vector& x);

Vector finite_difference_gradient(const ObjectiveProblem& problem, const Vector& x, double h);
Vector finite_difference_gradient(const ObjectiveProblem& problem, const Vector& x);

/// Four-point second differences of f, symmetrized.
Matrix finite_difference_hessian(const ObjectiveProblem& problem, const Vector& x, double h);
Matrix finite_difference_hessian(const ObjectiveProblem& problem, const Vector& x);

// ---------------------------------------------------------------------------
// Critical-point classification
// ---------------------------------------------------------------------------

enum class CriticalClass { NotCritical, LocalMinCandidate, StrictSaddle, Degenerate };

struct ClassifyTolerances {
    double tol_grad = 1e-8;
    double tol_eig = 1e-8;
};

/// Local maximizers come back as StrictSaddle (they have a negative
/// direction).
CriticalClass classify_critical_point(const ObjectiveProblem& problem, const Vector& x,
                                      ClassifyTolerances tol = {});

std::string to_string(CriticalClass c);
std::string to_string(CriticalLabel l);
std::string to_string(DomainKind k);

/// Label a registered critical point is expected to classify as.
CriticalClass expected_class(CriticalLabel label);

}  // namespace saddle
