#include "saddle/objective.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace saddle {

// ---------------------------------------------------------------------------
// DomainDescriptor

DomainDescriptor DomainDescriptor::euclidean(int dim) {
    if (dim < 1) throw InvalidArgument("Euclidean domain needs dim >= 1");
    return {DomainKind::Euclidean, dim};
}

DomainDescriptor DomainDescriptor::unit_sphere(int ambient_dim) {
    if (ambient_dim < 2) throw InvalidArgument("unit sphere needs ambient dim >= 2");
    return {DomainKind::UnitSphere, ambient_dim};
}

DomainDescriptor DomainDescriptor::simplex_interior(int ambient_dim) {
    if (ambient_dim < 2) throw InvalidArgument("simplex needs ambient dim >= 2");
    return {DomainKind::SimplexInterior, ambient_dim};
}

bool DomainDescriptor::contains(const Vector& x) const {
    if (x.size() != ambient_dim_ || !x.allFinite()) return false;
    switch (kind_) {
        case DomainKind::Euclidean:
            return true;
        case DomainKind::UnitSphere:
            return std::abs(x.norm() - 1.0) <= kMembershipTol;
        case DomainKind::SimplexInterior:
            return x.minCoeff() > 0.0 && std::abs(x.sum() - 1.0) <= kMembershipTol;
    }
    return false;
}

void DomainDescriptor::require(const Vector& x) const {
    if (contains(x)) return;
    std::ostringstream os;
    if (x.size() != ambient_dim_) {
        os << "point has dimension " << x.size() << ", domain " << describe() << " expects " << ambient_dim_;
    } else if (!x.allFinite()) {
        os << "point has non-finite entries";
    } else if (kind_ == DomainKind::UnitSphere) {
        os << "point is off the unit sphere (norm " << x.norm() << ")";
    } else {
        os << "point is outside the open simplex (min " << x.minCoeff() << ", sum " << x.sum() << ")";
    }
    throw DomainViolation(os.str());
}

Matrix DomainDescriptor::tangent_projector(const Vector& x) const {
    const int n = ambient_dim_;
    switch (kind_) {
        case DomainKind::Euclidean:
            return Matrix::Identity(n, n);
        case DomainKind::UnitSphere:
            return Matrix::Identity(n, n) - x * x.transpose();
        case DomainKind::SimplexInterior:
            return Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
    }
    return {};
}

Vector DomainDescriptor::project_tangent(const Vector& x, const Vector& v) const {
    switch (kind_) {
        case DomainKind::Euclidean:
            return v;
        case DomainKind::UnitSphere:
            return v - x * x.dot(v);
        case DomainKind::SimplexInterior:
            return v.array() - v.mean();
    }
    return v;
}

Matrix DomainDescriptor::tangent_basis(const Vector& x) const {
    const int n = ambient_dim_;
    if (kind_ == DomainKind::Euclidean) return Matrix::Identity(n, n);
    const Matrix p = tangent_projector(x);
    Eigen::ColPivHouseholderQR<Matrix> qr(p);
    Matrix q = qr.householderQ() * Matrix::Identity(n, tangent_dim());
    return q;
}

std::string DomainDescriptor::describe() const {
    std::ostringstream os;
    os << to_string(kind_) << "(" << ambient_dim_ << ")";
    return os.str();
}

// ---------------------------------------------------------------------------
// BlockPartition

BlockPartition::BlockPartition(std::vector<std::vector<int>> blocks, int dim)
    : blocks_(std::move(blocks)), dim_(dim) {
    std::set<int> seen;
    for (const auto& block : blocks_) {
        if (block.empty()) throw InvalidArgument("block partition contains an empty block");
        for (int i : block) {
            if (i < 0 || i >= dim_) throw InvalidArgument("block index " + std::to_string(i) + " out of range");
            if (!seen.insert(i).second) throw InvalidArgument("block index " + std::to_string(i) + " repeated");
        }
    }
    if (static_cast<int>(seen.size()) != dim_)
        throw InvalidArgument("blocks cover " + std::to_string(seen.size()) + " of " + std::to_string(dim_) +
                              " coordinates");
}

BlockPartition BlockPartition::singletons(int dim) {
    std::vector<std::vector<int>> b;
    for (int i = 0; i < dim; ++i) b.push_back({i});
    return {std::move(b), dim};
}

BlockPartition BlockPartition::single_block(int dim) {
    std::vector<int> all(dim);
    for (int i = 0; i < dim; ++i) all[i] = i;
    return {{all}, dim};
}

std::string BlockPartition::to_string() const {
    std::ostringstream os;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        if (b) os << ';';
        for (std::size_t j = 0; j < blocks_[b].size(); ++j) {
            if (j) os << ',';
            os << blocks_[b][j];
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// TrustRegion / ObjectiveProblem

bool TrustRegion::contains(const Vector& x) const {
    const double n = norm == Norm::Infinity ? x.lpNorm<Eigen::Infinity>() : x.norm();
    return n <= radius;
}

ObjectiveProblem::ObjectiveProblem(std::string name, DomainDescriptor domain, ValueFn value, GradientFn gradient,
                                   HessianFn hessian, LipschitzConstants constants,
                                   std::vector<KnownCriticalPoint> critical_points, std::optional<TrustRegion> region)
    : name_(std::move(name)),
      domain_(domain),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      hessian_(std::move(hessian)),
      constants_(std::move(constants)),
      critical_points_(std::move(critical_points)),
      region_(region) {
    if (!value_ || !gradient_ || !hessian_) throw InvalidArgument("objective oracles must all be set");
    if (!(constants_.L > 0.0) || !(constants_.L_max > 0.0))
        throw InvalidArgument("Lipschitz constants must be positive");
    for (const auto& cp : critical_points_) {
        if (cp.point.size() != domain_.ambient_dim()) throw InvalidArgument("critical point has wrong dimension");
    }
}

Vector ObjectiveProblem::gradient(const Vector& x) const { return gradient_(x); }

Matrix ObjectiveProblem::hessian(const Vector& x) const {
    Matrix h = hessian_(x);
    return 0.5 * (h + h.transpose());
}

// ---------------------------------------------------------------------------
// Riemannian derivatives

Vector riemannian_gradient(const ObjectiveProblem& problem, const Vector& x) {
    const auto& dom = problem.domain();
    dom.require(x);
    return dom.project_tangent(x, problem.gradient(x));
}

Matrix riemannian_hessian(const ObjectiveProblem& problem, const Vector& x) {
    const auto& dom = problem.domain();
    dom.require(x);
    Matrix h = problem.hessian(x);
    if (dom.kind() == DomainKind::Euclidean) return h;
    if (dom.kind() == DomainKind::UnitSphere) {
        const double radial = x.dot(problem.gradient(x));
        h.diagonal().array() -= radial;
    }
    const Matrix p = dom.tangent_projector(x);
    Matrix r = p * h * p;
    return 0.5 * (r + r.transpose());
}

Matrix tangent_hessian(const ObjectiveProblem& problem, const Vector& x) {
    const Matrix r = riemannian_hessian(problem, x);
    if (problem.domain().kind() == DomainKind::Euclidean) return r;
    const Matrix b = problem.domain().tangent_basis(x);
    Matrix t = b.transpose() * r * b;
    return 0.5 * (t + t.transpose());
}

Vector tangent_hessian_eigenvalues(const ObjectiveProblem& problem, const Vector& x) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(tangent_hessian(problem, x), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw EigensolverFailure("symmetric eigensolve of Riemannian Hessian failed");
    return es.eigenvalues();
}

// ---------------------------------------------------------------------------
// Finite differences

double default_gradient_step(const Vector& x) { return 1e-5 * std::max(1.0, x.lpNorm<Eigen::Infinity>()); }

double default_hessian_step(const Vector& x) { return 1e-4 * std::max(1.0, x.lpNorm<Eigen::Infinity>()); }

Vector finite_difference_gradient(const ObjectiveProblem& problem, const Vector& x, double h) {
    if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
    const Eigen::Index n = x.size();
    Vector g(n);
    Vector xp = x;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double xi = x[i];
        xp[i] = xi + h;
        const double fp = problem.value(xp);
        xp[i] = xi - h;
        const double fm = problem.value(xp);
        xp[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

Vector finite_difference_gradient(const ObjectiveProblem& problem, const Vector& x) {
    return finite_difference_gradient(problem, x, default_gradient_step(x));
}

Matrix finite_difference_hessian(const ObjectiveProblem& problem, const Vector& x, double h) {
    if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
    const Eigen::Index n = x.size();
    Matrix hess(n, n);
    auto f_at = [&](Eigen::Index i, double si, Eigen::Index j, double sj) {
        Vector y = x;
        y[i] += si * h;
        y[j] += sj * h;
        return problem.value(y);
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double v = (f_at(i, 1, j, 1) - f_at(i, 1, j, -1) - f_at(i, -1, j, 1) + f_at(i, -1, j, -1)) /
                             (4.0 * h * h);
            hess(i, j) = v;
            hess(j, i) = v;
        }
    }
    return hess;
}

Matrix finite_difference_hessian(const ObjectiveProblem& problem, const Vector& x) {
    return finite_difference_hessian(problem, x, default_hessian_step(x));
}

// ---------------------------------------------------------------------------
// Classification

CriticalClass classify_critical_point(const ObjectiveProblem& problem, const Vector& x, ClassifyTolerances tol) {
    if (riemannian_gradient(problem, x).norm() > tol.tol_grad) return CriticalClass::NotCritical;
    const double lmin = tangent_hessian_eigenvalues(problem, x).minCoeff();
    if (lmin < -tol.tol_eig) return CriticalClass::StrictSaddle;
    if (lmin > tol.tol_eig) return CriticalClass::LocalMinCandidate;
    return CriticalClass::Degenerate;
}

CriticalClass expected_class(CriticalLabel label) {
    return label == CriticalLabel::LocalMin ? CriticalClass::LocalMinCandidate : CriticalClass::StrictSaddle;
}

std::string to_string(CriticalClass c) {
    switch (c) {
        case CriticalClass::NotCritical: return "not_critical";
        case CriticalClass::LocalMinCandidate: return "local_min_candidate";
        case CriticalClass::StrictSaddle: return "strict_saddle";
        case CriticalClass::Degenerate: return "degenerate";
    }
    return "?";
}

std::string to_string(CriticalLabel l) { return l == CriticalLabel::LocalMin ? "local_min" : "strict_saddle"; }

std::string to_string(DomainKind k) {
    switch (k) {
        case DomainKind::Euclidean: return "euclidean";
        case DomainKind::UnitSphere: return "unit-sphere";
        case DomainKind::SimplexInterior: return "simplex-interior";
    }
    return "?";
}

}  // namespace saddle
