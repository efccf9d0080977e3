#include "saddle/jacobian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace saddle {

namespace {

void require_fixed_point(const ObjectiveProblem& problem, const Vector& x, double grad_tol) {
    const double r = riemannian_gradient(problem, x).norm();
    if (r > grad_tol) {
        std::ostringstream os;
        os << "point is not a fixed point: Riemannian gradient norm " << r << " exceeds " << grad_tol;
        throw NotAFixedPoint(os.str());
    }
}

/// Orthonormal basis of T(y) obtained by projecting `basis` onto T(y) and
/// running Gram-Schmidt (QR with a positive R diagonal). Equals `basis` when
/// T(y) is the space it already spans.
Matrix transport_basis(const DomainDescriptor& dom, const Vector& y, const Matrix& basis) {
    const Matrix m = dom.tangent_projector(y) * basis;
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (qr.matrixQR()(j, j) < 0.0) q.col(j) *= -1.0;
    }
    return q;
}

/// Tangent-restricted entropy Hessian B^T diag(1/x) B.
Matrix entropy_tangent_hessian(const Vector& x, const Matrix& basis) {
    Matrix a = basis.transpose() * x.cwiseInverse().asDiagonal() * basis;
    return 0.5 * (a + a.transpose());
}

struct MirrorPieces {
    Matrix a;  // mirror-map Hessian on T
    Matrix h;  // objective Riemannian Hessian on T
    std::optional<Matrix> basis;
};

MirrorPieces mirror_pieces(const ObjectiveProblem& problem, const Vector& x, MirrorMap mirror, double grad_tol) {
    const auto& dom = problem.domain();
    if (mirror == MirrorMap::Entropy && dom.kind() != DomainKind::SimplexInterior)
        throw DomainViolation("entropy mirror map needs a simplex-interior domain");
    if (mirror == MirrorMap::Euclidean && dom.kind() != DomainKind::Euclidean)
        throw DomainViolation("quadratic mirror map is only supported on Euclidean domains");
    require_fixed_point(problem, x, grad_tol);
    MirrorPieces p;
    p.h = tangent_hessian(problem, x);
    if (mirror == MirrorMap::Entropy) {
        p.basis = dom.tangent_basis(x);
        p.a = entropy_tangent_hessian(x, *p.basis);
    } else {
        p.a = Matrix::Identity(x.size(), x.size());
    }
    return p;
}

}  // namespace

MapDifferential dg_gradient_descent(const ObjectiveProblem& problem, double alpha, const Vector& x) {
    const Eigen::Index n = x.size();
    Matrix m = Matrix::Identity(n, n) - alpha * problem.hessian(x);
    return {std::move(m), std::nullopt, std::nullopt};
}

MapDifferential dg_proximal_point(const ObjectiveProblem& problem, double alpha, const Vector& x) {
    const Vector z = prox_step(problem, alpha, x);
    const Eigen::Index n = x.size();
    const Matrix m = Matrix::Identity(n, n) + alpha * problem.hessian(z);
    Eigen::PartialPivLU<Matrix> lu(m);
    if (!(lu.rcond() > 1e-13))
        throw SingularMatrix("Id + alpha * hess f(prox(x)) is numerically singular; alpha is likely >= 1/L");
    return {lu.inverse(), std::nullopt, std::nullopt};
}

MapDifferential dg_coordinate_descent(const ObjectiveProblem& problem, double alpha, const Vector& x,
                                      const std::vector<Vector>* intermediates) {
    const Eigen::Index n = x.size();
    std::vector<Vector> visited;
    if (intermediates == nullptr) {
        visited = cd_sweep_traced(problem, alpha, x).intermediates;
        intermediates = &visited;
    }
    if (static_cast<Eigen::Index>(intermediates->size()) != n)
        throw InvalidArgument("coordinate descent differential needs one intermediate point per coordinate");
    Matrix j = Matrix::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Matrix h = problem.hessian((*intermediates)[i]);
        // (Id - alpha e_i e_i^T H) J only changes row i.
        const Eigen::RowVectorXd update = h.row(i) * j;
        j.row(i) -= alpha * update;
    }
    return {std::move(j), std::nullopt, std::nullopt};
}

MapDifferential dg_block_coordinate_descent(const ObjectiveProblem& problem, double alpha, const Vector& x,
                                            const BlockPartition& partition) {
    const Eigen::Index n = x.size();
    const SweepTrace trace = bcd_sweep_traced(problem, alpha, x, partition);
    Matrix j = Matrix::Identity(n, n);
    for (std::size_t b = 0; b < partition.size(); ++b) {
        const auto& block = partition.blocks()[b];
        const Matrix h = problem.hessian(trace.intermediates[b]);
        Matrix update(block.size(), n);
        for (std::size_t r = 0; r < block.size(); ++r) update.row(r) = h.row(block[r]) * j;
        for (std::size_t r = 0; r < block.size(); ++r) j.row(block[r]) -= alpha * update.row(r);
    }
    return {std::move(j), std::nullopt, std::nullopt};
}

MapDifferential dg_manifold_gd_at_fixed_point(const ObjectiveProblem& problem, double alpha, const Vector& x,
                                              double grad_tol) {
    if (problem.domain().kind() != DomainKind::UnitSphere)
        throw DomainViolation("manifold gradient descent differential needs a unit-sphere domain");
    require_fixed_point(problem, x, grad_tol);
    const Matrix basis = problem.domain().tangent_basis(x);
    const Matrix h = basis.transpose() * riemannian_hessian(problem, x) * basis;
    const Eigen::Index k = basis.cols();
    Matrix m = Matrix::Identity(k, k) - alpha * 0.5 * (h + h.transpose());
    return {std::move(m), basis, basis};
}

MapDifferential dg_mirror_descent_at_fixed_point(const ObjectiveProblem& problem, double alpha, const Vector& x,
                                                 MirrorMap mirror, double grad_tol) {
    MirrorPieces p = mirror_pieces(problem, x, mirror, grad_tol);
    const Eigen::Index k = p.h.rows();
    if (mirror == MirrorMap::Euclidean) {
        return dg_gradient_descent(problem, alpha, x);
    }
    Eigen::LLT<Matrix> llt(p.a);
    if (llt.info() != Eigen::Success) throw SingularMatrix("mirror-map Hessian is not positive definite");
    Matrix m = Matrix::Identity(k, k) - alpha * llt.solve(p.h);
    return {std::move(m), p.basis, p.basis};
}

Matrix mirror_descent_symmetrized(const ObjectiveProblem& problem, double alpha, const Vector& x, MirrorMap mirror,
                                  double grad_tol) {
    MirrorPieces p = mirror_pieces(problem, x, mirror, grad_tol);
    const Eigen::Index k = p.h.rows();
    Eigen::SelfAdjointEigenSolver<Matrix> es(p.a);
    if (es.info() != Eigen::Success) throw EigensolverFailure("eigensolve of mirror-map Hessian failed");
    const Matrix inv_sqrt = es.operatorInverseSqrt();
    Matrix s = Matrix::Identity(k, k) - alpha * inv_sqrt * p.h * inv_sqrt;
    return 0.5 * (s + s.transpose());
}

MapDifferential analytic_differential(const OptimizerMap& map, const Vector& x) {
    const ObjectiveProblem& p = map.problem();
    p.domain().require(x);
    const double a = map.alpha();
    switch (map.method()) {
        case Method::GradientDescent:
        case Method::MirrorDescentEuclidean:
            return dg_gradient_descent(p, a, x);
        case Method::ProximalPoint:
            return dg_proximal_point(p, a, x);
        case Method::CoordinateDescent:
            return dg_coordinate_descent(p, a, x);
        case Method::BlockCoordinateDescent:
            return dg_block_coordinate_descent(p, a, x, *map.partition());
        case Method::ManifoldGradientDescent:
            return dg_manifold_gd_at_fixed_point(p, a, x);
        case Method::MirrorDescentEntropy:
            return dg_mirror_descent_at_fixed_point(p, a, x, MirrorMap::Entropy);
    }
    throw InvalidArgument("unknown method");
}

MapDifferential fd_differential(const OptimizerMap& map, const Vector& x, double h) {
    if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
    const auto& dom = map.problem().domain();
    dom.require(x);
    const Eigen::Index n = x.size();

    if (dom.kind() == DomainKind::Euclidean) {
        Matrix j(n, n);
        for (Eigen::Index c = 0; c < n; ++c) {
            Vector xp = x, xm = x;
            xp[c] += h;
            xm[c] -= h;
            j.col(c) = (map(xp) - map(xm)) / (2.0 * h);
        }
        return {std::move(j), std::nullopt, std::nullopt};
    }

    const Matrix basis = dom.tangent_basis(x);
    const Eigen::Index k = basis.cols();
    Matrix out_basis = basis;
    double step = h;
    auto retract = [&](const Vector& y) -> Vector {
        return dom.kind() == DomainKind::UnitSphere ? Vector(y / y.norm()) : y;
    };
    if (dom.kind() == DomainKind::UnitSphere) {
        out_basis = transport_basis(dom, map(x), basis);
    } else {
        // Stay inside the open simplex; basis entries are bounded by one.
        step = std::min(h, 0.25 * x.minCoeff());
    }
    Matrix j(k, k);
    for (Eigen::Index c = 0; c < k; ++c) {
        const Vector gp = map(retract(x + step * basis.col(c)));
        const Vector gm = map(retract(x - step * basis.col(c)));
        j.col(c) = out_basis.transpose() * (gp - gm) / (2.0 * step);
    }
    return {std::move(j), basis, out_basis};
}

MapDifferential fd_differential(const OptimizerMap& map, const Vector& x) {
    return fd_differential(map, x, default_gradient_step(x));
}

SpectralReport spectral_report(const Matrix& m, double tol_spec, double tol_det) {
    if (m.rows() != m.cols() || m.rows() == 0) throw InvalidArgument("spectral report needs a nonempty square matrix");
    if (!m.allFinite()) throw InvalidArgument("spectral report needs a finite matrix");
    Eigen::EigenSolver<Matrix> es(m, false);
    if (es.info() != Eigen::Success) throw EigensolverFailure("nonsymmetric eigensolve did not converge");

    SpectralReport rep;
    const auto& ev = es.eigenvalues();
    rep.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  const double ma = std::abs(a), mb = std::abs(b);
                  if (ma != mb) return ma > mb;
                  if (a.real() != b.real()) return a.real() > b.real();
                  return a.imag() > b.imag();
              });
    rep.max_modulus = std::abs(rep.eigenvalues.front());
    rep.spectral_radius = rep.max_modulus;

    Eigen::PartialPivLU<Matrix> lu(m);
    rep.det = lu.determinant();
    rep.det_sign = rep.det > 0.0 ? 1 : (rep.det < 0.0 ? -1 : 0);
    rep.log_abs_det = lu.matrixLU().diagonal().array().abs().log().sum();

    rep.is_unstable = rep.max_modulus > 1.0 + tol_spec;
    rep.det_nonzero = std::abs(rep.det) > tol_det;
    return rep;
}

SpectralReport spectral_report(const MapDifferential& dg, double tol_spec, double tol_det) {
    return spectral_report(dg.matrix, tol_spec, tol_det);
}

double relative_frobenius_error(const Matrix& a, const Matrix& b) {
    const double scale = b.norm();
    return (a - b).norm() / (scale > 0.0 ? scale : 1.0);
}

FixedPointReport fixed_point_report(const ObjectiveProblem& problem, const Vector& x, ClassifyTolerances tol,
                                    const OptimizerMap* map) {
    FixedPointReport rep;
    rep.gradient_residual = riemannian_gradient(problem, x).norm();
    rep.hessian_eigenvalues = tangent_hessian_eigenvalues(problem, x);
    rep.classification = classify_critical_point(problem, x, tol);
    if (map != nullptr) rep.dg_spectrum = spectral_report(analytic_differential(*map, x));
    return rep;
}

}  // namespace saddle
