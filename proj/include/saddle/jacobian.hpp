#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "saddle/optimizer_maps.hpp"

namespace saddle {

/// Matrix of Dg. Ambient d x d for Euclidean methods; for sphere and simplex
/// methods a (D-1) x (D-1) matrix in the orthonormal tangent bases stored
/// alongside (input basis at x, output basis at g(x)).
struct MapDifferential {
    Matrix matrix;
    std::optional<Matrix> basis;
    std::optional<Matrix> output_basis;
};

inline constexpr double kDefaultTolSpec = 1e-9;
inline constexpr double kDefaultTolDet = 1e-12;
inline constexpr double kFixedPointGradTol = 1e-8;

/// Id - alpha * hess f(x)
MapDifferential dg_gradient_descent(const ObjectiveProblem& problem, double alpha, const Vector& x);

/// (Id + alpha * hess f(z))^{-1} with z = prox(x). Throws SingularMatrix.
MapDifferential dg_proximal_point(const ObjectiveProblem& problem, double alpha, const Vector& x);

/// Ordered product of the rank-one factors Id - alpha e_i e_i^T hess f(y^{i}),
/// later coordinates multiplying on the left. The intermediates are the points
/// the sweep visited; they are recomputed when not supplied.
MapDifferential dg_coordinate_descent(const ObjectiveProblem& problem, double alpha, const Vector& x,
                                      const std::vector<Vector>* intermediates = nullptr);

/// Block analogue with P_S hess f(y^{S}) factors in the partition's order.
MapDifferential dg_block_coordinate_descent(const ObjectiveProblem& problem, double alpha, const Vector& x,
                                            const BlockPartition& partition);

/// Id - alpha * (tangent Riemannian Hessian) in the tangent basis at x*.
/// Only valid at fixed points; throws NotAFixedPoint otherwise.
MapDifferential dg_manifold_gd_at_fixed_point(const ObjectiveProblem& problem, double alpha, const Vector& x,
                                              double grad_tol = kFixedPointGradTol);

enum class MirrorMap { Entropy, Euclidean };

/// Id_T - alpha A^{-1} H_T at an interior critical point, where A is the
/// tangent-restricted Hessian of the mirror map (diag(1/x) for entropy,
/// Id for the quadratic map).
MapDifferential dg_mirror_descent_at_fixed_point(const ObjectiveProblem& problem, double alpha, const Vector& x,
                                                 MirrorMap mirror, double grad_tol = kFixedPointGradTol);

/// Id - alpha A^{-1/2} H_T A^{-1/2}: symmetric and similar to the matrix
/// returned by dg_mirror_descent_at_fixed_point.
Matrix mirror_descent_symmetrized(const ObjectiveProblem& problem, double alpha, const Vector& x, MirrorMap mirror,
                                  double grad_tol = kFixedPointGradTol);

/// Dispatches to the closed-form differential for the map's method. For
/// manifold GD and multiplicative weights this is the fixed-point formula.
MapDifferential analytic_differential(const OptimizerMap& map, const Vector& x);

/// Central-difference Jacobian of g. On the sphere and simplex the
/// perturbations run along the tangent basis at x (retracted onto the
/// domain) and the differences are expressed in the tangent basis at g(x).
MapDifferential fd_differential(const OptimizerMap& map, const Vector& x, double h);
MapDifferential fd_differential(const OptimizerMap& map, const Vector& x);

struct SpectralReport {
    std::vector<std::complex<double>> eigenvalues;
    double spectral_radius = 0.0;
    double max_modulus = 0.0;
    double det = 0.0;
    double log_abs_det = 0.0;
    int det_sign = 0;
    bool is_unstable = false;
    bool det_nonzero = false;
};

/// Dense nonsymmetric eigensolve. Eigenvalues are sorted by decreasing
/// modulus (ties by real part, then imaginary part).
SpectralReport spectral_report(const MapDifferential& dg, double tol_spec = kDefaultTolSpec,
                               double tol_det = kDefaultTolDet);
SpectralReport spectral_report(const Matrix& m, double tol_spec = kDefaultTolSpec, double tol_det = kDefaultTolDet);

/// |a - b|_F / |b|_F (absolute error when b is zero)
double relative_frobenius_error(const Matrix& a, const Matrix& b);

/// Classification of a candidate point, optionally with the spectrum of an
/// optimizer map's differential there.
struct FixedPointReport {
    double gradient_residual = 0.0;
    Vector hessian_eigenvalues;
    CriticalClass classification = CriticalClass::NotCritical;
    std::optional<SpectralReport> dg_spectrum;
};

FixedPointReport fixed_point_report(const ObjectiveProblem& problem, const Vector& x, ClassifyTolerances tol = {},
                                    const OptimizerMap* map = nullptr);

}  // namespace saddle
