#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "saddle/objective.hpp"

namespace saddle {

/// f = x^T H x / 2. L = max |lambda(H)|, L_max = max |H_ii|, L_b exact per
/// partition. The origin is registered unless H is singular.
ProblemPtr make_quadratic(const Matrix& h, std::string name = "quadratic");

/// f(x, y) = x^2/2 + y^4/4 - y^2/2 with z1 = (0,0) a strict saddle and
/// z2 = (0,-1), z3 = (0,1) local minima. The quartic has unbounded curvature,
/// so L = 11 is the bound on the box [-2,2]^2, which is also the trust region.
ProblemPtr make_nesterov_example();

/// The same landscape in d >= 2 dimensions, seen through the Householder
/// reflection R = Id - 2 v v^T / |v|^2 with v = (1, 2, ..., d):
///   f(x) = |u_{0..d-2}|^2 / 2 + u_{d-1}^4 / 4 - u_{d-1}^2 / 2,  u = R x.
/// The Hessian is dense, so coordinate-wise methods differ from gradient
/// descent. Saddle at the origin, minima at +-R e_{d-1}. Constants hold on
/// the 2-norm ball of radius 2.5, which contains every sublevel set reached
/// by a descent method started in [-1,1]^d.
ProblemPtr make_coupled_nesterov(int dim);

/// f = x^T M x on the unit sphere. Registers the unit eigenvectors +-v_i:
/// local minima for the smallest eigenvalue, strict saddles otherwise.
/// Throws RepeatedEigenvalues when two eigenvalues are closer than 1e-8.
ProblemPtr make_sphere_rayleigh(const Matrix& m, std::string name = "sphere-rayleigh");

/// f = x^T Q x / 2 on the open simplex. Equal row sums make the centroid a
/// critical point; its label comes from the tangent spectrum of P Q P.
/// L is the largest tangent eigenvalue modulus. Throws RowSumMismatch.
ProblemPtr make_simplex_quadratic(const Matrix& q, std::string name = "simplex-quadratic");

/// Symmetric H with entries uniform on [-1, 1], generated from `seed`.
ProblemPtr make_random_quadratic(int dim, std::uint64_t seed);

/// Q_ij = c[(i + j) mod D] with c = (2, -1, 0, ..., 0); every row sums to 1.
/// For D = 3 the centroid is a strict saddle with tangent spectrum +-sqrt(7).
Matrix simplex_saddle_matrix(int dim);

/// Default seed behind `random-quadratic:<d>`.
inline constexpr std::uint64_t kRandomQuadraticSeed = 7;

/// Resolves a fixture name:
///   nesterov
///   quadratic:<d>                diag(1, -1, 1, -1, ...)
///   quadratic-matrix:<rows>      rows separated by ';', entries by ','
///   random-quadratic:<d>[:seed]
///   coupled-nesterov:<d>
///   sphere-rayleigh:<d>          M = diag(1, 2, ..., d)
///   simplex-quadratic:<D>        Q = simplex_saddle_matrix(D)
///   simplex-isotropic:<D>        Q = Id
/// Throws ConfigError for unknown or malformed names.
ProblemPtr fixture_by_name(const std::string& name);

struct FixtureEntry {
    ProblemPtr problem;
    std::string provenance;
};

/// Every built-in fixture in one list.
std::vector<FixtureEntry> fixture_catalog();

}  // namespace saddle
