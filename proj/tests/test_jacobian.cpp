#include <cmath>

#include "saddle/jacobian.hpp"
#include "saddle/problems.hpp"
#include "test_support.hpp"

using namespace saddle;
using saddle::testing::mat;
using saddle::testing::random_point;
using saddle::testing::vec;

namespace {

Vector sorted_real(const SpectralReport& r) {
    Vector v(static_cast<Eigen::Index>(r.eigenvalues.size()));
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
        CHECK(std::abs(r.eigenvalues[i].imag()) <= 1e-14);
        v[static_cast<Eigen::Index>(i)] = r.eigenvalues[i].real();
    }
    std::sort(v.begin(), v.end());
    return v;
}

std::vector<OptimizerMap> euclidean_maps(const ProblemPtr& p) {
    const double l = p->constants().L;
    std::vector<OptimizerMap> maps = {
        OptimizerMap(Method::GradientDescent, 0.9 / l, p),
        OptimizerMap(Method::ProximalPoint, 0.9 / l, p),
        OptimizerMap(Method::CoordinateDescent, 0.9 / p->constants().L_max, p),
        OptimizerMap(Method::MirrorDescentEuclidean, 0.9 / l, p),
        OptimizerMap(Method::BlockCoordinateDescent, 0.9 / l, p, BlockPartition::single_block(p->dim())),
    };
    if (p->dim() == 4) maps.emplace_back(Method::BlockCoordinateDescent, 0.9 / l, p, BlockPartition({{0, 1}, {2, 3}}, 4));
    if (p->dim() == 2) maps.emplace_back(Method::BlockCoordinateDescent, 0.9 / l, p, BlockPartition({{1}, {0}}, 2));
    return maps;
}

}  // namespace

TEST_CASE("gradient descent differential") {
    const auto nest = make_nesterov_example();
    const MapDifferential dg = dg_gradient_descent(*nest, 0.1, vec({0, 0}));
    CHECK((dg.matrix - mat(2, 2, {0.9, 0, 0, 1.1})).norm() <= 1e-15);
    const Vector ev = sorted_real(spectral_report(dg));
    CHECK(std::abs(ev[0] - 0.9) <= 1e-12);
    CHECK(std::abs(ev[1] - 1.1) <= 1e-12);

    Engine eng(61);
    for (int k = 0; k < 20; ++k) {
        const Matrix m = dg_gradient_descent(*nest, 0.05, random_point(nest->domain(), eng)).matrix;
        CHECK((m - m.transpose()).norm() <= 1e-12);
    }
    CHECK(dg_gradient_descent(*nest, 0.0, vec({0.3, 0.7})).matrix == Matrix::Identity(2, 2));

    const Matrix h = mat(3, 3, {2, 0.5, 0, 0.5, -1, 0.2, 0, 0.2, 1.5});
    const auto q = make_quadratic(h);
    const double alpha = 0.9 / q->constants().L;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    double prod = 1.0;
    for (int i = 0; i < 3; ++i) prod *= 1 - alpha * es.eigenvalues()[i];
    const SpectralReport rep = spectral_report(dg_gradient_descent(*q, alpha, vec({1, 2, 3})));
    CHECK(rep.det == doctest::Approx(prod).epsilon(1e-13));
    CHECK(rep.det > 0);
}

TEST_CASE("proximal point differential") {
    const auto q = make_quadratic(mat(2, 2, {1, 0, 0, -1}));
    Engine eng(67);
    for (int k = 0; k < 10; ++k) {
        const Matrix m = dg_proximal_point(*q, 0.25, random_point(q->domain(), eng)).matrix;
        CHECK((m - mat(2, 2, {0.8, 0, 0, 4.0 / 3})).norm() <= 1e-12);
    }
    // At a strict saddle the negative direction maps to 1/(1 + alpha lambda) > 1.
    const auto nest = make_nesterov_example();
    const SpectralReport rep = spectral_report(dg_proximal_point(*nest, 0.05, vec({0, 0})));
    CHECK(rep.spectral_radius == doctest::Approx(1 / (1 - 0.05)).epsilon(1e-12));
    CHECK(rep.is_unstable);
    CHECK((dg_proximal_point(*nest, 0.0, vec({0.5, 0.5})).matrix - Matrix::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("proximal point differential detects a singular system") {
    // Zero gradient keeps prox(x) = x; the Hessian oracle makes Id + alpha H vanish.
    const auto odd = std::make_shared<ObjectiveProblem>(
        "singular", DomainDescriptor::euclidean(2), [](const Vector&) { return 0.0; },
        [](const Vector& x) { return Vector::Zero(x.size()); },
        [](const Vector&) { return mat(2, 2, {-2, 0, 0, 1}); }, LipschitzConstants{});
    CHECK_THROWS_AS(dg_proximal_point(*odd, 0.5, vec({1, 1})), SingularMatrix);
}

TEST_CASE("coordinate descent differential") {
    const Vector lambda = vec({1.5, -0.5, 2});
    const auto diag = make_quadratic(lambda.asDiagonal().toDenseMatrix());
    const Matrix j = dg_coordinate_descent(*diag, 0.3, vec({1, 2, 3})).matrix;
    CHECK((j - (Vector::Ones(3) - 0.3 * lambda).asDiagonal().toDenseMatrix()).norm() <= 1e-15);
    CHECK(dg_coordinate_descent(*diag, 0.0, vec({1, 2, 3})).matrix == Matrix::Identity(3, 3));

    // Explicit product of the two rank-one factors for a 2x2 quadratic.
    const Matrix h = mat(2, 2, {1, 2, 2, 1});
    const auto q = make_quadratic(h);
    const double a = 0.2;
    const Matrix e1 = mat(2, 2, {1, 0, 0, 0}), e2 = mat(2, 2, {0, 0, 0, 1});
    const Matrix want = (Matrix::Identity(2, 2) - a * e2 * h) * (Matrix::Identity(2, 2) - a * e1 * h);
    const MapDifferential dg = dg_coordinate_descent(*q, a, vec({0, 0}));
    CHECK((dg.matrix - want).norm() <= 1e-15);
    CHECK(spectral_report(dg).spectral_radius > 1.0);

    const auto trace = cd_sweep_traced(*q, a, vec({0.3, -0.2}));
    CHECK(dg_coordinate_descent(*q, a, vec({0.3, -0.2}), &trace.intermediates).matrix ==
          dg_coordinate_descent(*q, a, vec({0.3, -0.2})).matrix);
    std::vector<Vector> wrong(1, vec({0, 0}));
    CHECK_THROWS_AS(dg_coordinate_descent(*q, a, vec({0, 0}), &wrong), InvalidArgument);
}

TEST_CASE("block coordinate descent differential") {
    Engine eng(71);
    for (const auto& entry : fixture_catalog()) {
        const auto& p = entry.problem;
        if (p->domain().kind() != DomainKind::Euclidean) continue;
        const double alpha = 0.5 / p->constants().L;
        for (int k = 0; k < 20; ++k) {
            const Vector x = random_point(p->domain(), eng);
            CHECK((dg_block_coordinate_descent(*p, alpha, x, BlockPartition::single_block(p->dim())).matrix -
                   dg_gradient_descent(*p, alpha, x).matrix)
                      .norm() <= 1e-15);
            CHECK((dg_block_coordinate_descent(*p, alpha, x, BlockPartition::singletons(p->dim())).matrix -
                   dg_coordinate_descent(*p, alpha, x).matrix)
                      .lpNorm<Eigen::Infinity>() <= 1e-14);
        }
    }
    const auto c4 = make_coupled_nesterov(4);
    const BlockPartition halves({{0, 1}, {2, 3}}, 4);
    const double alpha = 0.9 / c4->constants().L_b(halves);
    for (int k = 0; k < 50; ++k) {
        const Vector x = random_point(c4->domain(), eng);
        CHECK(spectral_report(dg_block_coordinate_descent(*c4, alpha, x, halves)).det > 0);
    }
}

TEST_CASE("manifold gradient descent differential at fixed points") {
    const auto sph = fixture_by_name("sphere-rayleigh:2");
    const MapDifferential at_saddle = dg_manifold_gd_at_fixed_point(*sph, 0.1, vec({0, 1}));
    REQUIRE(at_saddle.matrix.rows() == 1);
    CHECK(at_saddle.matrix(0, 0) == doctest::Approx(1.2).epsilon(1e-14));
    CHECK(spectral_report(at_saddle).is_unstable);
    const MapDifferential at_min = dg_manifold_gd_at_fixed_point(*sph, 0.1, vec({1, 0}));
    CHECK(at_min.matrix(0, 0) == doctest::Approx(0.8).epsilon(1e-14));
    CHECK_FALSE(spectral_report(at_min).is_unstable);

    const auto s3 = fixture_by_name("sphere-rayleigh:3");
    CHECK((dg_manifold_gd_at_fixed_point(*s3, 0.0, vec({0, 1, 0})).matrix - Matrix::Identity(2, 2)).norm() <= 1e-15);
    CHECK_THROWS_AS(dg_manifold_gd_at_fixed_point(*sph, 0.1, vec({0.6, 0.8})), NotAFixedPoint);
    CHECK_THROWS_AS(dg_manifold_gd_at_fixed_point(*sph, 0.1, vec({0, 2})), DomainViolation);
}

TEST_CASE("mirror descent differential at fixed points") {
    const auto nest = make_nesterov_example();
    for (const auto& cp : nest->known_critical_points())
        CHECK(dg_mirror_descent_at_fixed_point(*nest, 0.05, cp.point, MirrorMap::Euclidean).matrix ==
              dg_gradient_descent(*nest, 0.05, cp.point).matrix);

    const auto simp = fixture_by_name("simplex-quadratic:3");
    const Vector c = Vector::Constant(3, 1.0 / 3);
    const SpectralReport rep = spectral_report(dg_mirror_descent_at_fixed_point(*simp, 0.3, c, MirrorMap::Entropy));
    CHECK(rep.is_unstable);
    // A = 3 Id on the tangent space, so the eigenvalues are 1 -+ 0.1 sqrt(7).
    const Vector ev = sorted_real(rep);
    CHECK(ev[0] == doctest::Approx(1 - 0.1 * std::sqrt(7.0)).epsilon(1e-13));
    CHECK(ev[1] == doctest::Approx(1 + 0.1 * std::sqrt(7.0)).epsilon(1e-13));

    CHECK((dg_mirror_descent_at_fixed_point(*simp, 0.0, c, MirrorMap::Entropy).matrix - Matrix::Identity(2, 2))
              .norm() <= 1e-15);
    CHECK_THROWS_AS(dg_mirror_descent_at_fixed_point(*simp, 0.3, vec({0.2, 0.3, 0.5}), MirrorMap::Entropy),
                    NotAFixedPoint);
    CHECK_THROWS_AS(dg_mirror_descent_at_fixed_point(*simp, 0.3, vec({0.5, 0.6, -0.1}), MirrorMap::Entropy),
                    DomainViolation);
}

TEST_CASE("mirror descent eigenvalues are invariant under symmetrization") {
    // Non-uniform interior critical point: Q = diag(1/x) + 4 n n^T with n
    // orthogonal to x gives Q x = (1, ..., 1).
    const Vector x = vec({0.5, 0.3, 0.2});
    const Vector n = vec({0.3, -0.5, 0.0});
    Matrix q = x.cwiseInverse().asDiagonal().toDenseMatrix() + 4.0 * n * n.transpose();
    const ObjectiveProblem p("weighted", DomainDescriptor::simplex_interior(3),
                             [q](const Vector& y) { return 0.5 * y.dot(q * y); },
                             [q](const Vector& y) { return Vector(q * y); }, [q](const Vector&) { return q; },
                             LipschitzConstants{});
    REQUIRE(riemannian_gradient(p, x).norm() <= 1e-12);
    for (double alpha : {0.05, 0.2, 0.7}) {
        const Vector a = sorted_real(spectral_report(dg_mirror_descent_at_fixed_point(p, alpha, x, MirrorMap::Entropy)));
        const Matrix s = mirror_descent_symmetrized(p, alpha, x, MirrorMap::Entropy);
        CHECK((s - s.transpose()).norm() <= 1e-14);
        Eigen::SelfAdjointEigenSolver<Matrix> es(s);
        CHECK((a - es.eigenvalues()).norm() <= 1e-10);
    }
}

TEST_CASE("finite-difference differential") {
    const Matrix h = mat(2, 2, {1, 2, 2, 1});
    const auto q = make_quadratic(h);
    const OptimizerMap gd(Method::GradientDescent, 0.2, q);
    const Matrix want = Matrix::Identity(2, 2) - 0.2 * h;
    CHECK(relative_frobenius_error(fd_differential(gd, vec({0.4, -1.3})).matrix, want) <= 1e-9);

    for (const auto& entry : fixture_catalog()) {
        const auto& p = entry.problem;
        Method m = Method::GradientDescent;
        if (p->domain().kind() == DomainKind::UnitSphere) m = Method::ManifoldGradientDescent;
        if (p->domain().kind() == DomainKind::SimplexInterior) m = Method::MirrorDescentEntropy;
        const OptimizerMap id(m, 0.0, p, std::nullopt, true);
        Engine eng(73);
        const Vector x = random_point(p->domain(), eng);
        const Matrix j = fd_differential(id, x).matrix;
        const auto n = p->domain().tangent_dim();
        CHECK((j - Matrix::Identity(n, n)).norm() <= 1e-10);
    }
    CHECK_THROWS_AS(fd_differential(gd, vec({0, 0}), 0.0), InvalidArgument);
    CHECK_THROWS_AS(fd_differential(gd, vec({0, 0, 0})), DomainViolation);
}

TEST_CASE("analytic and finite-difference differentials agree for euclidean methods") {
    Engine eng(79);
    for (const auto& entry : fixture_catalog()) {
        const auto& p = entry.problem;
        if (p->domain().kind() != DomainKind::Euclidean) continue;
        for (const auto& map : euclidean_maps(p)) {
            CAPTURE(p->name());
            CAPTURE(to_string(map.method()));
            for (int k = 0; k < 50; ++k) {
                const Vector x = random_point(p->domain(), eng);
                CHECK(relative_frobenius_error(fd_differential(map, x).matrix, analytic_differential(map, x).matrix) <=
                      1e-5);
            }
        }
    }
}

TEST_CASE("analytic and finite-difference differentials agree at manifold fixed points") {
    for (const auto& entry : fixture_catalog()) {
        const auto& p = entry.problem;
        if (p->domain().kind() == DomainKind::Euclidean) continue;
        const Method m = p->domain().kind() == DomainKind::UnitSphere ? Method::ManifoldGradientDescent
                                                                       : Method::MirrorDescentEntropy;
        const OptimizerMap map(m, 0.5 / p->constants().L, p);
        for (const auto& cp : p->known_critical_points()) {
            CAPTURE(p->name());
            const MapDifferential a = analytic_differential(map, cp.point);
            const MapDifferential f = fd_differential(map, cp.point);
            // Both are expressed in the same tangent basis at the fixed point.
            CHECK(relative_frobenius_error(f.matrix, a.matrix) <= 1e-5);
        }
    }
}

TEST_CASE("spectral report") {
    const SpectralReport a = spectral_report(mat(2, 2, {0.9, 0, 0, 1.1}));
    CHECK(a.spectral_radius == doctest::Approx(1.1).epsilon(1e-15));
    CHECK(a.is_unstable);
    CHECK(a.det == doctest::Approx(0.99).epsilon(1e-15));
    CHECK(a.det_nonzero);
    CHECK(a.det_sign == 1);
    CHECK(a.eigenvalues.front().real() == doctest::Approx(1.1));

    const SpectralReport id = spectral_report(Matrix::Identity(3, 3));
    CHECK(id.spectral_radius == 1.0);
    CHECK_FALSE(id.is_unstable);
    CHECK(id.det == 1.0);

    // Rotation by 90 degrees scaled by 1.5: complex pair of modulus 1.5.
    const SpectralReport rot = spectral_report(mat(2, 2, {0, -1.5, 1.5, 0}));
    CHECK(rot.spectral_radius == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(std::abs(rot.eigenvalues[0].imag()) == doctest::Approx(1.5));
    CHECK(rot.eigenvalues[0].imag() > 0);

    const SpectralReport sing = spectral_report(mat(2, 2, {1, 2, 2, 4}));
    CHECK_FALSE(sing.det_nonzero);
    const SpectralReport neg = spectral_report(mat(2, 2, {-2, 0, 0, 0.5}));
    CHECK(neg.det_sign == -1);
    CHECK(neg.log_abs_det == doctest::Approx(0.0).epsilon(1e-15).scale(1.0));

    // Tolerances move the verdict.
    CHECK_FALSE(spectral_report(mat(1, 1, {1 + 1e-10})).is_unstable);
    CHECK(spectral_report(mat(1, 1, {1 + 1e-10}), 1e-11).is_unstable);

    CHECK_THROWS_AS(spectral_report(Matrix(2, 3)), InvalidArgument);
    CHECK_THROWS_AS(spectral_report(mat(1, 1, {NAN})), InvalidArgument);

    Engine eng(83);
    for (int k = 0; k < 50; ++k) {
        Matrix m(4, 4);
        for (int i = 0; i < 16; ++i) m.data()[i] = uniform(eng, -2, 2);
        const SpectralReport r = spectral_report(m);
        double mx = 0;
        for (const auto& z : r.eigenvalues) mx = std::max(mx, std::abs(z));
        CHECK(std::abs(r.spectral_radius - mx) <= 1e-12);
        for (std::size_t i = 1; i < r.eigenvalues.size(); ++i)
            CHECK(std::abs(r.eigenvalues[i - 1]) >= std::abs(r.eigenvalues[i]));
        CHECK(r.det == doctest::Approx(m.determinant()).epsilon(1e-10));
    }
}

TEST_CASE("relative frobenius error") {
    CHECK(relative_frobenius_error(mat(1, 1, {2}), mat(1, 1, {1})) == 1.0);
    CHECK(relative_frobenius_error(mat(1, 1, {1e-3}), Matrix::Zero(1, 1)) == 1e-3);
    CHECK(relative_frobenius_error(Matrix::Zero(2, 2), Matrix::Zero(2, 2)) == 0.0);
}

TEST_CASE("fixed point report") {
    const auto nest = make_nesterov_example();
    const OptimizerMap gd(Method::GradientDescent, 0.1, nest);
    const FixedPointReport r = fixed_point_report(*nest, vec({0, 0}), {}, &gd);
    CHECK(r.gradient_residual == 0.0);
    CHECK(r.classification == CriticalClass::StrictSaddle);
    REQUIRE(r.dg_spectrum);
    CHECK(r.dg_spectrum->is_unstable);
    CHECK(r.hessian_eigenvalues[0] == -1.0);
    CHECK_FALSE(fixed_point_report(*nest, vec({1, 1})).dg_spectrum);
}
