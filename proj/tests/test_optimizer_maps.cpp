#include <cmath>
#include <numbers>

#include "saddle/optimizer_maps.hpp"
#include "saddle/problems.hpp"
#include "test_support.hpp"

using namespace saddle;
using saddle::testing::mat;
using saddle::testing::random_point;
using saddle::testing::vec;

namespace {

ProblemPtr gradient_oracle_on_simplex(int dim, Vector grad) {
    return std::make_shared<ObjectiveProblem>(
        "linear", DomainDescriptor::simplex_interior(dim), [grad](const Vector& x) { return grad.dot(x); },
        [grad](const Vector&) { return grad; }, [](const Vector& x) { return Matrix::Zero(x.size(), x.size()); },
        LipschitzConstants{});
}

std::vector<ProblemPtr> euclidean_fixtures() {
    std::vector<ProblemPtr> out;
    for (const auto& e : fixture_catalog())
        if (e.problem->domain().kind() == DomainKind::Euclidean) out.push_back(e.problem);
    return out;
}

}  // namespace

TEST_CASE("method names round-trip") {
    for (Method m : {Method::GradientDescent, Method::ProximalPoint, Method::CoordinateDescent,
                     Method::BlockCoordinateDescent, Method::ManifoldGradientDescent, Method::MirrorDescentEntropy,
                     Method::MirrorDescentEuclidean})
        CHECK(parse_method(to_string(m)) == m);
    CHECK(parse_method("mirror-entropy") == Method::MirrorDescentEntropy);
    CHECK_THROWS_AS(parse_method("newton"), ConfigError);
}

TEST_CASE("gradient descent examples") {
    const auto nest = make_nesterov_example();
    const Vector y = gd_step(*nest, 0.1, vec({1, 0.5}));
    CHECK(y[0] == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(y[1] == doctest::Approx(1.1 * 0.5 - 0.1 * 0.125).epsilon(1e-15));
    for (const auto& cp : nest->known_critical_points()) CHECK(gd_step(*nest, 0.1, cp.point) == cp.point);

    const auto q = make_quadratic(mat(2, 2, {1, 0, 0, -1}));
    const Vector z = gd_step(*q, 0.5, vec({1, 1}));
    CHECK(z[0] == 0.5);
    CHECK(z[1] == 1.5);
}

TEST_CASE("gradient descent reports non-finite iterates") {
    const auto q = make_quadratic(mat(1, 1, {1}));
    CHECK_THROWS_AS(gd_step(*q, 1e308, vec({1e10})), NonFiniteIterate);
}

TEST_CASE("proximal point examples") {
    for (double lambda : {0.5, 1.0, 3.0})
        for (double alpha : {0.1, 0.25, 1.0}) {
            const auto q = make_quadratic(mat(1, 1, {lambda}));
            const Vector z = prox_step(*q, alpha, vec({2.0}));
            CHECK(z[0] == doctest::Approx(2.0 / (1 + alpha * lambda)).epsilon(1e-14));
        }
    const auto q = make_quadratic(mat(2, 2, {1, 0, 0, -1}));
    const Vector z = prox_step(*q, 0.25, vec({1, 1}));
    CHECK(z[0] == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(z[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));

    const auto nest = make_nesterov_example();
    for (const auto& cp : nest->known_critical_points())
        CHECK((prox_step(*nest, 0.05, cp.point) - cp.point).norm() <= 1e-10);
}

TEST_CASE("proximal point satisfies the optimality identity") {
    Engine eng(29);
    for (const auto& p : euclidean_fixtures()) {
        const double alpha = 0.9 / p->constants().L;
        for (int k = 0; k < 50; ++k) {
            const Vector x = random_point(p->domain(), eng);
            CHECK(prox_residual(*p, alpha, x, prox_step(*p, alpha, x)) <= 1e-10);
        }
    }
}

TEST_CASE("proximal point reports a failed inner solve") {
    // Id + alpha H is singular for alpha = 1 and H = -1.
    const auto q = make_quadratic(mat(1, 1, {-1}));
    CHECK_THROWS_AS(prox_step(*q, 1.0, vec({1.0})), InnerSolveFailure);
    // A one-iteration cap cannot reach the tolerance on a quartic.
    const auto nest = make_nesterov_example();
    CHECK_THROWS_AS(prox_step(*nest, 0.05, vec({0.3, 1.7}), ProxOptions{1, 1e-14}), InnerSolveFailure);
}

TEST_CASE("coordinate descent examples") {
    const auto diag = make_quadratic(mat(2, 2, {2, 0, 0, -0.5}));
    const Vector x = vec({0.7, -1.3});
    const Vector y = cd_sweep(*diag, 0.3, x);
    CHECK(y[0] == doctest::Approx((1 - 0.3 * 2) * 0.7).epsilon(1e-15));
    CHECK(y[1] == doctest::Approx((1 + 0.3 * 0.5) * -1.3).epsilon(1e-15));

    const auto q = make_quadratic(mat(2, 2, {2, 1, 1, 2}));
    const Vector z = cd_sweep(*q, 0.1, vec({1, 1}));
    CHECK(z[0] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(z[1] == doctest::Approx(0.73).epsilon(1e-15));

    const auto trace = cd_sweep_traced(*q, 0.1, vec({1, 1}));
    REQUIRE(trace.intermediates.size() == 2);
    CHECK(trace.intermediates[0] == vec({1, 1}));
    CHECK(trace.intermediates[1][0] == doctest::Approx(0.7));
    CHECK(trace.intermediates[1][1] == 1.0);

    const auto nest = make_nesterov_example();
    for (const auto& cp : nest->known_critical_points()) CHECK(cd_sweep(*nest, 0.05, cp.point) == cp.point);
}

TEST_CASE("block coordinate descent examples") {
    Engine eng(31);
    for (const auto& p : euclidean_fixtures()) {
        const double alpha = 0.5 / p->constants().L;
        const auto whole = BlockPartition::single_block(p->dim());
        const auto singles = BlockPartition::singletons(p->dim());
        for (int k = 0; k < 100; ++k) {
            const Vector x = random_point(p->domain(), eng);
            CHECK((bcd_sweep(*p, alpha, x, whole) - gd_step(*p, alpha, x)).norm() == 0.0);
            CHECK((bcd_sweep(*p, alpha, x, singles) - cd_sweep(*p, alpha, x)).lpNorm<Eigen::Infinity>() <= 1e-14);
        }
    }
    const Vector lambda = vec({1, -2, 0.5, 3});
    const auto diag = make_quadratic(lambda.asDiagonal().toDenseMatrix());
    const Vector x = vec({1, 2, 3, 4});
    for (const auto& blocks : std::vector<std::vector<std::vector<int>>>{{{0, 1}, {2, 3}}, {{3}, {1, 0, 2}}}) {
        const Vector y = bcd_sweep(*diag, 0.2, x, BlockPartition(blocks, 4));
        for (int i = 0; i < 4; ++i) CHECK(y[i] == doctest::Approx((1 - 0.2 * lambda[i]) * x[i]).epsilon(1e-15));
    }
}

TEST_CASE("block order follows the declaration") {
    const auto q = make_quadratic(mat(2, 2, {2, 1, 1, 2}));
    const Vector fwd = bcd_sweep(*q, 0.1, vec({1, 1}), BlockPartition({{0}, {1}}, 2));
    const Vector rev = bcd_sweep(*q, 0.1, vec({1, 1}), BlockPartition({{1}, {0}}, 2));
    CHECK(fwd[0] == doctest::Approx(0.7));
    CHECK(rev[1] == doctest::Approx(0.7));
    CHECK(rev[0] == doctest::Approx(0.73));
}

TEST_CASE("manifold gradient descent examples") {
    const auto sph = fixture_by_name("sphere-rayleigh:2");
    CHECK((manifold_gd_step(*sph, 0.1, vec({1, 0})) - vec({1, 0})).norm() == 0.0);
    CHECK((manifold_gd_step(*sph, 0.1, vec({0, -1})) - vec({0, -1})).norm() == 0.0);

    // Hand-evaluated: grad = (2x1, 4x2), projection removes the radial part.
    const double r = 1 / std::sqrt(2.0);
    const Vector x = vec({r, r});
    const Vector g = vec({2 * r, 4 * r});
    const Vector v = x - 0.1 * (g - x.dot(g) * x);
    const Vector y = manifold_gd_step(*sph, 0.1, x);
    CHECK((y - v / v.norm()).norm() <= 1e-15);
    CHECK(std::abs(y.norm() - 1) <= 1e-12);

    const OptimizerMap zero(Method::ManifoldGradientDescent, 0.0, sph, std::nullopt, true);
    CHECK((zero(x) - x).norm() <= 1e-15);
}

TEST_CASE("manifold step length never drops below one") {
    // The projected gradient is orthogonal to x, so |x - alpha P grad| >= 1
    // and the retraction is always defined for finite input.
    const auto sph = make_sphere_rayleigh(mat(2, 2, {0, 0, 0, 1}));
    const double r = 1 / std::sqrt(2.0);
    for (double alpha : {1e-3, 1.0, 1e6}) {
        const Vector y = manifold_gd_step(*sph, alpha, vec({r, r}));
        CHECK(std::abs(y.norm() - 1) <= 1e-12);
    }
}

TEST_CASE("sphere preservation under manifold gradient descent") {
    Engine eng(37);
    const auto sph = fixture_by_name("sphere-rayleigh:3");
    for (int k = 0; k < 100; ++k) {
        Vector x = random_point(sph->domain(), eng);
        for (int t = 0; t < 100; ++t) {
            x = manifold_gd_step(*sph, 0.1, x);
            REQUIRE(std::abs(x.norm() - 1) <= 1e-12);
        }
    }
}

TEST_CASE("multiplicative weights examples") {
    const auto flat = gradient_oracle_on_simplex(3, Vector::Constant(3, 4.2));
    const Vector u = Vector::Constant(3, 1.0 / 3);
    CHECK((mirror_descent_entropy_step(*flat, 0.7, u) - u).norm() <= 1e-16);

    const auto e1 = gradient_oracle_on_simplex(2, vec({1, 0}));
    const Vector y = mirror_descent_entropy_step(*e1, std::numbers::ln2, vec({0.5, 0.5}));
    CHECK(y[0] == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(y[1] == doctest::Approx(2.0 / 3).epsilon(1e-15));
}

TEST_CASE("multiplicative weights stays finite for huge steps") {
    const auto e1 = gradient_oracle_on_simplex(2, vec({1, 0}));
    const Vector y = mirror_descent_entropy_step(*e1, 1e4, vec({0.5, 0.5}));
    CHECK(y.allFinite());
    CHECK(y[1] == 1.0);
    CHECK(y[0] < kSimplexUnderflow);
}

TEST_CASE("simplex preservation under multiplicative weights") {
    Engine eng(41);
    const auto simp = fixture_by_name("simplex-isotropic:4");
    for (int k = 0; k < 100; ++k) {
        const Vector x = random_point(simp->domain(), eng);
        const Vector y = mirror_descent_entropy_step(*simp, 0.5, x);
        CHECK(y.minCoeff() > 0);
        CHECK(std::abs(y.sum() - 1) <= 1e-12);
    }
}

TEST_CASE("euclidean mirror descent equals gradient descent") {
    Engine eng(43);
    for (const auto& p : euclidean_fixtures())
        for (int k = 0; k < 100; ++k) {
            const Vector x = random_point(p->domain(), eng);
            CHECK((mirror_descent_euclidean_step(*p, 0.05, x) - gd_step(*p, 0.05, x)).lpNorm<Eigen::Infinity>() <=
                  1e-15);
        }
}

TEST_CASE("critical points are fixed points of every compatible method") {
    for (const auto& entry : fixture_catalog()) {
        const auto& p = entry.problem;
        std::vector<Method> methods;
        switch (p->domain().kind()) {
            case DomainKind::Euclidean:
                methods = {Method::GradientDescent, Method::ProximalPoint, Method::CoordinateDescent,
                           Method::BlockCoordinateDescent, Method::MirrorDescentEuclidean};
                break;
            case DomainKind::UnitSphere: methods = {Method::ManifoldGradientDescent}; break;
            case DomainKind::SimplexInterior: methods = {Method::MirrorDescentEntropy}; break;
        }
        for (Method m : methods) {
            std::optional<BlockPartition> part;
            if (m == Method::BlockCoordinateDescent) part = BlockPartition::single_block(p->dim());
            const OptimizerMap g(m, 0.5 / p->constants().L, p, part);
            for (const auto& cp : p->known_critical_points()) {
                CAPTURE(p->name());
                CAPTURE(to_string(m));
                CHECK((g(cp.point) - cp.point).norm() <= 1e-10);
            }
        }
    }
}

TEST_CASE("gradient descent decreases f for admissible steps") {
    Engine eng(47);
    for (const auto& p : euclidean_fixtures()) {
        const double alpha = 0.99 / p->constants().L;
        for (int k = 0; k < 100; ++k) {
            const Vector x = random_point(p->domain(), eng);
            CHECK(p->value(gd_step(*p, alpha, x)) <= p->value(x) + 1e-12);
        }
    }
}

TEST_CASE("optimizer map validation") {
    const auto nest = make_nesterov_example();
    const auto sph = fixture_by_name("sphere-rayleigh:2");
    const auto simp = fixture_by_name("simplex-quadratic:3");
    CHECK_THROWS_AS(OptimizerMap(Method::GradientDescent, 0.0, nest), InvalidArgument);
    CHECK_THROWS_AS(OptimizerMap(Method::GradientDescent, -0.1, nest), InvalidArgument);
    CHECK_THROWS_AS(OptimizerMap(Method::GradientDescent, NAN, nest), InvalidArgument);
    CHECK_THROWS_AS(OptimizerMap(Method::ManifoldGradientDescent, 0.1, nest), InvalidArgument);
    CHECK_THROWS_AS(OptimizerMap(Method::MirrorDescentEntropy, 0.1, sph), InvalidArgument);
    CHECK_THROWS_AS(OptimizerMap(Method::GradientDescent, 0.1, simp), InvalidArgument);
    CHECK_THROWS_AS(OptimizerMap(Method::CoordinateDescent, 0.1, sph), InvalidArgument);
    CHECK_THROWS_AS(OptimizerMap(Method::BlockCoordinateDescent, 0.1, nest), InvalidArgument);
    CHECK_THROWS_AS(OptimizerMap(Method::BlockCoordinateDescent, 0.1, nest, BlockPartition::singletons(3)),
                    InvalidArgument);
    CHECK_NOTHROW(OptimizerMap(Method::ManifoldGradientDescent, 0.1, sph));
    CHECK_NOTHROW(OptimizerMap(Method::MirrorDescentEntropy, 0.1, simp));

    const OptimizerMap cd(Method::CoordinateDescent, 0.1, nest);
    REQUIRE(cd.partition());
    CHECK(*cd.partition() == BlockPartition::singletons(2));
    const OptimizerMap gd(Method::GradientDescent, 0.1, nest, BlockPartition::singletons(2));
    CHECK_FALSE(gd.partition());

    CHECK_THROWS_AS(gd(vec({1, 2, 3})), DomainViolation);
    const OptimizerMap mw(Method::MirrorDescentEntropy, 0.1, simp);
    CHECK_THROWS_AS(mw(vec({0.5, 0.6, -0.1})), DomainViolation);
    CHECK(gd.with_alpha(0.05).alpha() == 0.05);
    CHECK(gd.with_alpha(0.0)(vec({0.3, 0.4})) == vec({0.3, 0.4}));
    CHECK_THROWS_AS(gd.with_alpha(-1.0), InvalidArgument);
}

TEST_CASE("step-size bounds") {
    const auto nest = make_nesterov_example();
    const auto c4 = make_coupled_nesterov(4);
    const auto sph = fixture_by_name("sphere-rayleigh:3");
    const auto simp = fixture_by_name("simplex-quadratic:3");

    CHECK(*step_size_bound(Method::GradientDescent, *nest).bound == doctest::Approx(1.0 / 11));
    CHECK(*step_size_bound(Method::ProximalPoint, *nest).bound == doctest::Approx(1.0 / 11));
    CHECK(*step_size_bound(Method::MirrorDescentEuclidean, *nest).bound == doctest::Approx(1.0 / 11));
    CHECK(*step_size_bound(Method::CoordinateDescent, *c4).bound == doctest::Approx(1.0 / c4->constants().L_max));
    const BlockPartition halves({{0, 1}, {2, 3}}, 4);
    CHECK(*step_size_bound(Method::BlockCoordinateDescent, *c4, halves).bound ==
          doctest::Approx(1.0 / c4->constants().L_b(halves)));
    CHECK(*step_size_bound(Method::MirrorDescentEntropy, *simp).bound == doctest::Approx(1.0 / std::sqrt(7.0)));
    CHECK_FALSE(step_size_bound(Method::ManifoldGradientDescent, *sph).bound);

    const StepSizeBound b = step_size_bound(Method::GradientDescent, *nest);
    CHECK(b.validate(0.09) == StepSizeVerdict::Admissible);
    CHECK(b.validate(1.0 / 11) == StepSizeVerdict::Inadmissible);
    CHECK(b.validate(0.1) == StepSizeVerdict::Inadmissible);
    CHECK(step_size_bound(Method::ManifoldGradientDescent, *sph).validate(0.1) == StepSizeVerdict::Unknown);
    CHECK(OptimizerMap(Method::GradientDescent, 0.1, nest).step_size_bound().bound == b.bound);
}

TEST_CASE("curvature constants dominate sampled curvature") {
    Engine eng(53);
    for (const auto& entry : fixture_catalog()) {
        const auto& p = *entry.problem;
        const auto& c = p.constants();
        CHECK(c.L >= c.L_max - 1e-12);
        for (int k = 0; k < 1000; ++k) {
            Vector x = random_point(p.domain(), eng);
            if (p.region()) {
                // Sample the whole trust region, not just the unit box.
                x *= p.region()->radius / (p.region()->norm == TrustRegion::Norm::Two ? std::sqrt(p.dim()) : 1.0);
                if (!p.region()->contains(x)) continue;
            }
            const Matrix h = p.domain().kind() == DomainKind::Euclidean ? p.hessian(x) : tangent_hessian(p, x);
            Eigen::SelfAdjointEigenSolver<Matrix> es(h);
            CHECK(es.eigenvalues().cwiseAbs().maxCoeff() <= c.L + 1e-12);
            if (p.domain().kind() == DomainKind::Euclidean) {
                CHECK(h.diagonal().cwiseAbs().maxCoeff() <= c.L_max + 1e-12);
                if (p.dim() == 4) {
                    const BlockPartition halves({{0, 1}, {2, 3}}, 4);
                    for (const auto& blk : halves.blocks()) {
                        Matrix sub(2, 2);
                        for (int i = 0; i < 2; ++i)
                            for (int j = 0; j < 2; ++j) sub(i, j) = h(blk[i], blk[j]);
                        Eigen::SelfAdjointEigenSolver<Matrix> bs(sub);
                        CHECK(bs.eigenvalues().cwiseAbs().maxCoeff() <= c.L_b(halves) + 1e-12);
                    }
                }
            }
        }
    }
}
