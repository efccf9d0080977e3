#include "saddle/problems.hpp"

#include <algorithm>
#include <cmath>

#include "saddle/parse.hpp"
#include "saddle/seeding.hpp"

namespace saddle {

namespace {

constexpr double kSingularTol = 1e-8;

Vector symmetric_eigenvalues(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw EigensolverFailure("symmetric eigensolve failed");
    return es.eigenvalues();
}

double spectral_norm_symmetric(const Matrix& m) { return symmetric_eigenvalues(m).cwiseAbs().maxCoeff(); }

void require_symmetric(const Matrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0) throw InvalidArgument(std::string(what) + " must be square");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()))
        throw InvalidArgument(std::string(what) + " must be symmetric");
}

double positive_or(double v, double fallback) { return v > 0.0 ? v : fallback; }

}  // namespace

ProblemPtr make_quadratic(const Matrix& h_in, std::string name) {
    require_symmetric(h_in, "quadratic Hessian");
    const Matrix h = 0.5 * (h_in + h_in.transpose());
    const int d = static_cast<int>(h.rows());
    const Vector eig = symmetric_eigenvalues(h);

    LipschitzConstants c;
    c.L = positive_or(eig.cwiseAbs().maxCoeff(), 1e-12);
    c.L_max = positive_or(h.diagonal().cwiseAbs().maxCoeff(), 1e-12);
    c.block_bound = [h](const BlockPartition& partition) {
        double lb = 0.0;
        for (const auto& block : partition.blocks()) {
            Matrix sub(block.size(), block.size());
            for (std::size_t a = 0; a < block.size(); ++a)
                for (std::size_t b = 0; b < block.size(); ++b) sub(a, b) = h(block[a], block[b]);
            lb = std::max(lb, spectral_norm_symmetric(sub));
        }
        return positive_or(lb, 1e-12);
    };

    std::vector<KnownCriticalPoint> cps;
    const double lmin = eig.minCoeff();
    if (lmin < -kSingularTol) {
        cps.push_back({Vector::Zero(d), CriticalLabel::StrictSaddle});
    } else if (lmin > kSingularTol) {
        cps.push_back({Vector::Zero(d), CriticalLabel::LocalMin});
    }

    return std::make_shared<ObjectiveProblem>(
        std::move(name), DomainDescriptor::euclidean(d), [h](const Vector& x) { return 0.5 * x.dot(h * x); },
        [h](const Vector& x) -> Vector { return h * x; }, [h](const Vector&) -> Matrix { return h; }, std::move(c),
        std::move(cps));
}

ProblemPtr make_nesterov_example() {
    auto value = [](const Vector& v) {
        const double x = v[0], y = v[1];
        return 0.5 * x * x + 0.25 * y * y * y * y - 0.5 * y * y;
    };
    auto gradient = [](const Vector& v) -> Vector {
        Vector g(2);
        g << v[0], v[1] * v[1] * v[1] - v[1];
        return g;
    };
    auto hessian = [](const Vector& v) -> Matrix {
        Matrix h = Matrix::Zero(2, 2);
        h(0, 0) = 1.0;
        h(1, 1) = 3.0 * v[1] * v[1] - 1.0;
        return h;
    };
    // sup over [-2,2]^2 of |3y^2 - 1| is 11.
    LipschitzConstants c;
    c.L = 11.0;
    c.L_max = 11.0;
    std::vector<KnownCriticalPoint> cps = {
        {Vector::Zero(2), CriticalLabel::StrictSaddle},
        {(Vector(2) << 0.0, -1.0).finished(), CriticalLabel::LocalMin},
        {(Vector(2) << 0.0, 1.0).finished(), CriticalLabel::LocalMin},
    };
    return std::make_shared<ObjectiveProblem>("nesterov", DomainDescriptor::euclidean(2), value, gradient, hessian,
                                              std::move(c), std::move(cps),
                                              TrustRegion{TrustRegion::Norm::Infinity, 2.0});
}

ProblemPtr make_coupled_nesterov(int dim) {
    if (dim < 2) throw InvalidArgument("coupled-nesterov needs dim >= 2");
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = i + 1.0;
    const Matrix r = Matrix::Identity(dim, dim) - 2.0 * v * v.transpose() / v.squaredNorm();
    const int last = dim - 1;

    auto value = [r, last](const Vector& x) {
        const Vector u = r * x;
        const double y = u[last];
        return 0.5 * u.head(last).squaredNorm() + 0.25 * y * y * y * y - 0.5 * y * y;
    };
    auto gradient = [r, last](const Vector& x) -> Vector {
        Vector u = r * x;
        const double y = u[last];
        u[last] = y * y * y - y;
        return r * u;
    };
    auto hessian = [r, last](const Vector& x) -> Matrix {
        const Vector u = r * x;
        Vector d = Vector::Ones(r.rows());
        d[last] = 3.0 * u[last] * u[last] - 1.0;
        return r * d.asDiagonal() * r;
    };

    constexpr double radius = 2.5;
    const double top = 3.0 * radius * radius - 1.0;
    LipschitzConstants c;
    c.L = top;
    // Diagonal entry i is sum_k R_ik^2 d_k with d_k = 1 except the last,
    // which ranges over [-1, top].
    double lmax = 0.0;
    for (int i = 0; i < dim; ++i) {
        const double w = r(i, last) * r(i, last);
        lmax = std::max(lmax, (1.0 - w) + w * top);
    }
    c.L_max = lmax;

    const Vector minimizer = r.col(last);
    std::vector<KnownCriticalPoint> cps = {
        {Vector::Zero(dim), CriticalLabel::StrictSaddle},
        {-minimizer, CriticalLabel::LocalMin},
        {minimizer, CriticalLabel::LocalMin},
    };
    return std::make_shared<ObjectiveProblem>("coupled-nesterov:" + std::to_string(dim),
                                              DomainDescriptor::euclidean(dim), value, gradient, hessian,
                                              std::move(c), std::move(cps), TrustRegion{TrustRegion::Norm::Two, radius});
}

ProblemPtr make_sphere_rayleigh(const Matrix& m_in, std::string name) {
    require_symmetric(m_in, "Rayleigh matrix");
    const Matrix m = 0.5 * (m_in + m_in.transpose());
    const int d = static_cast<int>(m.rows());
    if (d < 2) throw InvalidArgument("sphere-rayleigh needs dim >= 2");
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success) throw EigensolverFailure("eigensolve of Rayleigh matrix failed");
    const Vector lambda = es.eigenvalues();
    for (int i = 1; i < d; ++i) {
        if (lambda[i] - lambda[i - 1] < 1e-8)
            throw RepeatedEigenvalues("Rayleigh matrix has an eigenvalue gap below 1e-8; degenerate saddles are "
                                      "not supported");
    }

    std::vector<KnownCriticalPoint> cps;
    for (int i = 0; i < d; ++i) {
        Vector vec = es.eigenvectors().col(i).normalized();
        Eigen::Index pivot = 0;
        vec.cwiseAbs().maxCoeff(&pivot);
        if (vec[pivot] < 0.0) vec = -vec;
        const CriticalLabel label = i == 0 ? CriticalLabel::LocalMin : CriticalLabel::StrictSaddle;
        cps.push_back({vec, label});
        cps.push_back({-vec, label});
    }

    LipschitzConstants c;
    c.L = positive_or(2.0 * lambda.cwiseAbs().maxCoeff(), 1e-12);
    c.L_max = positive_or(2.0 * m.diagonal().cwiseAbs().maxCoeff(), 1e-12);
    return std::make_shared<ObjectiveProblem>(
        std::move(name), DomainDescriptor::unit_sphere(d), [m](const Vector& x) { return x.dot(m * x); },
        [m](const Vector& x) -> Vector { return 2.0 * (m * x); }, [m](const Vector&) -> Matrix { return 2.0 * m; },
        std::move(c), std::move(cps));
}

ProblemPtr make_simplex_quadratic(const Matrix& q_in, std::string name) {
    require_symmetric(q_in, "simplex quadratic matrix");
    const Matrix q = 0.5 * (q_in + q_in.transpose());
    const int d = static_cast<int>(q.rows());
    if (d < 2) throw InvalidArgument("simplex-quadratic needs dim >= 2");
    const Vector sums = q.rowwise().sum();
    if (sums.maxCoeff() - sums.minCoeff() > 1e-10)
        throw RowSumMismatch("simplex quadratic matrix must have equal row sums");

    auto value = [q](const Vector& x) { return 0.5 * x.dot(q * x); };
    auto gradient = [q](const Vector& x) -> Vector { return q * x; };
    auto hessian = [q](const Vector&) -> Matrix { return q; };

    // Constant Riemannian Hessian, so its spectrum at the centroid is global.
    const Vector centroid = Vector::Constant(d, 1.0 / d);
    const ObjectiveProblem probe("probe", DomainDescriptor::simplex_interior(d), value, gradient, hessian, {});
    const Vector tangent_eig = tangent_hessian_eigenvalues(probe, centroid);

    LipschitzConstants c;
    c.L = positive_or(tangent_eig.cwiseAbs().maxCoeff(), 1e-12);
    c.L_max = positive_or(q.diagonal().cwiseAbs().maxCoeff(), 1e-12);

    std::vector<KnownCriticalPoint> cps;
    const double lmin = tangent_eig.minCoeff();
    if (lmin < -kSingularTol) {
        cps.push_back({centroid, CriticalLabel::StrictSaddle});
    } else if (lmin > kSingularTol) {
        cps.push_back({centroid, CriticalLabel::LocalMin});
    }
    return std::make_shared<ObjectiveProblem>(std::move(name), DomainDescriptor::simplex_interior(d), value, gradient,
                                              hessian, std::move(c), std::move(cps));
}

ProblemPtr make_random_quadratic(int dim, std::uint64_t seed) {
    if (dim < 1) throw InvalidArgument("random-quadratic needs dim >= 1");
    Engine eng(seed);
    Matrix h(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
            h(i, j) = uniform(eng, -1.0, 1.0);
            h(j, i) = h(i, j);
        }
    }
    return make_quadratic(h, "random-quadratic:" + std::to_string(dim) + ":" + std::to_string(seed));
}

Matrix simplex_saddle_matrix(int dim) {
    if (dim < 2) throw InvalidArgument("simplex-quadratic needs dim >= 2");
    Vector c = Vector::Zero(dim);
    c[0] = 2.0;
    c[1] = -1.0;
    Matrix q(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) q(i, j) = c[(i + j) % dim];
    return q;
}

namespace {

int parse_dim(const std::string& text, const std::string& name) {
    const long long d = parse_int(text);
    if (d < 1 || d > 100000) throw ConfigError("fixture '" + name + "' has an invalid dimension");
    return static_cast<int>(d);
}

}  // namespace

ProblemPtr fixture_by_name(const std::string& raw) {
    const std::string name = trim(raw);
    const auto colon = name.find(':');
    const std::string family = name.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : name.substr(colon + 1);
    auto need_arg = [&] {
        if (arg.empty()) throw ConfigError("fixture '" + family + "' needs an argument, e.g. '" + family + ":2'");
    };

    try {
        if (family == "nesterov" && arg.empty()) return make_nesterov_example();
        if (family == "quadratic") {
            need_arg();
            const int d = parse_dim(arg, name);
            Vector diag(d);
            for (int i = 0; i < d; ++i) diag[i] = i % 2 == 0 ? 1.0 : -1.0;
            return make_quadratic(diag.asDiagonal().toDenseMatrix(), name);
        }
        if (family == "quadratic-matrix") {
            need_arg();
            return make_quadratic(parse_matrix(arg), name);
        }
        if (family == "random-quadratic") {
            need_arg();
            const auto parts = split(arg, ':');
            if (parts.size() > 2) throw ConfigError("random-quadratic takes <d>[:seed]");
            const int d = parse_dim(parts[0], name);
            const std::uint64_t seed = parts.size() == 2 ? parse_u64(parts[1]) : kRandomQuadraticSeed;
            return make_random_quadratic(d, seed);
        }
        if (family == "coupled-nesterov") {
            need_arg();
            return make_coupled_nesterov(parse_dim(arg, name));
        }
        if (family == "sphere-rayleigh") {
            need_arg();
            const int d = parse_dim(arg, name);
            Vector diag(d);
            for (int i = 0; i < d; ++i) diag[i] = i + 1.0;
            return make_sphere_rayleigh(diag.asDiagonal().toDenseMatrix(), name);
        }
        if (family == "simplex-quadratic") {
            need_arg();
            return make_simplex_quadratic(simplex_saddle_matrix(parse_dim(arg, name)), name);
        }
        if (family == "simplex-isotropic") {
            need_arg();
            const int d = parse_dim(arg, name);
            return make_simplex_quadratic(Matrix::Identity(d, d), name);
        }
    } catch (const InvalidArgument& e) {
        throw ConfigError("fixture '" + name + "': " + e.what());
    }
    throw ConfigError("unknown fixture '" + name +
                      "' (expected nesterov, quadratic:<d>, quadratic-matrix:<rows>, random-quadratic:<d>[:seed], "
                      "coupled-nesterov:<d>, sphere-rayleigh:<d>, simplex-quadratic:<D>, simplex-isotropic:<D>)");
}

std::vector<FixtureEntry> fixture_catalog() {
    Matrix coupled(2, 2);
    coupled << 1, 2, 2, 1;
    return {
        {fixture_by_name("quadratic:2"), "non-convex quadratic diag(1,-1), closed-form gradient descent iterates"},
        {make_quadratic(coupled, "quadratic-matrix:1,2;2,1"), "indefinite coupled quadratic, eigenvalues {3,-1}"},
        {fixture_by_name("random-quadratic:4"), "seeded 4-d random symmetric quadratic"},
        {make_nesterov_example(), "x^2/2 + y^4/4 - y^2/2 with a saddle at the origin and minima at (0,+-1)"},
        {make_coupled_nesterov(4), "reflected 4-d version of the quartic example with a dense Hessian"},
        {fixture_by_name("sphere-rayleigh:2"), "Rayleigh quotient of diag(1,2) on the circle"},
        {fixture_by_name("sphere-rayleigh:3"), "Rayleigh quotient of diag(1,2,3) on the 2-sphere"},
        {fixture_by_name("simplex-quadratic:3"), "equal-row-sum quadratic with an interior strict saddle"},
        {fixture_by_name("simplex-isotropic:3"), "isotropic quadratic with an interior minimum at the centroid"},
    };
}

}  // namespace saddle
