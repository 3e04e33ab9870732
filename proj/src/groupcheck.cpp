#include "carnot/groupcheck.hpp"

#include <cmath>
#include <random>

#include "carnot/fields.hpp"

namespace carnot {

namespace {

bool heisenberg_shaped(const StratifiedAlgebra& alg) {
    return alg.dim() == 3 && alg.step() == 2 &&
           alg.layer_dims() == std::vector<int>{2, 1} &&
           alg.structure_constant(0, 1, 2) == 1.0;
}

struct Recorder {
    CheckSuite suite;
    explicit Recorder(std::string name, double tol) {
        suite.name = std::move(name);
        suite.tol = tol;
    }
    void check(double err) {
        ++suite.trials;
        suite.max_err = std::max(suite.max_err, err);
        if (!(err <= suite.tol)) ++suite.failures;
    }
};

double max_coord_diff(const GroupPoint& a, const GroupPoint& b) {
    double m = 0.0;
    for (int k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

} // namespace

GroupCheckReport run_groupcheck(const StratifiedAlgebra& alg,
                                const std::string& algebra_name,
                                std::uint64_t seed, int trials) {
    GroupCheckReport rep;
    rep.algebra_name = algebra_name;
    rep.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    std::uniform_real_distribution<double> rdist(0.25, 4.0);
    const int n = alg.dim();
    auto rand_point = [&] {
        std::vector<double> c(static_cast<size_t>(n));
        for (double& v : c) v = dist(rng);
        return GroupPoint(std::move(c));
    };

    {
        Recorder r("structure constants (antisymmetry, grading, Jacobi)", 1e-13);
        const auto& w = alg.weights();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    r.check(std::abs(alg.structure_constant(i, j, k) +
                                     alg.structure_constant(j, i, k)));
                    if (w[static_cast<size_t>(k)] !=
                        w[static_cast<size_t>(i)] + w[static_cast<size_t>(j)])
                        r.check(std::abs(alg.structure_constant(i, j, k)));
                }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l)
                    for (int k = 0; k < n; ++k) {
                        double s = 0.0;
                        for (int m = 0; m < n; ++m)
                            s += alg.structure_constant(i, j, m) * alg.structure_constant(m, l, k) +
                                 alg.structure_constant(j, l, m) * alg.structure_constant(m, i, k) +
                                 alg.structure_constant(l, i, m) * alg.structure_constant(m, j, k);
                        r.check(std::abs(s));
                    }
        rep.suites.push_back(r.suite);
    }

    {
        Recorder r("associativity of the group law", 1e-11);
        for (int t = 0; t < trials; ++t) {
            const GroupPoint x = rand_point(), y = rand_point(), z = rand_point();
            r.check(max_coord_diff(alg.product(alg.product(x, y), z),
                                   alg.product(x, alg.product(y, z))));
        }
        rep.suites.push_back(r.suite);
    }

    {
        Recorder r("identity and inverses", 1e-12);
        const GroupPoint e = alg.identity();
        for (int t = 0; t < trials; ++t) {
            const GroupPoint x = rand_point();
            r.check(max_coord_diff(alg.product(x, e), x));
            r.check(max_coord_diff(alg.product(e, x), x));
            r.check(max_coord_diff(alg.product(x, alg.inverse(x)), e));
            r.check(max_coord_diff(alg.product(alg.inverse(x), x), e));
        }
        rep.suites.push_back(r.suite);
    }

    {
        Recorder r("dilations are automorphisms; norm is 1-homogeneous", 1e-11);
        for (int t = 0; t < trials; ++t) {
            const GroupPoint x = rand_point(), y = rand_point();
            const double s = rdist(rng);
            r.check(max_coord_diff(alg.dilate(s, alg.product(x, y)),
                                   alg.product(alg.dilate(s, x), alg.dilate(s, y))));
            r.check(std::abs(alg.hom_norm(alg.dilate(s, x)) - s * alg.hom_norm(x)));
            r.check(std::abs(alg.hom_norm(alg.inverse(x)) - alg.hom_norm(x)));
        }
        rep.suites.push_back(r.suite);
    }

    const FrameCoefficients frame = left_invariant_frame(alg);
    const auto& w = alg.weights();

    {
        Recorder r("frame coefficients are weighted-homogeneous", 1e-11);
        for (int t = 0; t < trials; ++t) {
            const GroupPoint x = rand_point();
            const double s = rdist(rng);
            const GroupPoint sx = alg.dilate(s, x);
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k) {
                    const double expo = w[static_cast<size_t>(k)] - w[static_cast<size_t>(i)];
                    r.check(std::abs(frame.coeff_value(i, k, sx) -
                                     std::pow(s, expo) * frame.coeff_value(i, k, x)));
                }
        }
        rep.suites.push_back(r.suite);
    }

    {
        // [X^i, X^j] x_m = sum_l (a_il d_l a_jm - a_jl d_l a_im) must equal
        // sum_k c^k_{ij} a_km at every point
        Recorder r("frame commutators match the structure constants", 1e-11);
        std::vector<Polynomial> d(static_cast<size_t>(n) * n * n);
        for (int i = 0; i < n; ++i)
            for (int m = 0; m < n; ++m)
                for (int l = 0; l < n; ++l)
                    d[(static_cast<size_t>(i) * n + m) * n + l] =
                        frame.coeff(i, m).derivative(l);
        for (int t = 0; t < trials; ++t) {
            const GroupPoint x = rand_point();
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    for (int m = 0; m < n; ++m) {
                        double lhs = 0.0;
                        for (int l = 0; l < n; ++l)
                            lhs += frame.coeff_value(i, l, x) *
                                       d[(static_cast<size_t>(j) * n + m) * n + l].eval(x) -
                                   frame.coeff_value(j, l, x) *
                                       d[(static_cast<size_t>(i) * n + m) * n + l].eval(x);
                        double rhs = 0.0;
                        for (int k = 0; k < n; ++k)
                            rhs += alg.structure_constant(i, j, k) * frame.coeff_value(k, m, x);
                        r.check(std::abs(lhs - rhs));
                    }
        }
        rep.suites.push_back(r.suite);
    }

    if (heisenberg_shaped(alg)) {
        // x -> [[1, x1, x3 + x1 x2/2], [0, 1, x2], [0, 0, 1]] is a group
        // isomorphism onto upper-triangular matrices
        Recorder r("3x3 matrix model reproduces the product", 1e-12);
        for (int t = 0; t < trials; ++t) {
            const GroupPoint x = rand_point(), y = rand_point();
            const double a1 = x[0], a2 = x[1], a3 = x[2] + 0.5 * x[0] * x[1];
            const double b1 = y[0], b2 = y[1], b3 = y[2] + 0.5 * y[0] * y[1];
            const double m1 = a1 + b1;
            const double m2 = a2 + b2;
            const double m3 = a3 + b3 + a1 * b2;
            const GroupPoint via_matrix({m1, m2, m3 - 0.5 * m1 * m2});
            r.check(max_coord_diff(alg.product(x, y), via_matrix));
        }
        rep.suites.push_back(r.suite);
    }

    return rep;
}

} // namespace carnot
