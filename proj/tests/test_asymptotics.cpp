// Large-time expansion machinery: predicted decay exponents, log-log slope
// fitting, Cauchy-solution sampling, residual norms, and end-to-end decay
// experiments on the euclidean and Heisenberg groups.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "carnot/asymptotics.hpp"
#include "doctest.h"

using namespace carnot;
using doctest::Approx;

namespace {

// Off-center gaussian on euclidean(2): nonzero first moments make the
// order-0 and order-1 expansions genuinely different.
GridFunction offset_gaussian_2d(double h, double half) {
    StratifiedAlgebra alg = euclidean(2);
    GridGeometry gg;
    gg.origin = {0.8 - half, -0.5 - half};
    gg.spacing = {h, h};
    const int n = static_cast<int>(std::lround(2.0 * half / h)) + 1;
    gg.shape = {n, n};
    return sample_on_grid(alg, gg, [](const GroupPoint& x) {
        const double u = x[0] - 0.8, v = x[1] + 0.5;
        return std::exp(-(u * u + v * v) / 0.36);
    });
}

} // namespace

TEST_CASE("predicted decay exponents and rejected norm pairs") {
    StratifiedAlgebra heis = heisenberg();  // Q = 4
    CHECK(predicted_slope(heis, 1.0, HUGE_VAL, 0) == Approx(-2.5).epsilon(1e-14));
    CHECK(predicted_slope(heis, 1.0, HUGE_VAL, 1) == Approx(-3.0).epsilon(1e-14));
    CHECK(predicted_slope(heis, 1.0, 2.0, 0) == Approx(-1.5).epsilon(1e-14));
    CHECK(predicted_slope(heis, 1.0, 1.0, 0) == Approx(-0.5).epsilon(1e-14));
    CHECK(predicted_slope(heis, 1.25, 5.0, 2) ==
          Approx(-0.5 * 4.0 * (1.0 / 1.25 - 0.2) - 1.5).epsilon(1e-14));

    StratifiedAlgebra e2 = euclidean(2);  // Q = 2
    CHECK(predicted_slope(e2, 1.0, HUGE_VAL, 0) == Approx(-1.5).epsilon(1e-14));
    CHECK(predicted_slope(e2, 1.0, HUGE_VAL, 1) == Approx(-2.0).epsilon(1e-14));
    CHECK(predicted_slope(e2, 1.0, 2.0, 0) == Approx(-1.0).epsilon(1e-14));

    // p must stay below Q/(Q-1) and the pair must be ordered p <= q
    CHECK_THROWS_AS(predicted_slope(heis, 4.0 / 3.0, HUGE_VAL, 0), InvalidNormPair);
    CHECK_THROWS_AS(predicted_slope(heis, 2.0, HUGE_VAL, 0), InvalidNormPair);
    CHECK_THROWS_AS(predicted_slope(heis, 1.2, 1.0, 0), InvalidNormPair);
    CHECK_THROWS_AS(predicted_slope(heis, 0.9, 2.0, 0), InvalidNormPair);
    CHECK_THROWS_AS(predicted_slope(e2, 2.0, HUGE_VAL, 0), InvalidNormPair);
    CHECK_NOTHROW(predicted_slope(e2, 1.9, HUGE_VAL, 0));
    CHECK_THROWS_AS(predicted_slope(heis, 1.0, HUGE_VAL, -1), ConfigError);
}

TEST_CASE("slope fit recovers exact and noisy power laws") {
    const std::vector<double> times = {1.0, 3.0, 9.0, 27.0, 100.0};
    std::vector<double> exact;
    for (double t : times) exact.push_back(3.7 * std::pow(t, -1.8));
    SlopeFit f = fit_decay_slope(times, exact);
    CHECK(f.slope == Approx(-1.8).epsilon(1e-12));
    CHECK(f.stderr_ <= 1e-10);

    // deterministic +-3% wiggle: slope barely moves, stderr turns positive
    std::vector<double> noisy = exact;
    const double wig[5] = {1.03, 0.97, 1.02, 0.98, 1.01};
    for (size_t k = 0; k < noisy.size(); ++k) noisy[k] *= wig[k];
    SlopeFit g = fit_decay_slope(times, noisy);
    CHECK(g.slope == Approx(-1.8).epsilon(0.02));
    CHECK(g.stderr_ > 0.0);
    CHECK(g.stderr_ < 0.05);
}

TEST_CASE("slope fit rejects degenerate inputs") {
    // fewer than four samples
    CHECK_THROWS_AS(fit_decay_slope({1, 2, 4}, {1.0, 0.5, 0.25}), DegenerateFit);
    // residuals span less than two decades (8^0.5 < 100)
    std::vector<double> t = {1, 2, 4, 8}, r;
    for (double v : t) r.push_back(std::pow(v, -0.5));
    CHECK_THROWS_AS(fit_decay_slope(t, r), DegenerateFit);
    // nonpositive residuals cannot be fit in log scale
    CHECK_THROWS_AS(fit_decay_slope({1, 2, 4, 8}, {1.0, 0.01, 1e-4, 0.0}),
                    DegenerateFit);
    CHECK_THROWS_AS(fit_decay_slope({1, 2, 4, 8}, {1.0, 0.01, -1e-4, 1e-6}),
                    DegenerateFit);
    // nonpositive times
    CHECK_THROWS_AS(fit_decay_slope({0.0, 2, 4, 8}, {1.0, 0.1, 0.01, 1e-3}),
                    DegenerateFit);
    // equal times with a healthy value span still cannot pin a slope
    CHECK_THROWS_AS(fit_decay_slope({2, 2, 2, 2}, {1.0, 0.01, 1.0, 0.01}),
                    DegenerateFit);
    // mismatched lengths are a usage error, not a data degeneracy
    CHECK_THROWS_AS(fit_decay_slope({1, 2, 4, 8}, {1.0, 0.1, 0.01}), ConfigError);
}

TEST_CASE("residual norms recomputed by hand from a synthetic sample") {
    CauchySample s;
    s.t = 1.0;
    s.geom.origin = {-0.5};
    s.geom.spacing = {0.5};
    s.geom.shape = {3};
    s.ft = {1.0, 0.5, 0.25};
    s.pt = {0.4, 0.2, 0.1};
    s.xpt_inv = {{0.1, -0.2, 0.3}};
    MomentVector m;
    m.a0 = 2.0;
    m.a = {0.5};

    // order 0: deviations |ft - a0 pt| = {0.2, 0.1, 0.05}, cell volume 0.5
    CHECK(residual_from_sample(s, m, 0, HUGE_VAL) == Approx(0.2).epsilon(1e-14));
    CHECK(residual_from_sample(s, m, 0, 1.0) == Approx(0.35 * 0.5).epsilon(1e-14));
    CHECK(residual_from_sample(s, m, 0, 2.0) ==
          Approx(std::sqrt((0.04 + 0.01 + 0.0025) * 0.5)).epsilon(1e-14));

    // order 1 adds a[0] * xpt_inv: deviations {0.15, 0.2, 0.1}
    CHECK(residual_from_sample(s, m, 1, HUGE_VAL) == Approx(0.2).epsilon(1e-14));
    CHECK(residual_from_sample(s, m, 1, 1.0) == Approx(0.45 * 0.5).epsilon(1e-14));
    // an explicit index list naming the only direction changes nothing
    CHECK(residual_from_sample(s, m, 1, 1.0, std::vector<int>{0}) ==
          Approx(0.45 * 0.5).epsilon(1e-14));
    // an empty index list collapses order 1 back to order 0
    CHECK(residual_from_sample(s, m, 1, 1.0, std::vector<int>{}) ==
          Approx(0.35 * 0.5).epsilon(1e-14));

    CHECK_THROWS_AS(residual_from_sample(s, m, 2, 2.0), ConfigError);
    CHECK_THROWS_AS(residual_from_sample(s, m, 0, 0.5), InvalidNormPair);
    CHECK_THROWS_AS(residual_from_sample(s, m, 1, 2.0, std::vector<int>{1}),
                    ConfigError);
}

TEST_CASE("cauchy sampler matches direct kernel evaluation: euclidean") {
    GridFunction f0 = offset_gaussian_2d(0.24, 2.4);
    KernelSpec spec;
    spec.kind = KernelKind::euclidean_gaussian;
    FrameCoefficients fr = left_invariant_frame(f0.alg);
    ExpansionControls ctl;
    ctl.radii = {3.0};
    ctl.res = 7;
    const double t = 2.0;
    CauchySample s = sample_cauchy_grid(f0, spec, fr, t, ctl);
    CHECK(s.t == t);
    CHECK(s.geom.shape == std::vector<int>{7, 7});
    CHECK(s.xpt_inv.size() == 2);
    REQUIRE(s.ft.size() == 49);

    GridFunction holder(f0.alg, s.geom);
    std::vector<GroupPoint> nodes;
    for (size_t flat = 0; flat < s.ft.size(); ++flat)
        nodes.push_back(holder.node(flat));
    ConvolveResult direct = solve_cauchy(f0, spec, t, nodes);
    for (size_t flat = 0; flat < nodes.size(); ++flat) {
        const GroupPoint& g = nodes[flat];
        const double r2 = g[0] * g[0] + g[1] * g[1];
        const double p = std::exp(-r2 / (4.0 * t)) / (4.0 * M_PI * t);
        CHECK(s.pt[flat] == Approx(p).epsilon(1e-12));
        const GroupPoint ginv = f0.alg.inverse(g);
        for (int i = 0; i < 2; ++i) {
            const double want = eval_kernel_derivative(spec, fr, i, t, ginv).value;
            CHECK(s.xpt_inv[static_cast<size_t>(i)][flat] ==
                  Approx(want).epsilon(1e-12));
        }
        CHECK(std::abs(s.ft[flat] - direct.values[flat]) <=
              1e-15 + 1e-12 * std::abs(direct.values[flat]));
    }
}

TEST_CASE("cauchy sampler matches direct kernel evaluation: heisenberg") {
    GridFunction f0 = builtin_datum("shifted_bump", {{"h", 0.4}});
    KernelSpec spec;
    FrameCoefficients fr = left_invariant_frame(f0.alg);
    ExpansionControls ctl;
    ctl.radii = {2.0, 2.0};
    ctl.res = 5;
    const double t = 1.5;
    CauchySample s = sample_cauchy_grid(f0, spec, fr, t, ctl);
    REQUIRE(s.ft.size() == 125);
    CHECK(s.xpt_inv.size() == 3);
    CHECK(s.conv_err > 0.0);
    CHECK(s.conv_err < 1e-4);

    GridFunction holder(f0.alg, s.geom);
    std::vector<GroupPoint> nodes;
    for (size_t flat = 0; flat < s.ft.size(); ++flat)
        nodes.push_back(holder.node(flat));
    ConvolveResult direct = solve_cauchy(f0, spec, t, nodes);
    for (size_t flat = 0; flat < nodes.size(); ++flat) {
        const GroupPoint& g = nodes[flat];
        // table-backed values carry the documented absolute table budget
        CHECK(std::abs(s.pt[flat] - eval_kernel(spec, t, g).value) <= 5e-7);
        const GroupPoint ginv = f0.alg.inverse(g);
        for (int i = 0; i < 3; ++i) {
            const double want = eval_kernel_derivative(spec, fr, i, t, ginv).value;
            CHECK(std::abs(s.xpt_inv[static_cast<size_t>(i)][flat] - want) <= 2e-6);
        }
        CHECK(std::abs(s.ft[flat] - direct.values[flat]) <=
              1e-15 + 1e-12 * std::abs(direct.values[flat]));
    }

    // the sampler insists on matching algebras between frame and data
    CHECK_THROWS_AS(sample_cauchy_grid(f0, spec, left_invariant_frame(euclidean(3)),
                                       t, ctl),
                    GridMismatch);
}

TEST_CASE("euclidean decay experiments recover the predicted exponents") {
    GridFunction f0 = offset_gaussian_2d(0.12, 2.4);
    MomentVector m = moments(f0);
    CHECK(m.a0 == Approx(0.36 * M_PI).epsilon(1e-3));  // int exp(-r^2/w^2) = pi w^2
    CHECK(m.a[0] > 0.5);   // center (0.8, -0.5) times a0
    CHECK(m.a[1] < -0.3);
    MomentVector half = m;
    half.a0 *= 0.5;

    KernelSpec spec;
    spec.kind = KernelKind::euclidean_gaussian;
    FrameCoefficients fr = left_invariant_frame(f0.alg);
    ExperimentControls ctl;
    ctl.expansion.radii = {6.0};
    ctl.expansion.res = 17;
    std::vector<ExperimentRequest> reqs(4);
    reqs[0] = {0, 1.0, HUGE_VAL, {}, {}};
    reqs[1] = {1, 1.0, HUGE_VAL, {}, {}};
    reqs[2] = {0, 1.0, HUGE_VAL, half, {}};                  // negative control
    reqs[3] = {1, 1.0, HUGE_VAL, {}, std::vector<int>{0}};   // drop the a_2 term
    const std::vector<double> times = {1, 4, 16, 64, 256};
    auto reps = run_decay_experiments(f0, spec, fr, reqs, times, ctl);
    REQUIRE(reps.size() == 4);

    const DecayReport& r0 = reps[0];
    CHECK(r0.predicted == Approx(-1.5).epsilon(1e-14));
    CHECK(r0.fitted_slope == Approx(-1.497).epsilon(0.02));
    CHECK(r0.pass);
    CHECK(r0.slope_stderr < 0.02);
    CHECK(r0.residual_norms.size() == times.size());
    for (size_t k = 1; k < r0.residual_norms.size(); ++k)
        CHECK(r0.residual_norms[k] < r0.residual_norms[k - 1]);

    const DecayReport& r1 = reps[1];
    CHECK(r1.predicted == Approx(-2.0).epsilon(1e-14));
    CHECK(r1.fitted_slope == Approx(-1.974).epsilon(0.02));
    CHECK(r1.pass);
    // the first-order correction genuinely helps at every time
    for (size_t k = 0; k < times.size(); ++k)
        CHECK(r1.residual_norms[k] < r0.residual_norms[k]);

    // halving a0 leaves an uncancelled a0/2 * P_t ~ t^{-1} floor
    const DecayReport& rh = reps[2];
    CHECK(rh.fitted_slope == Approx(-1.02).epsilon(0.08));
    CHECK_FALSE(rh.pass);

    // keeping only the X^1 term sits strictly between orders 0 and 1
    const DecayReport& rs = reps[3];
    CHECK(rs.fitted_slope < r0.fitted_slope);
    CHECK(rs.fitted_slope > r1.fitted_slope);
    CHECK_FALSE(rs.pass);
    const size_t last = times.size() - 1;
    CHECK(rs.residual_norms[last] < r0.residual_norms[last]);
    CHECK(rs.residual_norms[last] > r1.residual_norms[last]);

    // single-request wrapper, L2 residuals: predicted -Q/2 (1/p - 1/q) - 1/2
    DecayReport l2 = run_decay_experiment(f0, spec, fr, 0, 1.0, 2.0, times, ctl);
    CHECK(l2.predicted == Approx(-1.0).epsilon(1e-14));
    CHECK(l2.fitted_slope == Approx(-0.99).epsilon(0.04));
    CHECK(l2.pass);

    // rejected norm pairs surface before any report is produced
    CHECK_THROWS_AS(run_decay_experiment(f0, spec, fr, 0, 2.0, 1.0,
                                         {1, 2, 4, 8}, ctl),
                    InvalidNormPair);
}

TEST_CASE("heisenberg decay experiments recover the predicted exponents") {
    GridFunction f0 = builtin_datum("shifted_bump", {{"h", 0.3}});
    KernelSpec spec;
    FrameCoefficients fr = left_invariant_frame(f0.alg);
    ExperimentControls ctl;
    ctl.expansion.res = 21;  // radii keep their {5, 8} defaults
    std::vector<ExperimentRequest> reqs(2);
    reqs[0] = {0, 1.0, HUGE_VAL, {}, {}};
    reqs[1] = {1, 1.0, HUGE_VAL, {}, {}};
    const std::vector<double> times = {4, 8, 16, 32};
    auto reps = run_decay_experiments(f0, spec, fr, reqs, times, ctl);

    CHECK(reps[0].predicted == Approx(-2.5).epsilon(1e-14));
    CHECK(reps[0].fitted_slope == Approx(-2.59).epsilon(0.06));
    CHECK(reps[0].pass);
    CHECK(reps[0].slope_stderr < 0.05);

    CHECK(reps[1].predicted == Approx(-3.0).epsilon(1e-14));
    CHECK(reps[1].fitted_slope == Approx(-3.05).epsilon(0.07));
    CHECK(reps[1].pass);
    for (size_t k = 0; k < times.size(); ++k)
        CHECK(reps[1].residual_norms[k] < reps[0].residual_norms[k]);
}
