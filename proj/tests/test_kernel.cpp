#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "carnot/fields.hpp"
#include "carnot/kernel.hpp"
#include "carnot/quadrature.hpp"

using namespace carnot;
using carnot::detail::GaveauFlavor;

namespace {
const StratifiedAlgebra kHeis = heisenberg();
const KernelSpec kSpec{};
} // namespace

TEST_CASE("adaptive quadrature on closed forms") {
    const QuadResult s = adaptive_gk([](double x) { return std::sin(x); }, 0.0, M_PI,
                                     1e-12, 0.0, 0.5);
    CHECK(s.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::fabs(s.value - 2.0) <= s.est_abs_err + 1e-14);

    // damped oscillation: Int_0^inf e^-x cos(5x) = 1/26
    const QuadResult o = adaptive_gk(
        [](double x) { return std::exp(-x) * std::cos(5.0 * x); }, 0.0, 40.0, 1e-12,
        0.0, 0.3);
    CHECK(o.value == doctest::Approx(1.0 / 26.0).epsilon(1e-11));

    // integrable endpoint singularity with a starved panel budget
    CHECK_THROWS_AS(adaptive_gk([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                                1e-14, 0.0, 0.5, 8),
                    QuadratureNotConverged);
}

TEST_CASE("fixed rules integrate polynomials exactly") {
    const FixedRule r15 = composite_gl15(-1.0, 2.0, 0.7);
    double acc = 0.0;
    for (size_t i = 0; i < r15.x.size(); ++i)
        acc += r15.w[i] * (r15.x[i] * r15.x[i] * r15.x[i] - 2.0 * r15.x[i]);
    CHECK(acc == doctest::Approx((16.0 - 1.0) / 4.0 - (4.0 - 1.0)).epsilon(1e-13));

    for (int n : {2, 5, 6, 16, 48}) {
        const FixedRule r = gl_rule(n, 0.0, 3.0);
        REQUIRE(r.x.size() == static_cast<size_t>(n));
        double wsum = 0.0, x2 = 0.0;
        for (size_t i = 0; i < r.x.size(); ++i) {
            wsum += r.w[i];
            x2 += r.w[i] * r.x[i] * r.x[i];
        }
        CHECK(wsum == doctest::Approx(3.0).epsilon(1e-13));
        if (n >= 2) CHECK(x2 == doctest::Approx(9.0).epsilon(1e-12));
    }
}

TEST_CASE("integrand factors and tau cutoff") {
    using carnot::detail::gaveau_m;
    using carnot::detail::gaveau_tau_max;
    using carnot::detail::gaveau_w;

    // series branch joins the closed form smoothly
    CHECK(gaveau_w(0.0) == doctest::Approx(1.0));
    CHECK(gaveau_m(0.0) == doctest::Approx(0.5));
    for (double tau : {1e-8, 1e-4, 0.01, 0.2, 1.0, 5.0}) {
        CHECK(gaveau_w(tau) ==
              doctest::Approx(2.0 * tau / std::sinh(2.0 * tau)).epsilon(1e-12));
        CHECK(gaveau_m(tau) ==
              doctest::Approx(tau / std::tanh(2.0 * tau)).epsilon(1e-12));
    }
    // w decreases, m increases
    CHECK(gaveau_w(1.0) > gaveau_w(2.0));
    CHECK(gaveau_m(1.0) < gaveau_m(2.0));

    const double t1 = gaveau_tau_max(0.0, 1e-16);
    const double t2 = gaveau_tau_max(0.0, 1e-12);
    CHECK(t1 > t2);          // deeper tail needs a longer window
    CHECK(t1 < 50.0);        // e^{-2 tau} envelope keeps it modest
    CHECK(gaveau_w(t1) <= 1e-15);  // envelope actually below the cut
}

TEST_CASE("scale-free integral closed forms") {
    using carnot::detail::gaveau_integral;
    // Int_0^inf 2 tau / sinh(2 tau) dtau = pi^2 / 8
    const auto i00 = gaveau_integral(0.0, 0.0, GaveauFlavor::plain, 1e-12, 1e-16, 0.5);
    CHECK(i00.value == doctest::Approx(M_PI * M_PI / 8.0).epsilon(1e-10));

    // I(0, a) = (pi^2/8) sech^2(pi a / 4)
    for (double a : {0.8, 1.7, 3.2, 6.0}) {
        const auto ia = gaveau_integral(0.0, a, GaveauFlavor::plain, 1e-12, 1e-16, 0.5);
        const double c = 1.0 / std::cosh(M_PI * a / 4.0);
        CHECK(ia.value == doctest::Approx(M_PI * M_PI / 8.0 * c * c).epsilon(1e-9));
    }
}

TEST_CASE("frozen high-precision kernel values") {
    // 40-digit reference values for P_t(x, y, z)
    struct Ref {
        double x, y, z, t, p;
    };
    const Ref refs[] = {
        {1.0, 0.0, 0.0, 1.0, 0.039376927974030780777},
        {0.5, 0.3, 0.2, 1.0, 0.048779458658861924295},
        {1.0, 1.0, 1.0, 1.0, 0.0097523300414878665856},
        {2.0, 1.0, 0.5, 1.0, 0.0078556779384980939345},
        {0.7, -0.4, 0.9, 2.0, 0.0089380949310509806244},
        {1.3, 0.6, -1.1, 0.5, 0.0039579293200185910839},
    };
    for (const Ref& r : refs) {
        const KernelValue v = eval_kernel(kSpec, r.t, GroupPoint{r.x, r.y, r.z});
        CHECK(v.value == doctest::Approx(r.p).epsilon(1e-9));
        CHECK(std::fabs(v.value - r.p) <= std::max(v.est_abs_err, 1e-13 * r.p));
    }

    // origin value P_1(0) = 1/16
    const KernelValue p0 = eval_kernel(kSpec, 1.0, GroupPoint{0, 0, 0});
    CHECK(p0.value == doctest::Approx(1.0 / 16.0).epsilon(1e-10));
}

TEST_CASE("frozen frame-derivative values") {
    const FrameCoefficients frame = left_invariant_frame(kHeis);
    const GroupPoint x{0.5, 0.3, 0.2};
    // X^1 P, X^2 P, X^3 P = dP/dz at (0.5, 0.3, 0.2), t = 1 (40-digit refs)
    const double want[3] = {-0.0152347992444764835, -0.0226892608842400502,
                            -0.0398481804045710593};
    for (int i = 0; i < 3; ++i) {
        const KernelValue v = eval_kernel_derivative(kSpec, frame, i, 1.0, x);
        CHECK(v.value == doctest::Approx(want[i]).epsilon(1e-9));
    }

    // central finite differences of eval_kernel through the frame as a
    // second, self-contained route
    const double h = 1e-5;
    for (int i = 0; i < 3; ++i) {
        double fd = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double a = frame.coeff_value(i, k, x);
            if (a == 0.0) continue;
            GroupPoint xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            fd += a *
                  (eval_kernel(kSpec, 1.0, xp).value - eval_kernel(kSpec, 1.0, xm).value) /
                  (2.0 * h);
        }
        const KernelValue v = eval_kernel_derivative(kSpec, frame, i, 1.0, x);
        CHECK(v.value == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("dilation scaling law") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (double r : {0.5, 2.0, 4.0}) {
        for (int trial = 0; trial < 20; ++trial) {
            const GroupPoint x{u(rng), u(rng), u(rng)};
            const double t = 0.5 + std::fabs(u(rng));
            const double lhs =
                eval_kernel(kSpec, r * r * t, kHeis.dilate(r, x)).value;
            const double rhs = std::pow(r, -4.0) * eval_kernel(kSpec, t, x).value;
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
        }
    }
}

TEST_CASE("euclidean gaussian kernel") {
    KernelSpec spec;
    spec.kind = KernelKind::euclidean_gaussian;
    const GroupPoint x{0.7, -1.1};
    const double t = 0.8;
    const double want =
        std::pow(4.0 * M_PI * t, -1.0) * std::exp(-(0.49 + 1.21) / (4.0 * t));
    CHECK(eval_kernel(spec, t, x).value == doctest::Approx(want).epsilon(1e-14));

    // mass on a wide box (direct midpoint sum)
    double mass = 0.0;
    const int n = 201;
    const double h = 16.0 / n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const GroupPoint p{-8.0 + (i + 0.5) * h, -8.0 + (j + 0.5) * h};
            mass += eval_kernel(spec, t, p).value * h * h;
        }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("upper bound dominates the kernel") {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        const GroupPoint x{u(rng), u(rng), u(rng)};
        const double t = 0.25 + std::fabs(u(rng));
        const double s = x[0] * x[0] + x[1] * x[1];
        CHECK(eval_kernel(kSpec, t, x).value <=
              kernel_upper_bound(kSpec, t, s, x[2]) * (1.0 + 1e-12));
    }
}

TEST_CASE("table path agrees with adaptive quadrature") {
    using carnot::detail::gaveau_integral;
    using carnot::detail::gaveau_table_abs_bound;
    using carnot::detail::gaveau_table_eval;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double bound = gaveau_table_abs_bound();
    double worst = 0.0;
    for (int trial = 0; trial < 1500; ++trial) {
        // bias toward the small-sigma, small-a corner where curvature peaks
        const double sig = 40.0 * std::pow(u01(rng), 3.0);
        const double a = 24.0 * std::pow(u01(rng), 2.0) * (u01(rng) < 0.5 ? -1.0 : 1.0);
        for (GaveauFlavor fl :
             {GaveauFlavor::plain, GaveauFlavor::mfac, GaveauFlavor::tausin}) {
            const double tab = gaveau_table_eval(fl, sig, a);
            const double ref = gaveau_integral(sig, a, fl, 1e-11, 1e-16, 0.5).value;
            worst = std::max(worst, std::fabs(tab - ref));
        }
    }
    CHECK(worst <= bound);

    // outside the covered rectangle the integral is negligible and the
    // table reports 0
    for (double sig : {41.0, 55.0}) {
        CHECK(gaveau_table_eval(GaveauFlavor::plain, sig, 1.0) == 0.0);
        CHECK(std::fabs(gaveau_integral(sig, 1.0, GaveauFlavor::plain, 1e-10, 1e-16,
                                        0.5)
                            .value) <= 3e-9);
    }
    for (double a : {24.5, 40.0}) {
        CHECK(gaveau_table_eval(GaveauFlavor::plain, 3.0, a) == 0.0);
        CHECK(std::fabs(
                  gaveau_integral(3.0, a, GaveauFlavor::plain, 1e-10, 1e-16, 0.5).value) <=
              3e-9);
    }
}

TEST_CASE("box mass and norms") {
    // nearly all of the unit mass sits inside the R = 10 self-similar box
    const double m = kernel_box_mass(kSpec, 1.0, 10.0, 100.0);
    CHECK(m == doctest::Approx(1.0).epsilon(1e-3));
    // growing boxes increase the captured mass
    CHECK(kernel_box_mass(kSpec, 1.0, 4.0, 16.0) < m);

    const FrameCoefficients frame = left_invariant_frame(kHeis);
    // || P_t ||_1 tracks the box mass
    const double n1 = kernel_lq_norm(kSpec, frame, {}, 1.0, 1.0);
    CHECK(n1 == doctest::Approx(m).epsilon(1e-6));
    // || P_t ||_inf is the origin value
    const double ninf = kernel_lq_norm(kSpec, frame, {}, 1.0,
                                       std::numeric_limits<double>::infinity());
    CHECK(ninf == doctest::Approx(1.0 / 16.0).epsilon(1e-6));
    // self-similarity: || P_4 ||_2 / || P_1 ||_2 = 4^{-Q/4} = 1/4
    const double r2 = kernel_lq_norm(kSpec, frame, {}, 4.0, 2.0) /
                      kernel_lq_norm(kSpec, frame, {}, 1.0, 2.0);
    CHECK(r2 == doctest::Approx(0.25).epsilon(1e-10));
}
