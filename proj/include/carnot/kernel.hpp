#pragma once
#include <vector>

#include "carnot/algebra.hpp"
#include "carnot/fields.hpp"

namespace carnot {

enum class KernelKind { heisenberg_gaveau, euclidean_gaussian };

struct KernelSpec {
    KernelKind kind = KernelKind::heisenberg_gaveau;
    double quad_rel_tol = 1e-9;  // relative tolerance of the tau quadrature
    double tau_panel = 0.5;      // base panel width before the period cap
    double tail_cut = 1e-16;     // envelope threshold fixing tau_max
};

struct KernelValue {
    double value = 0.0;
    double est_abs_err = 0.0;
};

// Hypoelliptic heat kernel at time t.  Heisenberg:
//   P_t(x,y,z) = (2 pi t)^{-2} Int_R (2 tau/sinh 2 tau)
//                  exp(-tau (x^2+y^2)/(2 t tanh 2 tau)) cos(2 z tau/t) d tau
// (even integrand, evaluated on [0, tau_max] and doubled; the cos period
// pi t/z caps the panel width when z != 0).  Euclidean:
//   (4 pi t)^{-N/2} exp(-|x|^2/(4t)).
KernelValue eval_kernel(const KernelSpec& spec, double t, const GroupPoint& x);

// (X^i P_t)(x) by differentiating under the integral sign (the x,y
// derivatives pull down -x tau/(t tanh 2 tau) factors; d/dz swaps the
// cosine for a sine), combined through the frame coefficients.
KernelValue eval_kernel_derivative(const KernelSpec& spec, const FrameCoefficients& frame,
                                   int i, double t, const GroupPoint& x);

struct NormControls {
    double r_cut = 10.0;   // box half-extent in self-similar units
    int panel_nodes = 16;  // GL nodes per tensor panel
};

// L^q norm of P_t (or X^i P_t for a single-entry deriv multi-index) over the
// dilation-adapted box |x_layer-l| <= r_cut^l t^{l/2}, by tensor composite
// Gauss-Legendre with panels graded toward the origin.  q = inf returns a
// grid-scan + local-refinement lower-bound estimator.
double kernel_lq_norm(const KernelSpec& spec, const FrameCoefficients& frame,
                      const std::vector<int>& deriv, double t, double q,
                      const NormControls& ctl = {});

// Upper bound on P_t: m(tau) >= 1/2 bounds the integral by
// e^{-s/(4t)} I(0,0), i.e. P_t <= e^{-s/(4t)}/(16 t^2).  Used to skip
// negligible pairs inside convolutions.  Euclidean kind returns +inf
// (the closed form is cheap enough to evaluate directly).
double kernel_upper_bound(const KernelSpec& spec, double t, double s_xy, double z);

// Integral of P_t over the centered box {|x|,|y| <= r_xy, |z| <= r_z}:
// the Gaussian xy-factor and the cosine z-factor integrate in closed form
// (erf and sin), leaving a single adaptive tau integral.  Heisenberg only;
// box masses of the Euclidean kernel follow from erf by hand.
double kernel_box_mass(const KernelSpec& spec, double t, double r_xy, double r_z);

namespace detail {

// The tau-integral in scale-free variables sigma = s/(2t), a = 2z/t:
//   I(sigma, a) = Int_0^tau_max w(tau) e^{-sigma m(tau)} phase(a tau) dtau
// with w = 2 tau/sinh 2 tau, m = tau/tanh 2 tau.  Flavors: plain cos;
// mfac inserts m(tau) (for d/dx, d/dy); tausin uses tau sin(a tau) (d/dz).
enum class GaveauFlavor { plain, mfac, tausin };

struct GaveauResult {
    double value = 0.0;
    double est_abs_err = 0.0;
};

double gaveau_tau_max(double sigma, double tail_cut);
GaveauResult gaveau_integral(double sigma, double a, GaveauFlavor flavor,
                             double rel_tol, double tail_cut, double tau_panel,
                             double abs_floor = 0.0);

// w and m with series branches near tau = 0
double gaveau_w(double tau);
double gaveau_m(double tau);

// Bulk path: bicubic tables of I(sigma, a) per flavor on a grid uniform in
// sqrt(sigma) (sigma <= 40) and in a (|a| <= 24), built lazily in ~1 s and
// cached for the process.  Outside the covered rectangle the integral is
// below 3e-9 in absolute value and the table evaluates to 0.  tausin is
// odd in a, the others even; the table handles the sign.  The absolute
// error bound (interpolation plus cutoff) is gaveau_table_abs_bound(),
// frozen from a direct-quadrature validation sweep.
double gaveau_table_eval(GaveauFlavor flavor, double sigma, double a);
double gaveau_table_abs_bound();

} // namespace detail

} // namespace carnot
