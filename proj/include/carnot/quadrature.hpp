#pragma once
#include <functional>
#include <vector>

#include "carnot/errors.hpp"

namespace carnot {

struct QuadResult {
    double value = 0.0;
    double est_abs_err = 0.0;
};

// Globally adaptive Gauss-Kronrod 7/15 on [a,b].  Panels start at width
// <= max_panel_width; the worst panel is bisected until the summed error
// estimate drops below max(rel_tol*|I|, abs_floor).  Throws
// QuadratureNotConverged when the panel budget is exhausted.
QuadResult adaptive_gk(const std::function<double(double)>& f, double a, double b,
                       double rel_tol, double abs_floor, double max_panel_width,
                       int max_panels = 4000);

// Fixed composite 15-point Gauss-Legendre nodes/weights on [a,b] with the
// given panel width (last panel clipped).  Nodes come out ascending.
struct FixedRule {
    std::vector<double> x;
    std::vector<double> w;
};
FixedRule composite_gl15(double a, double b, double panel_width);

// Nodes/weights of n-point Gauss-Legendre on [a,b], any n >= 1 (nodes by
// Newton iteration on the Legendre recurrence).
FixedRule gl_rule(int n, double a, double b);

} // namespace carnot
