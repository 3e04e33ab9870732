#include "carnot/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace carnot {

namespace {

// Gauss-Kronrod 7/15 node/weight pair (positive half; node 0 included).
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Panel {
    double a, b, value, err;
    bool operator<(const Panel& o) const { return err < o.err; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fv[15];
    fv[7] = f(c);
    for (int k = 0; k < 7; ++k) {
        fv[k] = f(c - h * kXgk[k]);
        fv[14 - k] = f(c + h * kXgk[k]);
    }
    double resk = kWgk[7] * fv[7], resg = kWg[3] * fv[7];
    for (int k = 0; k < 7; ++k) {
        resk += kWgk[k] * (fv[k] + fv[14 - k]);
        if (k % 2 == 1) resg += kWg[k / 2] * (fv[k] + fv[14 - k]);
    }
    const double reskh = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fv[7] - reskh);
    for (int k = 0; k < 7; ++k)
        resasc += kWgk[k] *
                  (std::abs(fv[k] - reskh) + std::abs(fv[14 - k] - reskh));
    resasc *= h;
    double err = std::abs(resk - resg) * h;
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    return {a, b, resk * h, err};
}

// P_n and P_n' at x via the three-term recurrence
void legendre_pair(int n, double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
}

// n-point Gauss-Legendre on [-1, 1] by Newton iteration (machine precision)
void legendre_rule(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(static_cast<size_t>(n), 0.0);
    w.assign(static_cast<size_t>(n), 0.0);
    const int half = (n + 1) / 2;
    for (int k = 0; k < half; ++k) {
        double xi = std::cos(M_PI * (k + 0.75) / (n + 0.5));
        double p = 0.0, dp = 1.0;
        for (int it = 0; it < 60; ++it) {
            legendre_pair(n, xi, p, dp);
            const double step = p / dp;
            xi -= step;
            if (std::abs(step) < 1e-15) break;
        }
        legendre_pair(n, xi, p, dp);
        x[static_cast<size_t>(k)] = -xi;
        x[static_cast<size_t>(n - 1 - k)] = xi;
        const double wk = 2.0 / ((1.0 - xi * xi) * dp * dp);
        w[static_cast<size_t>(k)] = wk;
        w[static_cast<size_t>(n - 1 - k)] = wk;
    }
    if (n % 2 == 1) x[static_cast<size_t>(half - 1)] = 0.0;
}

const std::vector<double>& gl15_x() {
    static std::vector<double> x, w;
    if (x.empty()) legendre_rule(15, x, w);
    return x;
}
const std::vector<double>& gl15_w() {
    static std::vector<double> x, w;
    if (w.empty()) legendre_rule(15, x, w);
    return w;
}

} // namespace

QuadResult adaptive_gk(const std::function<double(double)>& f, double a, double b,
                       double rel_tol, double abs_floor, double max_panel_width,
                       int max_panels) {
    if (b <= a) return {0.0, 0.0};
    std::priority_queue<Panel> heap;
    double total = 0.0, toterr = 0.0, totabs = 0.0;
    const double width = b - a;
    const int n0 = std::max(1, static_cast<int>(std::ceil(width / max_panel_width)));
    for (int k = 0; k < n0; ++k) {
        Panel p = gk15(f, a + width * k / n0, a + width * (k + 1) / n0);
        total += p.value;
        toterr += p.err;
        totabs += std::abs(p.value);
        heap.push(p);
    }
    int used = n0;
    auto target = [&] {
        return std::max({rel_tol * std::abs(total), abs_floor,
                         1e-15 * totabs});
    };
    while (toterr > target()) {
        if (used >= max_panels)
            throw QuadratureNotConverged("panel budget exhausted: err=" +
                                         std::to_string(toterr));
        Panel worst = heap.top();
        heap.pop();
        total -= worst.value;
        toterr -= worst.err;
        totabs -= std::abs(worst.value);
        const double mid = 0.5 * (worst.a + worst.b);
        for (const Panel& p : {gk15(f, worst.a, mid), gk15(f, mid, worst.b)}) {
            total += p.value;
            toterr += p.err;
            totabs += std::abs(p.value);
            heap.push(p);
        }
        ++used;
    }
    return {total, toterr};
}

FixedRule composite_gl15(double a, double b, double panel_width) {
    FixedRule r;
    if (b <= a) return r;
    const int np = std::max(1, static_cast<int>(std::ceil((b - a) / panel_width)));
    const auto& xs = gl15_x();
    const auto& ws = gl15_w();
    r.x.reserve(static_cast<size_t>(np) * 15);
    r.w.reserve(static_cast<size_t>(np) * 15);
    for (int k = 0; k < np; ++k) {
        const double lo = a + (b - a) * k / np, hi = a + (b - a) * (k + 1) / np;
        const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        for (size_t j = 0; j < 15; ++j) {
            r.x.push_back(c + h * xs[j]);
            r.w.push_back(h * ws[j]);
        }
    }
    return r;
}

FixedRule gl_rule(int n, double a, double b) {
    std::vector<double> x, w;
    legendre_rule(n, x, w);
    FixedRule r;
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    r.x.reserve(static_cast<size_t>(n));
    r.w.reserve(static_cast<size_t>(n));
    for (size_t j = 0; j < x.size(); ++j) {
        r.x.push_back(c + h * x[j]);
        r.w.push_back(h * w[j]);
    }
    return r;
}

} // namespace carnot
