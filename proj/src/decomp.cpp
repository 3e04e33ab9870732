#include "carnot/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "carnot/parallel.hpp"
#include "carnot/quadrature.hpp"

namespace carnot {

namespace {

double ipow(double v, int e) {
    double r = 1.0;
    for (; e > 0; --e) r *= v;
    return r;
}

// quintic C^2 step 1 - 10 s^3 + 15 s^4 - 6 s^5 and its derivatives
double qstep(double s) { return 1.0 + s * s * s * (-10.0 + s * (15.0 - 6.0 * s)); }
double qstep1(double s) { return s * s * (-30.0 + s * (60.0 - 30.0 * s)); }
double qstep2(double s) { return s * (-60.0 + s * (180.0 - 120.0 * s)); }

// Per-node radial integrals along the dilation ray through x:
//   K = Int_1^{u_exit} f0(delta_u x) u^{Q-1} du
//   J = Int_1^{u_exit} f0(delta_u x) (u - 1) u^{Q-1} du
// computed in the homogeneous-norm variable v = u ||x||, which keeps the
// integration window O(1) uniformly down to the origin.
struct RayQuad {
    const GridFunction* f0;
    int q = 0;
    std::vector<double> lo, hi;  // node hull of the data box
    std::vector<int> w;
    FixedRule unit;

    RayQuad(const GridFunction& f, int nodes) : f0(&f) {
        if (nodes < 2) throw ConfigError("radial rule needs at least 2 nodes");
        q = f.alg.homogeneous_dimension();
        const int n = f.dim();
        lo.resize(static_cast<size_t>(n));
        hi.resize(static_cast<size_t>(n));
        w.assign(f.alg.weights().begin(), f.alg.weights().end());
        for (int k = 0; k < n; ++k) {
            lo[static_cast<size_t>(k)] = f.geom.origin[static_cast<size_t>(k)];
            hi[static_cast<size_t>(k)] =
                f.geom.origin[static_cast<size_t>(k)] +
                f.geom.spacing[static_cast<size_t>(k)] * (f.geom.shape[static_cast<size_t>(k)] - 1);
        }
        unit = gl_rule(nodes, 0.0, 1.0);
    }

    // dilation factor at which the ray u -> delta_u x leaves the data box
    double u_exit(const GroupPoint& x) const {
        double ue = std::numeric_limits<double>::infinity();
        for (size_t k = 0; k < lo.size(); ++k) {
            const double xa = x[static_cast<int>(k)];
            if (xa > 0.0)
                ue = std::min(ue, std::pow(hi[k] / xa, 1.0 / w[k]));
            else if (xa < 0.0)
                ue = std::min(ue, std::pow(lo[k] / xa, 1.0 / w[k]));
        }
        return ue;
    }

    void integrals(const GroupPoint& x, double& K, double& J) const {
        K = 0.0;
        J = 0.0;
        const double rho = f0->alg.hom_norm(x);
        const double ue = u_exit(x);
        if (!(rho > 0.0) || !(ue > 1.0) || !std::isfinite(ue)) return;
        const double v0 = rho, v1 = rho * ue;
        GroupPoint p(std::vector<double>(lo.size(), 0.0));
        for (size_t g = 0; g < unit.x.size(); ++g) {
            const double v = v0 + (v1 - v0) * unit.x[g];
            const double wq = (v1 - v0) * unit.w[g];
            const double u = v / rho;
            for (size_t k = 0; k < lo.size(); ++k)
                p.c[k] = ipow(u, w[k]) * x[static_cast<int>(k)];
            const double fv = f0->interpolate(p);
            if (fv == 0.0) continue;
            const double core = wq * fv * ipow(v, q - 1);
            K += core;
            J += core * (v - rho);
        }
        K *= std::pow(rho, -q);
        J *= std::pow(rho, -q - 1);
    }
};

void check_frame_matches(const FrameCoefficients& frame, const GridFunction& f0) {
    if (!(frame.algebra() == f0.alg))
        throw GridMismatch("frame and data use different algebras");
}

} // namespace

MomentVector moments(const GridFunction& f0) {
    MomentVector m;
    const int nh = f0.alg.horizontal_dim();
    m.a.assign(static_cast<size_t>(nh), 0.0);
    const double vol = f0.geom.cell_volume();
    std::vector<int> idx;
    for (size_t flat = 0; flat < f0.values.size(); ++flat) {
        const double v = f0.values[flat];
        if (v == 0.0) continue;
        m.a0 += v;
        f0.unflatten(flat, idx);
        const GroupPoint x = f0.node(idx);
        for (int i = 0; i < nh; ++i) m.a[static_cast<size_t>(i)] += v * x[i];
    }
    m.a0 *= vol;
    for (double& a : m.a) a *= vol;
    return m;
}

TestFunction quintic_bump(int dim, double r_flat, double r_zero,
                          const std::vector<double>& center, double height) {
    if (dim < 1) throw ConfigError("test function needs dim >= 1");
    if (!(r_flat > 0.0) || !(r_zero > r_flat))
        throw NonPositiveRadius("need 0 < r_flat < r_zero");
    std::vector<double> c = center;
    if (c.empty()) c.assign(static_cast<size_t>(dim), 0.0);
    if (c.size() != static_cast<size_t>(dim))
        throw ConfigError("center rank does not match dim");
    const double span = r_zero - r_flat;

    auto radius = [c](const GroupPoint& x) {
        double r2 = 0.0;
        for (size_t k = 0; k < c.size(); ++k) {
            const double d = x[static_cast<int>(k)] - c[k];
            r2 += d * d;
        }
        return std::sqrt(r2);
    };

    TestFunction phi;
    phi.value = [radius, c, r_flat, span, height](const GroupPoint& x) {
        const double s = (radius(x) - r_flat) / span;
        if (s <= 0.0) return height;
        if (s >= 1.0) return 0.0;
        return height * qstep(s);
    };
    phi.gradient = [radius, c, r_flat, span, height](const GroupPoint& x) {
        const size_t n = c.size();
        std::vector<double> g(n, 0.0);
        const double r = radius(x);
        const double s = (r - r_flat) / span;
        if (s <= 0.0 || s >= 1.0) return g;
        const double f = height * qstep1(s) / (span * r);
        for (size_t k = 0; k < n; ++k) g[k] = f * (x[static_cast<int>(k)] - c[k]);
        return g;
    };
    phi.hessian = [radius, c, r_flat, span, height](const GroupPoint& x) {
        const size_t n = c.size();
        std::vector<double> h(n * n, 0.0);
        const double r = radius(x);
        const double s = (r - r_flat) / span;
        if (s <= 0.0 || s >= 1.0) return h;
        const double q1 = height * qstep1(s), q2 = height * qstep2(s);
        for (size_t l = 0; l < n; ++l) {
            const double ul = (x[static_cast<int>(l)] - c[l]) / r;
            for (size_t k = 0; k < n; ++k) {
                const double uk = (x[static_cast<int>(k)] - c[k]) / r;
                double v = q2 * ul * uk / (span * span) - q1 * ul * uk / (span * r);
                if (l == k) v += q1 / (span * r);
                h[l * n + k] = v;
            }
        }
        return h;
    };
    double cn = 0.0;
    for (double v : c) cn += v * v;
    phi.support_radius = r_zero + std::sqrt(cn);
    return phi;
}

TestFunction test_sum(const TestFunction& a, const TestFunction& b) {
    TestFunction s;
    s.value = [a, b](const GroupPoint& x) { return a.value(x) + b.value(x); };
    s.gradient = [a, b](const GroupPoint& x) {
        std::vector<double> g = a.gradient(x);
        const std::vector<double> h = b.gradient(x);
        for (size_t k = 0; k < g.size(); ++k) g[k] += h[k];
        return g;
    };
    s.hessian = [a, b](const GroupPoint& x) {
        std::vector<double> g = a.hessian(x);
        const std::vector<double> h = b.hessian(x);
        for (size_t k = 0; k < g.size(); ++k) g[k] += h[k];
        return g;
    };
    s.support_radius = std::max(a.support_radius, b.support_radius);
    return s;
}

GridFunction field_F_first(const GridFunction& f0, int i, const RadialQuadControls& ctl) {
    if (i < 0 || i >= f0.dim()) throw ConfigError("field index out of range");
    const RayQuad ray(f0, ctl.nodes);
    const double wi = f0.alg.weights()[static_cast<size_t>(i)];
    GridFunction out(f0.alg, f0.geom);
    parallel_for(out.values.size(), [&](size_t flat) {
        const GroupPoint x = out.node(flat);
        double k = 0.0, j = 0.0;
        ray.integrals(x, k, j);
        out.values[flat] = wi * x[i] * k;
    });
    return out;
}

GridFunction field_F_second(const GridFunction& f0, int i, const RadialQuadControls& ctl) {
    if (i < 0 || i >= f0.dim()) throw ConfigError("field index out of range");
    if (ctl.nodes < 2) throw ConfigError("radial rule needs at least 2 nodes");
    const int q = f0.alg.homogeneous_dimension();
    const std::vector<int>& w = f0.alg.weights();
    const double wi = w[static_cast<size_t>(i)];
    const FixedRule unit = gl_rule(ctl.nodes, 0.0, 1.0);
    GridFunction out(f0.alg, f0.geom);
    parallel_for(out.values.size(), [&](size_t flat) {
        const GroupPoint x = out.node(flat);
        const double rho = f0.alg.hom_norm(x);
        if (!(rho > 0.0)) {
            out.values[flat] = 0.0;
            return;
        }
        GroupPoint p(std::vector<double>(static_cast<size_t>(f0.dim()), 0.0));
        double acc = 0.0;
        for (size_t g = 0; g < unit.x.size(); ++g) {
            const double v = rho * unit.x[g];
            const double r = v / rho;
            for (int k = 0; k < f0.dim(); ++k)
                p.c[static_cast<size_t>(k)] = ipow(r, w[static_cast<size_t>(k)]) * x[k];
            const double fv = f0.interpolate(p);
            if (fv != 0.0) acc += rho * unit.w[g] * fv * ipow(v, q - 1);
        }
        out.values[flat] = wi * x[i] * acc * std::pow(rho, -q);
    });
    return out;
}

int Order1Fields::pair_index(int i, int j) const {
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= dim) throw ConfigError("pair index out of range");
    return i * dim - i * (i - 1) / 2 + (j - i);
}

Order1Fields fields_F_order1(const GridFunction& f0, const RadialQuadControls& ctl) {
    const RayQuad ray(f0, ctl.nodes);
    const int n = f0.dim();
    const std::vector<int>& w = f0.alg.weights();
    Order1Fields out;
    out.dim = n;

    std::vector<double> jvals(f0.values.size());
    parallel_for(jvals.size(), [&](size_t flat) {
        const GroupPoint x = f0.node(flat);
        double k = 0.0, j = 0.0;
        ray.integrals(x, k, j);
        jvals[flat] = j;
    });

    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            GridFunction g(f0.alg, f0.geom);
            const double c = w[static_cast<size_t>(i)] * w[static_cast<size_t>(j)];
            for (size_t flat = 0; flat < g.values.size(); ++flat) {
                const GroupPoint x = g.node(flat);
                g.values[flat] = c * x[i] * x[j] * jvals[flat];
            }
            out.f_pair.push_back(std::move(g));
        }
    for (int i = f0.alg.horizontal_dim(); i < n; ++i) {
        GridFunction g(f0.alg, f0.geom);
        const double c = w[static_cast<size_t>(i)] * (w[static_cast<size_t>(i)] - 1.0);
        for (size_t flat = 0; flat < g.values.size(); ++flat) {
            const GroupPoint x = g.node(flat);
            g.values[flat] = c * x[i] * jvals[flat];
        }
        out.f_single.push_back(std::move(g));
    }
    return out;
}

void ray_integrals(const GridFunction& f0, const GroupPoint& x,
                   double& K, double& J, const RadialQuadControls& ctl) {
    const RayQuad ray(f0, ctl.nodes);
    ray.integrals(x, K, J);
}

namespace {

// Panel breakpoints of [lo, hi], geometrically halved toward the point of
// [lo, hi] nearest the origin.  Gauss nodes are panel-interior, so nothing
// is ever evaluated at the blow-up point itself.
std::vector<double> graded_breaks(double lo, double hi, int levels) {
    const double t = std::clamp(0.0, lo, hi);
    std::vector<double> b;
    b.push_back(t);
    for (int side = 0; side < 2; ++side) {
        const double d = (side == 0) ? hi - t : t - lo;
        if (!(d > 0.0)) continue;
        for (int k = levels; k >= 0; --k) {
            const double off = d * std::ldexp(1.0, -k);
            b.push_back(side == 0 ? t + off : t - off);
        }
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

} // namespace

FieldNorms field_lp_norms(const GridFunction& f0, double p,
                          const RadialQuadControls& ctl,
                          int grade_levels, int panel_nodes) {
    if (!(p >= 1.0) || !std::isfinite(p))
        throw ConfigError("field norms need a finite exponent p >= 1");
    if (grade_levels < 2 || panel_nodes < 2)
        throw ConfigError("field norm quadrature needs levels >= 2, nodes >= 2");
    const RayQuad ray(f0, ctl.nodes);
    const int n = f0.dim();
    const std::vector<int>& w = f0.alg.weights();
    const int nh = f0.alg.horizontal_dim();

    // per-axis nodes and weights; the fields vanish outside the dilation
    // shadow of the datum box, which is contained in the box extended to 0
    std::vector<std::vector<double>> ax(static_cast<size_t>(n)),
        aw(static_cast<size_t>(n));
    const FixedRule unit = gl_rule(panel_nodes, 0.0, 1.0);
    for (int k = 0; k < n; ++k) {
        const size_t ks = static_cast<size_t>(k);
        const std::vector<double> br = graded_breaks(std::min(ray.lo[ks], 0.0),
                                                     std::max(ray.hi[ks], 0.0),
                                                     grade_levels);
        for (size_t b = 0; b + 1 < br.size(); ++b) {
            const double len = br[b + 1] - br[b];
            for (size_t g = 0; g < unit.x.size(); ++g) {
                ax[ks].push_back(br[b] + len * unit.x[g]);
                aw[ks].push_back(len * unit.w[g]);
            }
        }
    }

    const int npair = n * (n + 1) / 2;
    FieldNorms out;
    out.first.assign(static_cast<size_t>(n), 0.0);
    out.pairs.assign(static_cast<size_t>(npair), 0.0);
    out.singles.assign(static_cast<size_t>(n - nh), 0.0);

    size_t total = 1;
    for (int k = 0; k < n; ++k) total *= ax[static_cast<size_t>(k)].size();
    GroupPoint x(std::vector<double>(static_cast<size_t>(n), 0.0));
    for (size_t flat = 0; flat < total; ++flat) {
        size_t rem = flat;
        double wt = 1.0;
        for (int k = n - 1; k >= 0; --k) {
            const size_t ks = static_cast<size_t>(k);
            const size_t m = ax[ks].size();
            const size_t idx = rem % m;
            rem /= m;
            x.c[ks] = ax[ks][idx];
            wt *= aw[ks][idx];
        }
        double kv = 0.0, jv = 0.0;
        ray.integrals(x, kv, jv);
        if (kv != 0.0)
            for (int i = 0; i < n; ++i)
                out.first[static_cast<size_t>(i)] +=
                    wt * std::pow(std::fabs(w[static_cast<size_t>(i)] * x[i] * kv), p);
        if (jv != 0.0) {
            int slot = 0;
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j, ++slot) {
                    const double c =
                        w[static_cast<size_t>(i)] * w[static_cast<size_t>(j)];
                    out.pairs[static_cast<size_t>(slot)] +=
                        wt * std::pow(std::fabs(c * x[i] * x[j] * jv), p);
                }
            for (int i = nh; i < n; ++i) {
                const double c =
                    w[static_cast<size_t>(i)] * (w[static_cast<size_t>(i)] - 1.0);
                out.singles[static_cast<size_t>(i - nh)] +=
                    wt * std::pow(std::fabs(c * x[i] * jv), p);
            }
        }
    }
    for (double& v : out.first) v = std::pow(v, 1.0 / p);
    for (double& v : out.pairs) v = std::pow(v, 1.0 / p);
    for (double& v : out.singles) v = std::pow(v, 1.0 / p);
    return out;
}

double weak_residual_order0(const FrameCoefficients& frame, const GridFunction& f0,
                            const TestFunction& phi, const RadialQuadControls& ctl) {
    check_frame_matches(frame, f0);
    const RayQuad ray(f0, ctl.nodes);
    const int n = f0.dim();
    const std::vector<int>& w = f0.alg.weights();
    const double vol = f0.geom.cell_volume();
    const double sr = phi.support_radius;

    std::vector<double> lhs(f0.values.size(), 0.0), rhs(f0.values.size(), 0.0);
    parallel_for(f0.values.size(), [&](size_t flat) {
        const GroupPoint x = f0.node(flat);
        if (sr > 0.0) {
            double r2 = 0.0;
            for (int k = 0; k < n; ++k) r2 += x[k] * x[k];
            if (r2 > sr * sr) return;
        }
        lhs[flat] = f0.values[flat] * phi.value(x) * vol;
        const std::vector<double> g = phi.gradient(x);
        double kk = 0.0, jj = 0.0;
        ray.integrals(x, kk, jj);
        if (kk == 0.0) return;
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            double xi = 0.0;  // (X^i phi)(x)
            for (int k = 0; k < n; ++k)
                xi += frame.coeff_value(i, k, x) * g[static_cast<size_t>(k)];
            s += w[static_cast<size_t>(i)] * x[i] * kk * xi;
        }
        rhs[flat] = s * vol;
    });

    double t_lhs = 0.0, t_rhs = 0.0;
    for (double v : lhs) t_lhs += v;
    for (double v : rhs) t_rhs += v;
    const double a0 = integrate(f0);
    const GroupPoint zero(std::vector<double>(static_cast<size_t>(n), 0.0));
    return std::abs(t_lhs - a0 * phi.value(zero) - t_rhs);
}

double weak_residual_order1(const FrameCoefficients& frame, const GridFunction& f0,
                            const TestFunction& phi, const RadialQuadControls& ctl) {
    check_frame_matches(frame, f0);
    const RayQuad ray(f0, ctl.nodes);
    const int n = f0.dim();
    const std::vector<int>& w = f0.alg.weights();
    const double vol = f0.geom.cell_volume();
    const double sr = phi.support_radius;

    // frame coefficient polynomials and their coordinate derivatives
    std::vector<Polynomial> dp(static_cast<size_t>(n) * n * n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
                dp[(static_cast<size_t>(i) * n + k) * n + l] =
                    frame.coeff(i, k).derivative(l);

    std::vector<double> lhs(f0.values.size(), 0.0), rhs(f0.values.size(), 0.0);
    parallel_for(f0.values.size(), [&](size_t flat) {
        const GroupPoint x = f0.node(flat);
        if (sr > 0.0) {
            double r2 = 0.0;
            for (int k = 0; k < n; ++k) r2 += x[k] * x[k];
            if (r2 > sr * sr) return;
        }
        lhs[flat] = f0.values[flat] * phi.value(x) * vol;
        double kk = 0.0, jj = 0.0;
        ray.integrals(x, kk, jj);
        if (jj == 0.0) return;
        const std::vector<double> g = phi.gradient(x);
        const std::vector<double> h = phi.hessian(x);
        std::vector<double> a(static_cast<size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                a[static_cast<size_t>(i) * n + k] = frame.coeff_value(i, k, x);
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            // (X^i phi)(x) for the singles
            if (w[static_cast<size_t>(i)] >= 2) {
                double xi = 0.0;
                for (int k = 0; k < n; ++k)
                    xi += a[static_cast<size_t>(i) * n + k] * g[static_cast<size_t>(k)];
                s += w[static_cast<size_t>(i)] * (w[static_cast<size_t>(i)] - 1.0) *
                     x[i] * jj * xi;
            }
            for (int j = 0; j < n; ++j) {
                // (X^j X^i phi)(x)
                double xji = 0.0;
                for (int l = 0; l < n; ++l) {
                    const double ajl = a[static_cast<size_t>(j) * n + l];
                    if (ajl == 0.0) continue;
                    double inner = 0.0;
                    for (int k = 0; k < n; ++k) {
                        const Polynomial& d =
                            dp[(static_cast<size_t>(i) * n + k) * n + l];
                        if (!d.is_zero()) inner += d.eval(x) * g[static_cast<size_t>(k)];
                        inner += a[static_cast<size_t>(i) * n + k] *
                                 h[static_cast<size_t>(l) * n + k];
                    }
                    xji += ajl * inner;
                }
                s += w[static_cast<size_t>(i)] * w[static_cast<size_t>(j)] * x[i] * x[j] *
                     jj * xji;
            }
        }
        rhs[flat] = s * vol;
    });

    double t_lhs = 0.0, t_rhs = 0.0;
    for (double v : lhs) t_lhs += v;
    for (double v : rhs) t_rhs += v;
    const MomentVector m = moments(f0);
    const GroupPoint zero(std::vector<double>(static_cast<size_t>(n), 0.0));
    double sub = m.a0 * phi.value(zero);
    for (int i = 0; i < f0.alg.horizontal_dim(); ++i)
        sub += m.a[static_cast<size_t>(i)] * apply_field_test(frame, i, phi, zero);
    return std::abs(t_lhs - sub - t_rhs);
}

double apply_field_test(const FrameCoefficients& frame, int i,
                        const TestFunction& phi, const GroupPoint& x) {
    const int n = frame.dim();
    const std::vector<double> g = phi.gradient(x);
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += frame.coeff_value(i, k, x) * g[static_cast<size_t>(k)];
    return s;
}

double apply_field_test2(const FrameCoefficients& frame, int j, int i,
                         const TestFunction& phi, const GroupPoint& x) {
    const int n = frame.dim();
    const std::vector<double> g = phi.gradient(x);
    const std::vector<double> h = phi.hessian(x);
    double s = 0.0;
    for (int l = 0; l < n; ++l) {
        const double ajl = frame.coeff_value(j, l, x);
        if (ajl == 0.0) continue;
        double inner = 0.0;
        for (int k = 0; k < n; ++k) {
            inner += frame.coeff(i, k).derivative(l).eval(x) * g[static_cast<size_t>(k)];
            inner += frame.coeff_value(i, k, x) * h[static_cast<size_t>(l) * n + k];
        }
        s += ajl * inner;
    }
    return s;
}

namespace {

double q_over_p(const StratifiedAlgebra& alg, double p) {
    if (!(p >= 1.0) && !std::isinf(p)) throw InvalidNormPair("need p >= 1");
    return std::isinf(p) ? 0.0 : alg.homogeneous_dimension() / p;
}

} // namespace

double first_bound_constant(const StratifiedAlgebra& alg, int i, double p) {
    if (i < 0 || i >= alg.dim()) throw ConfigError("index out of range");
    const double qp = q_over_p(alg, p);
    const double wi = alg.weights()[static_cast<size_t>(i)];
    const double denom = qp + wi - alg.homogeneous_dimension();
    if (!(denom > 0.0))
        throw InvalidNormPair("first decomposition bound diverges at this p");
    return wi / denom;
}

double second_bound_constant(const StratifiedAlgebra& alg, int i, double p) {
    if (i < 0 || i >= alg.dim()) throw ConfigError("index out of range");
    const double qp = q_over_p(alg, p);
    const double wi = alg.weights()[static_cast<size_t>(i)];
    const double denom = alg.homogeneous_dimension() - wi - qp;
    if (!(denom > 0.0))
        throw InvalidNormPair("second decomposition bound diverges at this p");
    return wi / denom;
}

double pair_bound_constant(const StratifiedAlgebra& alg, int i, int j, double p) {
    if (i < 0 || i >= alg.dim() || j < 0 || j >= alg.dim())
        throw ConfigError("index out of range");
    const double qp = q_over_p(alg, p);
    const double wi = alg.weights()[static_cast<size_t>(i)];
    const double wj = alg.weights()[static_cast<size_t>(j)];
    const double alpha = wi + wj - 2.0 - alg.homogeneous_dimension() + qp;
    if (!(alpha > -1.0))
        throw InvalidNormPair("pair decomposition bound diverges at this p");
    return wi * wj / ((alpha + 1.0) * (alpha + 2.0));
}

} // namespace carnot
