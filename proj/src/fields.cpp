#include "carnot/fields.hpp"

#include <algorithm>
#include <cmath>

#include "carnot/grid.hpp"

namespace carnot {

void Polynomial::add_term(double coeff, std::vector<int> vars) {
    if (coeff == 0.0) return;
    std::sort(vars.begin(), vars.end());
    for (auto& m : terms)
        if (m.vars == vars) {
            m.coeff += coeff;
            if (m.coeff == 0.0) {
                m = terms.back();
                terms.pop_back();
            }
            return;
        }
    terms.push_back({coeff, std::move(vars)});
}

Polynomial Polynomial::derivative(int var) const {
    Polynomial d;
    for (const auto& m : terms) {
        // product rule over the multiset of variables
        for (size_t p = 0; p < m.vars.size(); ++p) {
            if (m.vars[p] != var) continue;
            std::vector<int> rest;
            rest.reserve(m.vars.size() - 1);
            for (size_t q = 0; q < m.vars.size(); ++q)
                if (q != p) rest.push_back(m.vars[q]);
            d.add_term(m.coeff, std::move(rest));
        }
    }
    return d;
}

FrameCoefficients::FrameCoefficients(StratifiedAlgebra alg) : alg_(std::move(alg)) {
    const int N = alg_.dim();
    a_.resize(static_cast<size_t>(N) * N);
    for (int i = 0; i < N; ++i) {
        for (int k = 0; k < N; ++k) {
            Polynomial& p = a_[static_cast<size_t>(i) * N + k];
            if (i == k) p.add_term(1.0, {});
            for (int j = 0; j < N; ++j) {
                const double cjik = alg_.structure_constant(j, i, k);
                if (cjik != 0.0) p.add_term(0.5 * cjik, {j});
            }
            if (alg_.step() >= 3) {
                // 1/12 [x,[x,e_i]] contribution
                for (int j = 0; j < N; ++j)
                    for (int l = 0; l < N; ++l)
                        for (int m = 0; m < N; ++m) {
                            const double t =
                                alg_.structure_constant(l, i, m) *
                                alg_.structure_constant(j, m, k);
                            if (t != 0.0) p.add_term(t / 12.0, {j, l});
                        }
            }
        }
    }
}

FrameCoefficients left_invariant_frame(const StratifiedAlgebra& alg) {
    if (alg.step() > 3)
        throw StepUnsupported("frames only available for step <= 3");
    return FrameCoefficients(alg);
}

double apply_field_exact(const FrameCoefficients& frame, int i,
                         const SmoothScalar& f, const GroupPoint& x) {
    const auto grad = f.gradient(x);
    double s = 0.0;
    for (int k = 0; k < frame.dim(); ++k) {
        const Polynomial& p = frame.coeff(i, k);
        if (!p.is_zero()) s += p.eval(x) * grad[static_cast<size_t>(k)];
    }
    return s;
}

namespace {

// d/dx_axis of g at flat node index, second order; one-sided at the faces
double partial_at(const GridFunction& g, size_t flat, int axis,
                  const std::vector<int>& idx, const std::vector<size_t>& strides) {
    const int n = g.geom.shape[static_cast<size_t>(axis)];
    const double h = g.geom.spacing[static_cast<size_t>(axis)];
    const size_t st = strides[static_cast<size_t>(axis)];
    const int i = idx[static_cast<size_t>(axis)];
    const auto& v = g.values;
    if (i > 0 && i < n - 1)
        return (v[flat + st] - v[flat - st]) / (2.0 * h);
    if (i == 0)
        return (-3.0 * v[flat] + 4.0 * v[flat + st] - v[flat + 2 * st]) / (2.0 * h);
    return (3.0 * v[flat] - 4.0 * v[flat - st] + v[flat - 2 * st]) / (2.0 * h);
}

std::vector<size_t> axis_strides(const GridGeometry& geom) {
    const size_t N = geom.shape.size();
    std::vector<size_t> s(N, 1);
    for (size_t a = N; a-- > 1;)
        s[a - 1] = s[a] * static_cast<size_t>(geom.shape[a]);
    return s;
}

} // namespace

GridFunction apply_field_grid(const FrameCoefficients& frame, int i,
                              const GridFunction& g) {
    if (!(frame.algebra() == g.alg))
        throw GridMismatch("frame and grid use different algebras");
    const int N = g.dim();
    for (int k = 0; k < N; ++k)
        if (!frame.coeff(i, k).is_zero() && g.geom.shape[static_cast<size_t>(k)] < 3)
            throw GridTooSmall("axis " + std::to_string(k + 1) +
                               " needs >= 3 nodes for the stencil");
    GridFunction out(g.alg, g.geom);
    const auto strides = axis_strides(g.geom);
    std::vector<int> idx(static_cast<size_t>(N), 0);
    const size_t total = g.geom.node_count();
    for (size_t flat = 0; flat < total; ++flat) {
        const GroupPoint x = g.node(flat);
        g.unflatten(flat, idx);
        double s = 0.0;
        for (int k = 0; k < N; ++k) {
            const Polynomial& p = frame.coeff(i, k);
            if (p.is_zero()) continue;
            s += p.eval(x) * partial_at(g, flat, k, idx, strides);
        }
        out.values[flat] = s;
    }
    return out;
}

GridFunction divergence_grid(const FrameCoefficients& frame,
                             const std::vector<GridFunction>& F) {
    if (F.empty()) throw GridMismatch("divergence of empty field list");
    for (const auto& f : F)
        if (!(f.geom == F[0].geom) || !(f.alg == F[0].alg))
            throw GridMismatch("divergence components on mismatched grids");
    GridFunction out(F[0].alg, F[0].geom);
    for (size_t i = 0; i < F.size(); ++i) {
        GridFunction d = apply_field_grid(frame, static_cast<int>(i), F[i]);
        for (size_t k = 0; k < out.values.size(); ++k) out.values[k] += d.values[k];
    }
    return out;
}

} // namespace carnot
