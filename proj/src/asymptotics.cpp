#include "carnot/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "carnot/parallel.hpp"

namespace carnot {

namespace {

bool is_heisenberg(const StratifiedAlgebra& alg) {
    return alg.dim() == 3 && alg.step() == 2 &&
           alg.layer_dims() == std::vector<int>{2, 1} &&
           alg.structure_constant(0, 1, 2) == 1.0;
}

} // namespace

ConvolveResult solve_cauchy(const GridFunction& f0, const KernelSpec& spec, double t,
                            const std::vector<GroupPoint>& out,
                            const ConvolveControls& ctl) {
    return group_convolve_kernel(f0, spec, t, out, ctl);
}

CauchySample sample_cauchy_grid(const GridFunction& f0, const KernelSpec& spec,
                                const FrameCoefficients& frame, double t,
                                const ExpansionControls& ctl) {
    if (!(frame.algebra() == f0.alg))
        throw GridMismatch("frame and data use different algebras");
    CauchySample s;
    s.t = t;
    s.geom = self_similar_geometry(f0.alg, t, ctl.radii, ctl.res);
    GridFunction ft = group_convolve_kernel_grid(f0, spec, t, s.geom, ctl.conv,
                                                 &s.conv_err);
    const int n = f0.dim();
    const size_t count = ft.values.size();
    s.pt.assign(count, 0.0);
    s.xpt_inv.assign(static_cast<size_t>(n), std::vector<double>(count, 0.0));

    if (spec.kind == KernelKind::euclidean_gaussian) {
        parallel_for(count, [&](size_t flat) {
            const GroupPoint g = ft.node(flat);
            double r2 = 0.0;
            for (int k = 0; k < n; ++k) r2 += g[k] * g[k];
            const double p = std::pow(4.0 * M_PI * t, -0.5 * n) * std::exp(-r2 / (4.0 * t));
            s.pt[flat] = p;
            // (X^i P_t)(-g) = g_i/(2t) P_t(g) by symmetry of the Gaussian
            for (int i = 0; i < n; ++i)
                s.xpt_inv[static_cast<size_t>(i)][flat] = g[i] / (2.0 * t) * p;
        });
    } else {
        if (!is_heisenberg(f0.alg))
            throw ConfigError("this kernel needs data on the Heisenberg group");
        const double ct = 1.0 / (2.0 * M_PI * M_PI * t * t);
        parallel_for(count, [&](size_t flat) {
            const GroupPoint g = ft.node(flat);
            const double sigma = (g[0] * g[0] + g[1] * g[1]) / (2.0 * t);
            s.pt[flat] = ct * detail::gaveau_table_eval(detail::GaveauFlavor::plain,
                                                        sigma, 2.0 * g[2] / t);
            // derivatives at the inverse point y = -g (same sigma, flipped a)
            const GroupPoint y({-g[0], -g[1], -g[2]});
            const double ay = 2.0 * y[2] / t;
            const double imf =
                detail::gaveau_table_eval(detail::GaveauFlavor::mfac, sigma, ay);
            const double its =
                detail::gaveau_table_eval(detail::GaveauFlavor::tausin, sigma, ay);
            for (int i = 0; i < n; ++i) {
                const double c0 = frame.coeff_value(i, 0, y);
                const double c1 = frame.coeff_value(i, 1, y);
                const double c2 = frame.coeff_value(i, 2, y);
                s.xpt_inv[static_cast<size_t>(i)][flat] =
                    ct * (-(c0 * y[0] + c1 * y[1]) / t * imf - 2.0 * c2 / t * its);
            }
        });
    }
    s.ft = std::move(ft.values);
    return s;
}

double residual_from_sample(const CauchySample& s, const MomentVector& m, int order,
                            double q, const std::optional<std::vector<int>>& indices) {
    if (order < 0 || order > 1)
        throw ConfigError("expansion orders 0 and 1 are supported");
    if (!(q >= 1.0) && !std::isinf(q))
        throw InvalidNormPair("residual norm needs q >= 1 or q = inf");
    std::vector<int> idx;
    if (order == 1) {
        if (indices) {
            idx = *indices;
            for (int i : idx)
                if (i < 0 || static_cast<size_t>(i) >= s.xpt_inv.size() ||
                    static_cast<size_t>(i) >= m.a.size())
                    throw ConfigError("expansion index has no sampled term or moment");
        } else {
            for (size_t i = 0; i < m.a.size() && i < s.xpt_inv.size(); ++i)
                idx.push_back(static_cast<int>(i));
        }
    }
    const double vol = s.geom.cell_volume();
    double acc = 0.0;
    for (size_t flat = 0; flat < s.ft.size(); ++flat) {
        double e = m.a0 * s.pt[flat];
        for (int i : idx)
            e += m.a[static_cast<size_t>(i)] * s.xpt_inv[static_cast<size_t>(i)][flat];
        const double d = std::abs(s.ft[flat] - e);
        if (std::isinf(q))
            acc = std::max(acc, d);
        else
            acc += std::pow(d, q);
    }
    return std::isinf(q) ? acc : std::pow(acc * vol, 1.0 / q);
}

double expansion_residual(const GridFunction& f0, const KernelSpec& spec,
                          const FrameCoefficients& frame, int order, double t,
                          double q, const ExpansionControls& ctl) {
    const CauchySample s = sample_cauchy_grid(f0, spec, frame, t, ctl);
    const MomentVector m = ctl.moment_override ? *ctl.moment_override : moments(f0);
    return residual_from_sample(s, m, order, q, ctl.expansion_indices);
}

double predicted_slope(const StratifiedAlgebra& alg, double p, double q, int order) {
    if (order < 0) throw ConfigError("expansion order must be >= 0");
    const double big_q = alg.homogeneous_dimension();
    if (!(p >= 1.0)) throw InvalidNormPair("need p >= 1");
    if (!(p < big_q / (big_q - 1.0)))
        throw InvalidNormPair("p must stay below Q/(Q-1)");
    const bool qinf = std::isinf(q);
    if (!qinf && !(q >= p)) throw InvalidNormPair("need p <= q");
    const double inv_q = qinf ? 0.0 : 1.0 / q;
    return -0.5 * big_q * (1.0 / p - inv_q) - 0.5 * (order + 1);
}

SlopeFit fit_decay_slope(const std::vector<double>& times,
                         const std::vector<double>& residuals) {
    if (times.size() != residuals.size())
        throw ConfigError("times and residuals must pair up");
    const size_t n = times.size();
    if (n < 4) throw DegenerateFit("need at least 4 samples");
    double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
    for (size_t k = 0; k < n; ++k) {
        if (!(times[k] > 0.0)) throw DegenerateFit("times must be positive");
        if (!(residuals[k] > 0.0))
            throw DegenerateFit("residuals must be positive to fit in log scale");
        rmin = std::min(rmin, residuals[k]);
        rmax = std::max(rmax, residuals[k]);
    }
    if (!(rmax / rmin >= 100.0))
        throw DegenerateFit("residuals span less than two decades");
    std::vector<double> x(n), y(n);
    for (size_t k = 0; k < n; ++k) {
        x[k] = std::log(times[k]);
        y[k] = std::log(residuals[k]);
    }
    double xm = 0.0, ym = 0.0;
    for (size_t k = 0; k < n; ++k) {
        xm += x[k];
        ym += y[k];
    }
    xm /= static_cast<double>(n);
    ym /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (size_t k = 0; k < n; ++k) {
        sxx += (x[k] - xm) * (x[k] - xm);
        sxy += (x[k] - xm) * (y[k] - ym);
    }
    if (!(sxx > 0.0)) throw DegenerateFit("times are all equal");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    double sse = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const double e = y[k] - ym - fit.slope * (x[k] - xm);
        sse += e * e;
    }
    fit.stderr_ = std::sqrt(sse / (static_cast<double>(n) - 2.0) / sxx);
    return fit;
}

std::vector<DecayReport> run_decay_experiments(
    const GridFunction& f0, const KernelSpec& spec, const FrameCoefficients& frame,
    const std::vector<ExperimentRequest>& requests, const std::vector<double>& times,
    const ExperimentControls& ctl) {
    std::vector<CauchySample> samples;
    samples.reserve(times.size());
    for (double t : times)
        samples.push_back(sample_cauchy_grid(f0, spec, frame, t, ctl.expansion));
    const MomentVector base = moments(f0);

    std::vector<DecayReport> reports;
    reports.reserve(requests.size());
    for (const ExperimentRequest& req : requests) {
        DecayReport rep;
        rep.times = times;
        rep.order = req.order;
        rep.p = req.p;
        rep.q = req.q;
        rep.slope_tol = ctl.slope_tol;
        rep.predicted = predicted_slope(f0.alg, req.p, req.q, req.order);
        const MomentVector m = req.moment_override ? *req.moment_override : base;
        const std::optional<std::vector<int>>& idx =
            req.expansion_indices ? req.expansion_indices
                                  : ctl.expansion.expansion_indices;
        for (const CauchySample& s : samples)
            rep.residual_norms.push_back(
                residual_from_sample(s, m, req.order, req.q, idx));
        const SlopeFit fit = fit_decay_slope(times, rep.residual_norms);
        rep.fitted_slope = fit.slope;
        rep.slope_stderr = fit.stderr_;
        rep.pass = rep.fitted_slope <= rep.predicted + rep.slope_tol;
        reports.push_back(std::move(rep));
    }
    return reports;
}

DecayReport run_decay_experiment(const GridFunction& f0, const KernelSpec& spec,
                                 const FrameCoefficients& frame, int order, double p,
                                 double q, const std::vector<double>& times,
                                 const ExperimentControls& ctl) {
    ExperimentRequest req;
    req.order = order;
    req.p = p;
    req.q = q;
    return run_decay_experiments(f0, spec, frame, {req}, times, ctl).front();
}

} // namespace carnot
