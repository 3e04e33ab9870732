#pragma once
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "carnot/algebra.hpp"
#include "carnot/kernel.hpp"

namespace carnot {

// Uniform tensor grid: node (i1,...,iN) sits at origin + i*spacing, values
// row-major with the LAST axis fastest.  Nodes are midpoint-rule cell
// centers; integrate() is the midpoint rule, which for smooth compactly
// supported data converges faster than any fixed order.
struct GridGeometry {
    std::vector<double> origin;
    std::vector<double> spacing;
    std::vector<int> shape;

    size_t node_count() const {
        size_t n = 1;
        for (int s : shape) n *= static_cast<size_t>(s);
        return n;
    }
    double cell_volume() const {
        double v = 1.0;
        for (double s : spacing) v *= s;
        return v;
    }
    bool operator==(const GridGeometry&) const = default;
};

struct GridFunction {
    StratifiedAlgebra alg;
    GridGeometry geom;
    std::vector<double> values;

    GridFunction(StratifiedAlgebra a, GridGeometry g)
        : alg(std::move(a)), geom(std::move(g)), values(geom.node_count(), 0.0) {}

    int dim() const { return alg.dim(); }
    size_t flat_index(const std::vector<int>& idx) const;
    void unflatten(size_t flat, std::vector<int>& idx) const;
    GroupPoint node(const std::vector<int>& idx) const;
    GroupPoint node(size_t flat) const;

    // multilinear interpolation; identically 0 outside the stored box
    double interpolate(const GroupPoint& x) const;
};

double integrate(const GridFunction& g);

// (sum_nodes |g(x) * ||x||^radial_power|^p vol)^{1/p}; p = inf gives the max.
double lq_norm(const GridFunction& g, double p, int radial_power = 0);

// Sample a closure on a geometry.
GridFunction sample_on_grid(const StratifiedAlgebra& alg, const GridGeometry& geom,
                            const std::function<double(const GroupPoint&)>& f);

// Dilation-adapted box around the identity: layer-l axes get half-extent
// radii[l-1] * t^{l/2} and `res` nodes (odd `res` puts a node at 0).
GridGeometry self_similar_geometry(const StratifiedAlgebra& alg, double t,
                                   const std::vector<double>& radii, int res);

struct ConvolveControls {
    // per-value absolute skip floor, relative to the kernel peak scale
    // t^{-Q/2}; pair contributions bounded below floor are dropped and
    // accounted in est_abs_err
    double rel_floor = 1e-9;
};

struct ConvolveResult {
    std::vector<double> values;
    double est_abs_err = 0.0;  // uniform bound over out points
};

// (f0 * P_t)(g) = sum_h f0(h) P_t(h^{-1} g) vol, the kernel evaluated
// analytically at the exact group points (no gridding of the kernel).
ConvolveResult group_convolve_kernel(const GridFunction& f0, const KernelSpec& spec,
                                     double t, const std::vector<GroupPoint>& out,
                                     const ConvolveControls& ctl = {});

// Same quadrature, but for a full uniform output grid.  Both entry points
// evaluate the Heisenberg kernel through the shared bicubic tables of the
// scale-free integral (see kernel.hpp), whose frozen absolute bound feeds
// est_abs_err together with the skipped-pair floor.
GridFunction group_convolve_kernel_grid(const GridFunction& f0, const KernelSpec& spec,
                                        double t, const GridGeometry& out,
                                        const ConvolveControls& ctl = {},
                                        double* est_abs_err = nullptr);

// (f * g2)(out) with g2 interpolated multilinearly at the exact group points.
ConvolveResult group_convolve_grids(const GridFunction& f, const GridFunction& g2,
                                    const std::vector<GroupPoint>& out);

// Deterministic synthetic data on their natural boxes, rescaled so the
// midpoint integral equals the documented mass (1) exactly at the sampling
// resolution.  Names: gaussian_bump, shifted_bump, ring, asym_poly_bump.
// Common params: h (spacing).  shifted_bump: a, b, w; gaussian_bump: w;
// ring: rho, wr, wz; asym_poly_bump: w.
GridFunction builtin_datum(const std::string& name,
                           const std::map<std::string, double>& params = {});

// The unnormalized closure behind a builtin datum (for oracle-style tests).
std::function<double(const GroupPoint&)> builtin_profile(
    const std::string& name, const std::map<std::string, double>& params = {});

// CSV: "# carnot-grid N=<n> origin=<..> spacing=<..> shape=<..>" then rows
// i1,...,iN,value.  Missing rows read as 0.
void write_grid_csv(std::ostream& out, const GridFunction& g);
GridFunction read_grid_csv(std::istream& in, const StratifiedAlgebra& alg);

} // namespace carnot
