#pragma once
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "carnot/errors.hpp"

namespace carnot {

// A point of the group in exponential coordinates of the first kind.
// Coordinates are grouped by layer: first the n coordinates of layer 1,
// then layer 2, and so on. Haar measure is Lebesgue in these coordinates.
struct GroupPoint {
    std::vector<double> c;

    GroupPoint() = default;
    explicit GroupPoint(std::vector<double> coords) : c(std::move(coords)) {}
    GroupPoint(std::initializer_list<double> coords) : c(coords) {}

    int size() const { return static_cast<int>(c.size()); }
    double& operator[](int i) { return c[static_cast<size_t>(i)]; }
    double operator[](int i) const { return c[static_cast<size_t>(i)]; }
    bool operator==(const GroupPoint&) const = default;
};

// Graded nilpotent (stratified) Lie algebra of step <= 3 together with the
// group structure it induces in exponential coordinates.  Immutable after
// construction; construction validates antisymmetry, the grading constraint
// c^k_{ij} = 0 unless w_k = w_i + w_j, and the Jacobi identity, throwing
// ValidationError with the offending 1-based index triple/quadruple.
class StratifiedAlgebra {
public:
    // `brackets` lists (i, j, k, value) entries, 0-based, meaning
    // [e_i, e_j] has coefficient `value` on e_k.  Each entry also installs
    // the antisymmetric mirror; conflicting duplicates are rejected.
    StratifiedAlgebra(std::vector<int> layer_dims,
                      const std::vector<std::tuple<int, int, int, double>>& brackets);

    int dim() const { return dim_; }
    int step() const { return static_cast<int>(layer_dims_.size()); }
    const std::vector<int>& layer_dims() const { return layer_dims_; }
    // weight (layer index, 1-based) of each basis direction
    const std::vector<int>& weights() const { return weights_; }
    // number of first-layer (horizontal) directions
    int horizontal_dim() const { return layer_dims_[0]; }
    // Q = sum_l l * dim(layer l); governs Haar scaling under dilations
    int homogeneous_dimension() const;

    // c^k_{ij}
    double structure_constant(int i, int j, int k) const {
        return c_[(static_cast<size_t>(i) * dim_ + j) * dim_ + k];
    }

    // [u, v]_k = sum_ij c^k_{ij} u_i v_j
    std::vector<double> bracket(const std::vector<double>& u,
                                const std::vector<double>& v) const;

    // Group law by the BCH formula, exact for step <= 3:
    //   x*y = x + y + 1/2 [x,y] + 1/12 ([x,[x,y]] + [y,[y,x]])
    GroupPoint product(const GroupPoint& x, const GroupPoint& y) const;
    GroupPoint inverse(const GroupPoint& x) const;  // negation
    GroupPoint dilate(double r, const GroupPoint& x) const;  // x_i -> r^{w_i} x_i
    GroupPoint identity() const { return GroupPoint(std::vector<double>(dim_, 0.0)); }

    // Homogeneous norm: with X_l the layer-l coordinate block,
    //   ||x|| = (sum_l |X_l|^{2 s!/l})^{1/(2 s!)}
    // 1-homogeneous under dilations and symmetric under inversion.
    double hom_norm(const GroupPoint& x) const;

    bool operator==(const StratifiedAlgebra& o) const {
        return layer_dims_ == o.layer_dims_ && c_ == o.c_;
    }

private:
    int dim_ = 0;
    std::vector<int> layer_dims_;
    std::vector<int> weights_;        // per-coordinate layer, 1-based
    std::vector<double> c_;           // dense c^k_{ij}, index ((i*N)+j)*N+k
    void validate() const;
    void check_point(const GroupPoint& x) const;
};

// The 3-dimensional Heisenberg group: layers (2,1), [e1,e2] = e3.
StratifiedAlgebra heisenberg();

// Abelian R^n: a single layer, all brackets zero.
StratifiedAlgebra euclidean(int n);

// Key-value text schema:
//   dim <N>
//   step <s>
//   layer_dims <d1> ... <ds>
//   bracket <i> <j> <k> <value>     (1-based, repeated; mirror implied)
// Comments start with '#'.  Loading validates all invariants and throws
// ValidationError naming the first offending triple.
StratifiedAlgebra load_algebra(std::istream& in);
StratifiedAlgebra load_algebra_file(const std::string& path);
void save_algebra(std::ostream& out, const StratifiedAlgebra& a);

} // namespace carnot
