#pragma once
#include <functional>
#include <vector>

#include "carnot/algebra.hpp"

namespace carnot {

struct GridFunction;  // defined in grid.hpp

// Sparse polynomial in the group coordinates: sum of coeff * prod x[vars].
// `vars` holds variable indices with multiplicity, kept sorted.
struct Monomial {
    double coeff = 0.0;
    std::vector<int> vars;
};

struct Polynomial {
    std::vector<Monomial> terms;

    double eval(const GroupPoint& x) const {
        double s = 0.0;
        for (const auto& m : terms) {
            double p = m.coeff;
            for (int v : m.vars) p *= x[v];
            s += p;
        }
        return s;
    }
    bool is_zero() const { return terms.empty(); }
    Polynomial derivative(int var) const;       // d/dx_var
    void add_term(double coeff, std::vector<int> vars);  // merges like terms
};

// Coefficients a_{ik}(x) of the left-invariant frame X^i = sum_k a_{ik} d_k
// obtained by differentiating the group law at the identity:
//   a_{ik}(x) = delta_ik + 1/2 sum_j x_j c^k_{ji}
//             + 1/12 sum_{j,l,m} x_j x_l c^m_{li} c^k_{jm}   (step-3 part)
// Each a_{ik} is homogeneous of weighted degree w_k - w_i, and a_{ik}(0)=delta.
class FrameCoefficients {
public:
    explicit FrameCoefficients(StratifiedAlgebra alg);

    const StratifiedAlgebra& algebra() const { return alg_; }
    int dim() const { return alg_.dim(); }
    const Polynomial& coeff(int i, int k) const {
        return a_[static_cast<size_t>(i) * alg_.dim() + k];
    }
    double coeff_value(int i, int k, const GroupPoint& x) const {
        return coeff(i, k).eval(x);
    }

private:
    StratifiedAlgebra alg_;
    std::vector<Polynomial> a_;
};

FrameCoefficients left_invariant_frame(const StratifiedAlgebra& alg);

// Scalar field given by closures (value and exact gradient).
struct SmoothScalar {
    std::function<double(const GroupPoint&)> value;
    std::function<std::vector<double>(const GroupPoint&)> gradient;
};

// (X^i f)(x) using the exact gradient closure.
double apply_field_exact(const FrameCoefficients& frame, int i,
                         const SmoothScalar& f, const GroupPoint& x);

// (X^i g) on the grid: second-order central differences inside, one-sided
// second-order stencils at the box faces; the output lives on the same box.
GridFunction apply_field_grid(const FrameCoefficients& frame, int i,
                              const GridFunction& g);

// sum_i X^i(F_i) on the grid; all entries must share geometry and algebra.
GridFunction divergence_grid(const FrameCoefficients& frame,
                             const std::vector<GridFunction>& F);

} // namespace carnot
