#include "carnot/algebra.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

namespace carnot {

namespace {
// factorial of the step, used in the homogeneous-norm exponents
int factorial(int s) {
    int f = 1;
    for (int i = 2; i <= s; ++i) f *= i;
    return f;
}
} // namespace

StratifiedAlgebra::StratifiedAlgebra(
    std::vector<int> layer_dims,
    const std::vector<std::tuple<int, int, int, double>>& brackets)
    : layer_dims_(std::move(layer_dims)) {
    if (layer_dims_.empty())
        throw ValidationError("layer_dims must be non-empty");
    if (layer_dims_.size() > 3)
        throw StepUnsupported("step " + std::to_string(layer_dims_.size()) +
                              " not supported (max 3)");
    dim_ = 0;
    for (size_t l = 0; l < layer_dims_.size(); ++l) {
        if (layer_dims_[l] <= 0)
            throw ValidationError("layer " + std::to_string(l + 1) +
                                  " has non-positive dimension");
        for (int k = 0; k < layer_dims_[l]; ++k) weights_.push_back(static_cast<int>(l) + 1);
        dim_ += layer_dims_[l];
    }
    c_.assign(static_cast<size_t>(dim_) * dim_ * dim_, 0.0);
    auto at = [&](int i, int j, int k) -> double& {
        return c_[(static_cast<size_t>(i) * dim_ + j) * dim_ + k];
    };
    for (auto& [i, j, k, v] : brackets) {
        if (i < 0 || i >= dim_ || j < 0 || j >= dim_ || k < 0 || k >= dim_)
            throw ValidationError("bracket index out of range",
                                  {i + 1, j + 1, k + 1});
        if (v == 0.0) continue;
        // install the entry and its antisymmetric mirror; re-listing both
        // orientations is allowed as long as the values agree
        if (at(i, j, k) != 0.0 && at(i, j, k) != v)
            throw ValidationError("conflicting bracket entries (antisymmetry)",
                                  {i + 1, j + 1, k + 1});
        if (at(j, i, k) != 0.0 && at(j, i, k) != -v)
            throw ValidationError("conflicting bracket entries (antisymmetry)",
                                  {j + 1, i + 1, k + 1});
        at(i, j, k) = v;
        at(j, i, k) = -v;
    }
    validate();
}

void StratifiedAlgebra::validate() const {
    const int N = dim_;
    // diagonal antisymmetry: [e_i, e_i] = 0
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < N; ++k)
            if (structure_constant(i, i, k) != 0.0)
                throw ValidationError("nonzero [e_i,e_i]", {i + 1, i + 1, k + 1});
    // grading: c^k_{ij} = 0 unless w_k = w_i + w_j
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k)
                if (structure_constant(i, j, k) != 0.0 &&
                    weights_[k] != weights_[i] + weights_[j])
                    throw ValidationError("bracket violates grading",
                                          {i + 1, j + 1, k + 1});
    // Jacobi: sum_m c^m_{ij} c^l_{mk} + c^m_{jk} c^l_{mi} + c^m_{ki} c^l_{mj} = 0
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j)
            for (int k = j + 1; k < N; ++k)
                for (int l = 0; l < N; ++l) {
                    double s = 0.0;
                    for (int m = 0; m < N; ++m)
                        s += structure_constant(i, j, m) * structure_constant(m, k, l) +
                             structure_constant(j, k, m) * structure_constant(m, i, l) +
                             structure_constant(k, i, m) * structure_constant(m, j, l);
                    if (std::abs(s) > 1e-12)
                        throw ValidationError("Jacobi identity fails",
                                              {i + 1, j + 1, k + 1, l + 1});
                }
}

int StratifiedAlgebra::homogeneous_dimension() const {
    int q = 0;
    for (size_t l = 0; l < layer_dims_.size(); ++l)
        q += static_cast<int>(l + 1) * layer_dims_[l];
    return q;
}

void StratifiedAlgebra::check_point(const GroupPoint& x) const {
    if (x.size() != dim_)
        throw GridMismatch("point has dimension " + std::to_string(x.size()) +
                           ", algebra has " + std::to_string(dim_));
}

std::vector<double> StratifiedAlgebra::bracket(const std::vector<double>& u,
                                               const std::vector<double>& v) const {
    const int N = dim_;
    std::vector<double> out(static_cast<size_t>(N), 0.0);
    for (int i = 0; i < N; ++i) {
        if (u[static_cast<size_t>(i)] == 0.0) continue;
        for (int j = 0; j < N; ++j) {
            if (v[static_cast<size_t>(j)] == 0.0) continue;
            const double uv = u[static_cast<size_t>(i)] * v[static_cast<size_t>(j)];
            for (int k = 0; k < N; ++k) {
                const double cijk = structure_constant(i, j, k);
                if (cijk != 0.0) out[static_cast<size_t>(k)] += cijk * uv;
            }
        }
    }
    return out;
}

GroupPoint StratifiedAlgebra::product(const GroupPoint& x, const GroupPoint& y) const {
    check_point(x);
    check_point(y);
    const int N = dim_;
    std::vector<double> z(x.c);
    for (int k = 0; k < N; ++k) z[static_cast<size_t>(k)] += y[k];
    const auto xy = bracket(x.c, y.c);
    for (int k = 0; k < N; ++k) z[static_cast<size_t>(k)] += 0.5 * xy[static_cast<size_t>(k)];
    if (step() >= 3) {
        const auto xxy = bracket(x.c, xy);
        std::vector<double> yx(xy.size());
        for (size_t k = 0; k < xy.size(); ++k) yx[k] = -xy[k];  // [y,x] = -[x,y]
        const auto yyx = bracket(y.c, yx);
        for (int k = 0; k < N; ++k)
            z[static_cast<size_t>(k)] +=
                (xxy[static_cast<size_t>(k)] + yyx[static_cast<size_t>(k)]) / 12.0;
    }
    return GroupPoint(std::move(z));
}

GroupPoint StratifiedAlgebra::inverse(const GroupPoint& x) const {
    check_point(x);
    std::vector<double> z(x.c);
    for (auto& v : z) v = -v;
    return GroupPoint(std::move(z));
}

GroupPoint StratifiedAlgebra::dilate(double r, const GroupPoint& x) const {
    check_point(x);
    if (!(r > 0.0)) throw NonPositiveRadius("dilation radius must be positive");
    std::vector<double> z(x.c);
    for (int i = 0; i < dim_; ++i)
        z[static_cast<size_t>(i)] *= std::pow(r, weights_[static_cast<size_t>(i)]);
    return GroupPoint(std::move(z));
}

double StratifiedAlgebra::hom_norm(const GroupPoint& x) const {
    check_point(x);
    const int sfac2 = 2 * factorial(step());
    double acc = 0.0;
    int off = 0;
    for (int l = 1; l <= step(); ++l) {
        double layer2 = 0.0;  // |X_l|^2
        for (int k = 0; k < layer_dims_[static_cast<size_t>(l - 1)]; ++k) {
            const double v = x[off + k];
            layer2 += v * v;
        }
        off += layer_dims_[static_cast<size_t>(l - 1)];
        // |X_l|^{2 s!/l} = (|X_l|^2)^{s!/l}; s!/l is integral for l <= s
        acc += std::pow(layer2, static_cast<double>(factorial(step()) / l));
    }
    return std::pow(acc, 1.0 / static_cast<double>(sfac2));
}

StratifiedAlgebra heisenberg() {
    return StratifiedAlgebra({2, 1}, {{0, 1, 2, 1.0}});
}

StratifiedAlgebra euclidean(int n) {
    if (n < 1) throw ValidationError("euclidean dimension must be >= 1");
    return StratifiedAlgebra({n}, {});
}

StratifiedAlgebra load_algebra(std::istream& in) {
    int dim = -1, step = -1;
    std::vector<int> layer_dims;
    std::vector<std::tuple<int, int, int, double>> brackets;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        auto bad = [&](const std::string& what) {
            throw ValidationError("line " + std::to_string(lineno) + ": " + what);
        };
        if (key == "dim") {
            if (!(ls >> dim)) bad("unreadable dim");
        } else if (key == "step") {
            if (!(ls >> step)) bad("unreadable step");
        } else if (key == "layer_dims") {
            int d;
            while (ls >> d) layer_dims.push_back(d);
            if (layer_dims.empty()) bad("empty layer_dims");
        } else if (key == "bracket") {
            int i, j, k;
            double v;
            if (!(ls >> i >> j >> k >> v)) bad("unreadable bracket entry");
            brackets.emplace_back(i - 1, j - 1, k - 1, v);  // file is 1-based
        } else {
            bad("unknown key '" + key + "'");
        }
    }
    if (dim < 0 || step < 0 || layer_dims.empty())
        throw ValidationError("missing dim/step/layer_dims");
    if (static_cast<int>(layer_dims.size()) != step)
        throw ValidationError("layer_dims count differs from step");
    int total = 0;
    for (int d : layer_dims) total += d;
    if (total != dim)
        throw ValidationError("layer_dims do not sum to dim");
    return StratifiedAlgebra(layer_dims, brackets);
}

StratifiedAlgebra load_algebra_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open algebra file: " + path);
    return load_algebra(in);
}

void save_algebra(std::ostream& out, const StratifiedAlgebra& a) {
    out << "# carnot-algebra\n";
    out << "dim " << a.dim() << "\n";
    out << "step " << a.step() << "\n";
    out << "layer_dims";
    for (int d : a.layer_dims()) out << ' ' << d;
    out << "\n";
    const int N = a.dim();
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j)
            for (int k = 0; k < N; ++k) {
                const double v = a.structure_constant(i, j, k);
                if (v != 0.0)
                    out << "bracket " << i + 1 << ' ' << j + 1 << ' ' << k + 1
                        << ' ' << v << "\n";
            }
}

} // namespace carnot
