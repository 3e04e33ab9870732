#include "carnot/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "carnot/parallel.hpp"

namespace carnot {

namespace {

constexpr int kMaxDim = 16;

bool is_heisenberg(const StratifiedAlgebra& alg) {
    return alg.dim() == 3 && alg.step() == 2 &&
           alg.layer_dims() == std::vector<int>{2, 1} &&
           alg.structure_constant(0, 1, 2) == 1.0;
}

} // namespace

size_t GridFunction::flat_index(const std::vector<int>& idx) const {
    const auto& shape = geom.shape;
    if (idx.size() != shape.size()) throw GridMismatch("index rank mismatch");
    size_t f = 0;
    for (size_t k = 0; k < shape.size(); ++k) {
        if (idx[k] < 0 || idx[k] >= shape[k])
            throw GridMismatch("grid index out of range");
        f = f * static_cast<size_t>(shape[k]) + static_cast<size_t>(idx[k]);
    }
    return f;
}

void GridFunction::unflatten(size_t flat, std::vector<int>& idx) const {
    const auto& shape = geom.shape;
    idx.resize(shape.size());
    for (size_t k = shape.size(); k-- > 0;) {
        idx[k] = static_cast<int>(flat % static_cast<size_t>(shape[k]));
        flat /= static_cast<size_t>(shape[k]);
    }
}

GroupPoint GridFunction::node(const std::vector<int>& idx) const {
    std::vector<double> c(geom.shape.size());
    for (size_t k = 0; k < c.size(); ++k)
        c[k] = geom.origin[k] + geom.spacing[k] * idx[k];
    return GroupPoint(std::move(c));
}

GroupPoint GridFunction::node(size_t flat) const {
    std::vector<int> idx;
    unflatten(flat, idx);
    return node(idx);
}

double GridFunction::interpolate(const GroupPoint& x) const {
    const int n = static_cast<int>(geom.shape.size());
    if (n > kMaxDim) throw ConfigError("grid dimension too large");
    std::array<int, kMaxDim> base{};
    std::array<double, kMaxDim> fr{};
    std::array<size_t, kMaxDim> stride{};
    for (int k = 0; k < n; ++k) {
        const double u = (x[k] - geom.origin[k]) / geom.spacing[k];
        if (u <= -1.0 || u >= geom.shape[k]) return 0.0;
        const double fl = std::floor(u);
        base[k] = static_cast<int>(fl);
        fr[k] = u - fl;
    }
    stride[static_cast<size_t>(n - 1)] = 1;
    for (int k = n - 2; k >= 0; --k)
        stride[static_cast<size_t>(k)] =
            stride[static_cast<size_t>(k + 1)] * static_cast<size_t>(geom.shape[static_cast<size_t>(k + 1)]);
    double out = 0.0;
    for (unsigned corner = 0; corner < (1u << n); ++corner) {
        double w = 1.0;
        size_t flat = 0;
        bool inside = true;
        for (int k = 0; k < n; ++k) {
            const int bit = (corner >> k) & 1;
            w *= bit ? fr[k] : 1.0 - fr[k];
            const int b = base[k] + bit;
            if (b < 0 || b >= geom.shape[static_cast<size_t>(k)]) {
                inside = false;
                break;
            }
            flat += static_cast<size_t>(b) * stride[static_cast<size_t>(k)];
        }
        if (inside && w != 0.0) out += w * values[flat];
    }
    return out;
}

double integrate(const GridFunction& g) {
    double s = 0.0;
    for (double v : g.values) s += v;
    return s * g.geom.cell_volume();
}

double lq_norm(const GridFunction& g, double p, int radial_power) {
    if (!std::isinf(p) && !(p >= 1.0))
        throw InvalidNormPair("grid norm needs p >= 1");
    const double vol = g.geom.cell_volume();
    double acc = 0.0;
    std::vector<int> idx;
    for (size_t f = 0; f < g.values.size(); ++f) {
        double v = g.values[f];
        if (v == 0.0) continue;
        if (radial_power != 0) {
            g.unflatten(f, idx);
            v *= std::pow(g.alg.hom_norm(g.node(idx)), radial_power);
        }
        v = std::abs(v);
        if (std::isinf(p))
            acc = std::max(acc, v);
        else
            acc += std::pow(v, p);
    }
    return std::isinf(p) ? acc : std::pow(acc * vol, 1.0 / p);
}

GridFunction sample_on_grid(const StratifiedAlgebra& alg, const GridGeometry& geom,
                            const std::function<double(const GroupPoint&)>& f) {
    if (geom.origin.size() != static_cast<size_t>(alg.dim()) ||
        geom.spacing.size() != geom.origin.size() ||
        geom.shape.size() != geom.origin.size())
        throw GridMismatch("geometry rank does not match the algebra");
    GridFunction g(alg, geom);
    std::vector<int> idx;
    for (size_t flat = 0; flat < g.values.size(); ++flat) {
        g.unflatten(flat, idx);
        g.values[flat] = f(g.node(idx));
    }
    return g;
}

GridGeometry self_similar_geometry(const StratifiedAlgebra& alg, double t,
                                   const std::vector<double>& radii, int res) {
    if (!(t > 0.0)) throw ConfigError("self-similar geometry needs t > 0");
    if (radii.size() != static_cast<size_t>(alg.step()))
        throw ConfigError("need one radius per layer");
    for (double r : radii)
        if (!(r > 0.0)) throw NonPositiveRadius("layer radius must be positive");
    if (res < 3) throw GridTooSmall("need at least 3 nodes per axis");
    GridGeometry geom;
    const int n = alg.dim();
    geom.origin.resize(static_cast<size_t>(n));
    geom.spacing.resize(static_cast<size_t>(n));
    geom.shape.assign(static_cast<size_t>(n), res);
    for (int k = 0; k < n; ++k) {
        const int w = alg.weights()[static_cast<size_t>(k)];
        const double half = radii[static_cast<size_t>(w - 1)] * std::pow(t, 0.5 * w);
        const double sp = 2.0 * half / res;
        geom.spacing[static_cast<size_t>(k)] = sp;
        // -half + sp/2, written so an odd res puts the middle node at exact 0
        geom.origin[static_cast<size_t>(k)] = -(0.5 * (res - 1)) * sp;
    }
    return geom;
}

namespace {

// input data flattened to coordinate arrays with exact zeros dropped
struct CompactInput {
    std::vector<std::vector<double>> coord;  // [axis][entry]
    std::vector<double> f;
    double vol = 0.0;
    double abs_mass = 0.0;  // sum |f| * vol
};

CompactInput compact_input(const GridFunction& f0) {
    CompactInput d;
    const int n = f0.dim();
    d.coord.assign(static_cast<size_t>(n), {});
    d.vol = f0.geom.cell_volume();
    std::vector<int> idx;
    for (size_t flat = 0; flat < f0.values.size(); ++flat) {
        const double v = f0.values[flat];
        if (v == 0.0) continue;
        f0.unflatten(flat, idx);
        const GroupPoint p = f0.node(idx);
        for (int k = 0; k < n; ++k) d.coord[static_cast<size_t>(k)].push_back(p[k]);
        d.f.push_back(v);
        d.abs_mass += std::abs(v);
    }
    d.abs_mass *= d.vol;
    return d;
}

ConvolveResult convolve_core(const GridFunction& f0, const KernelSpec& spec, double t,
                             const std::function<GroupPoint(size_t)>& out_point,
                             size_t n_out, const ConvolveControls& ctl) {
    if (!(t > 0.0)) throw ConfigError("convolution time must be positive");
    ConvolveResult res;
    res.values.assign(n_out, 0.0);
    const CompactInput d = compact_input(f0);

    if (spec.kind == KernelKind::euclidean_gaussian) {
        if (f0.alg.step() != 1)
            throw ConfigError("the Euclidean kernel needs a single-layer algebra");
        const int n = f0.dim();
        const double norm = std::pow(4.0 * M_PI * t, -0.5 * n);
        parallel_for(n_out, [&](size_t oi) {
            const GroupPoint g = out_point(oi);
            double acc = 0.0;
            const size_t m = d.f.size();
            for (size_t k = 0; k < m; ++k) {
                double s = 0.0;
                for (int ax = 0; ax < n; ++ax) {
                    const double dx = g[ax] - d.coord[static_cast<size_t>(ax)][k];
                    s += dx * dx;
                }
                acc += d.f[k] * std::exp(-s / (4.0 * t));
            }
            res.values[oi] = acc * d.vol * norm;
        });
        res.est_abs_err = 1e-13 * norm * d.abs_mass;
        return res;
    }

    if (!is_heisenberg(f0.alg))
        throw ConfigError("this kernel needs data on the Heisenberg group");
    const double ct = 1.0 / (2.0 * M_PI * M_PI * t * t);
    // skip once the Gaussian cap e^{-sigma/2}/(16 t^2) drops below the floor
    const double floor_abs = ctl.rel_floor / (t * t);
    double sig_cut = 40.0;
    if (floor_abs > 0.0)
        sig_cut = std::min(sig_cut, 2.0 * std::log(1.0 / (16.0 * t * t * floor_abs)));
    const double* hx = d.coord[0].data();
    const double* hy = d.coord[1].data();
    const double* hz = d.coord[2].data();
    const double* hf = d.f.data();
    const size_t m = d.f.size();
    parallel_for(n_out, [&](size_t oi) {
        const GroupPoint g = out_point(oi);
        const double gx = g[0], gy = g[1], gz = g[2];
        double acc = 0.0;
        for (size_t k = 0; k < m; ++k) {
            const double px = gx - hx[k];
            const double py = gy - hy[k];
            const double sig = (px * px + py * py) / (2.0 * t);
            if (sig > sig_cut) continue;
            const double pz = gz - hz[k] - 0.5 * (hx[k] * gy - hy[k] * gx);
            acc += hf[k] * detail::gaveau_table_eval(detail::GaveauFlavor::plain,
                                                     sig, 2.0 * pz / t);
        }
        res.values[oi] = acc * d.vol * ct;
    });
    res.est_abs_err =
        d.abs_mass * (detail::gaveau_table_abs_bound() / (2.0 * M_PI * M_PI) +
                      ctl.rel_floor) / (t * t);
    return res;
}

} // namespace

ConvolveResult group_convolve_kernel(const GridFunction& f0, const KernelSpec& spec,
                                     double t, const std::vector<GroupPoint>& out,
                                     const ConvolveControls& ctl) {
    return convolve_core(f0, spec, t, [&](size_t i) { return out[i]; }, out.size(), ctl);
}

GridFunction group_convolve_kernel_grid(const GridFunction& f0, const KernelSpec& spec,
                                        double t, const GridGeometry& out,
                                        const ConvolveControls& ctl,
                                        double* est_abs_err) {
    if (out.origin.size() != static_cast<size_t>(f0.dim()) ||
        out.spacing.size() != out.origin.size() ||
        out.shape.size() != out.origin.size())
        throw GridMismatch("output geometry rank does not match the data");
    GridFunction g(f0.alg, out);
    ConvolveResult r = convolve_core(
        f0, spec, t, [&](size_t i) { return g.node(i); }, g.values.size(), ctl);
    g.values = std::move(r.values);
    if (est_abs_err) *est_abs_err = r.est_abs_err;
    return g;
}

ConvolveResult group_convolve_grids(const GridFunction& f, const GridFunction& g2,
                                    const std::vector<GroupPoint>& out) {
    if (!(f.alg == g2.alg)) throw GridMismatch("factors live on different groups");
    ConvolveResult res;
    res.values.assign(out.size(), 0.0);
    const double vol = f.geom.cell_volume();
    parallel_for(out.size(), [&](size_t oi) {
        double acc = 0.0;
        std::vector<int> idx;
        for (size_t flat = 0; flat < f.values.size(); ++flat) {
            const double v = f.values[flat];
            if (v == 0.0) continue;
            f.unflatten(flat, idx);
            const GroupPoint h = f.node(idx);
            acc += v * g2.interpolate(f.alg.product(f.alg.inverse(h), out[oi]));
        }
        res.values[oi] = acc * vol;
    });
    res.est_abs_err = 0.0;  // interpolation error is not estimated here
    return res;
}

namespace {

// C^2 step: 1 on s <= 0, 0 on s >= 1
double step_down(double s) {
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    return 1.0 + s * s * s * (-10.0 + s * (15.0 - 6.0 * s));
}

double get_param(const std::map<std::string, double>& p, const std::string& key,
                 double dflt) {
    auto it = p.find(key);
    return it == p.end() ? dflt : it->second;
}

void check_keys(const std::map<std::string, double>& p,
                std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : p) {
        bool ok = false;
        for (const char* a : allowed)
            if (k == a) ok = true;
        if (!ok) throw ConfigError("unknown datum parameter: " + k);
    }
}

struct DatumDef {
    std::function<double(const GroupPoint&)> profile;
    std::vector<double> center;
    std::vector<double> half;  // box half-extents around center
};

DatumDef datum_def(const std::string& name, const std::map<std::string, double>& params) {
    DatumDef d;
    if (name == "gaussian_bump" || name == "shifted_bump" || name == "asym_poly_bump") {
        check_keys(params, name == "shifted_bump"
                               ? std::initializer_list<const char*>{"h", "w", "a", "b"}
                               : std::initializer_list<const char*>{"h", "w"});
        const double w = get_param(params, "w", 1.0);
        if (!(w > 0.0)) throw NonPositiveRadius("datum width must be positive");
        const double a = name == "shifted_bump" ? get_param(params, "a", 0.6) : 0.0;
        const double b = name == "shifted_bump" ? get_param(params, "b", -0.4) : 0.0;
        const bool poly = name == "asym_poly_bump";
        d.center = {a, b, 0.0};
        d.half = {3.2 * w, 3.2 * w, 3.2 * w};
        d.profile = [w, a, b, poly](const GroupPoint& x) {
            const double u = x[0] - a, v = x[1] - b, z = x[2];
            const double r = std::sqrt(u * u + v * v + z * z);
            double f = std::exp(-r * r / (w * w)) * step_down((r - 2.0 * w) / (1.2 * w));
            if (poly) f *= 1.0 + 0.7 * u - 0.5 * v + 0.6 * z + 0.3 * u * v;
            return f;
        };
        return d;
    }
    if (name == "ring") {
        check_keys(params, {"h", "rho", "wr", "wz"});
        const double rho = get_param(params, "rho", 1.5);
        const double wr = get_param(params, "wr", 0.4);
        const double wz = get_param(params, "wz", 0.5);
        if (!(rho > 0.0) || !(wr > 0.0) || !(wz > 0.0))
            throw NonPositiveRadius("ring parameters must be positive");
        d.center = {0.0, 0.0, 0.0};
        d.half = {rho + 3.0 * wr, rho + 3.0 * wr, 3.0 * wz};
        d.profile = [rho, wr, wz](const GroupPoint& x) {
            const double rc = std::sqrt(x[0] * x[0] + x[1] * x[1]);
            const double dr = rc - rho;
            return std::exp(-dr * dr / (wr * wr) - x[2] * x[2] / (wz * wz)) *
                   step_down((std::abs(dr) - 2.0 * wr) / wr) *
                   step_down((std::abs(x[2]) - 2.0 * wz) / wz);
        };
        return d;
    }
    throw UnknownDatum("unknown datum: " + name);
}

} // namespace

std::function<double(const GroupPoint&)> builtin_profile(
    const std::string& name, const std::map<std::string, double>& params) {
    return datum_def(name, params).profile;
}

GridFunction builtin_datum(const std::string& name,
                           const std::map<std::string, double>& params) {
    const DatumDef d = datum_def(name, params);
    const double h = get_param(params, "h", 0.2);
    if (!(h > 0.0)) throw ConfigError("datum spacing h must be positive");
    GridGeometry geom;
    const size_t n = d.half.size();
    geom.origin.resize(n);
    geom.spacing.resize(n);
    geom.shape.resize(n);
    for (size_t k = 0; k < n; ++k) {
        int m = static_cast<int>(std::ceil(2.0 * d.half[k] / h));
        if (m < 3) m = 3;
        if (m % 2 == 0) ++m;
        const double sp = 2.0 * d.half[k] / m;
        geom.shape[k] = m;
        geom.spacing[k] = sp;
        // center - half + sp/2; m is odd, so the middle node lands on the
        // center exactly (exact 0 for centered axes, where fields like
        // x_i K(x) must vanish instead of sampling the ray blow-up)
        geom.origin[k] = d.center[k] - (0.5 * (m - 1)) * sp;
    }
    GridFunction g = sample_on_grid(heisenberg(), geom, d.profile);
    const double mass = integrate(g);
    if (!(std::abs(mass) > 1e-12))
        throw ConfigError("datum mass vanishes at this resolution");
    for (double& v : g.values) v /= mass;
    return g;
}

void write_grid_csv(std::ostream& out, const GridFunction& g) {
    const size_t n = g.geom.shape.size();
    auto join = [&](const auto& v) {
        std::ostringstream os;
        os << std::setprecision(17);
        for (size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k];
        return os.str();
    };
    out << "# carnot-grid N=" << n << " origin=" << join(g.geom.origin)
        << " spacing=" << join(g.geom.spacing) << " shape=" << join(g.geom.shape)
        << "\n";
    out << std::setprecision(17);
    std::vector<int> idx;
    for (size_t flat = 0; flat < g.values.size(); ++flat) {
        if (g.values[flat] == 0.0) continue;  // missing rows read back as 0
        g.unflatten(flat, idx);
        for (size_t k = 0; k < n; ++k) out << idx[k] << ',';
        out << g.values[flat] << '\n';
    }
}

namespace {

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError("bad number in grid header: " + tok);
        }
    }
    return out;
}

std::string header_field(const std::string& line, const std::string& key) {
    const std::string pat = key + "=";
    const size_t at = line.find(pat);
    if (at == std::string::npos)
        throw ConfigError("grid header is missing " + key);
    const size_t from = at + pat.size();
    const size_t to = line.find(' ', from);
    return line.substr(from, to == std::string::npos ? to : to - from);
}

} // namespace

GridFunction read_grid_csv(std::istream& in, const StratifiedAlgebra& alg) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) break;
        line.clear();
    }
    if (line.rfind("# carnot-grid", 0) != 0)
        throw ConfigError("not a carnot grid file");
    GridGeometry geom;
    const int n = std::stoi(header_field(line, "N"));
    geom.origin = parse_list(header_field(line, "origin"));
    geom.spacing = parse_list(header_field(line, "spacing"));
    const std::vector<double> shp = parse_list(header_field(line, "shape"));
    geom.shape.assign(shp.begin(), shp.end());
    if (n != alg.dim() || geom.origin.size() != static_cast<size_t>(n) ||
        geom.spacing.size() != static_cast<size_t>(n) ||
        geom.shape.size() != static_cast<size_t>(n))
        throw GridMismatch("grid header does not match the algebra dimension");
    for (int s : geom.shape)
        if (s <= 0) throw ConfigError("grid shape entries must be positive");
    GridFunction g(alg, geom);
    std::vector<int> idx(static_cast<size_t>(n));
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream is(line);
        std::string tok;
        try {
            for (int k = 0; k < n; ++k) {
                if (!std::getline(is, tok, ','))
                    throw ConfigError("short grid row: " + line);
                idx[static_cast<size_t>(k)] = std::stoi(tok);
            }
            if (!std::getline(is, tok, ','))
                throw ConfigError("grid row is missing a value: " + line);
            g.values[g.flat_index(idx)] = std::stod(tok);
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("bad grid row: " + line);
        }
    }
    return g;
}

} // namespace carnot
