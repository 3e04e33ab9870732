#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "carnot/asymptotics.hpp"
#include "carnot/cli.hpp"
#include "carnot/decomp.hpp"
#include "carnot/grid.hpp"
#include "carnot/groupcheck.hpp"
#include "carnot/kernel.hpp"
#include "carnot/parallel.hpp"

using json = nlohmann::ordered_json;
using namespace carnot;

namespace {

StratifiedAlgebra algebra_from(const std::string& s) {
    if (s == "heisenberg") return heisenberg();
    if (s.rfind("euclidean:", 0) == 0) {
        try {
            return euclidean(std::stoi(s.substr(10)));
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("bad euclidean dimension in: " + s);
        }
    }
    return load_algebra_file(s);
}

GridFunction load_f0(const std::string& src, const StratifiedAlgebra& alg) {
    const cli::DatumSource d = cli::parse_datum_source(src);
    if (d.builtin) return builtin_datum(d.name_or_path, d.params);
    std::ifstream in(d.name_or_path);
    if (!in) throw ConfigError("cannot open datum file: " + d.name_or_path);
    return read_grid_csv(in, alg);
}

KernelSpec kernel_spec(const std::string& kind) {
    KernelSpec spec;
    if (kind == "heisenberg")
        spec.kind = KernelKind::heisenberg_gaveau;
    else if (kind == "euclidean")
        spec.kind = KernelKind::euclidean_gaussian;
    else
        throw ConfigError("kernel must be heisenberg or euclidean, got " + kind);
    return spec;
}

json q_to_json(double q) {
    if (std::isinf(q)) return json("inf");
    return json(q);
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write: " + path);
    out << text;
}

std::vector<GroupPoint> parse_points(const std::string& src, int dim) {
    std::vector<std::string> rows;
    if (std::filesystem::exists(src)) {
        std::ifstream in(src);
        std::string line;
        while (std::getline(in, line)) rows.push_back(line);
    } else {
        rows = cli::split(src, ';');
    }
    std::vector<GroupPoint> pts;
    for (const std::string& row : rows) {
        const size_t at = row.find_first_not_of(" \t\r");
        if (at == std::string::npos) continue;
        const char c = row[at];
        if (c == '#' || (!std::isdigit(static_cast<unsigned char>(c)) && c != '-' &&
                         c != '+' && c != '.'))
            continue;  // header or comment
        const std::vector<std::string> parts = cli::split(row, ',');
        if (parts.size() != static_cast<size_t>(dim))
            throw ConfigError("point needs " + std::to_string(dim) +
                              " coordinates: " + row);
        std::vector<double> coords;
        for (const auto& p : parts) coords.push_back(cli::parse_real(p));
        pts.emplace_back(std::move(coords));
    }
    if (pts.empty()) throw ConfigError("no evaluation points given");
    return pts;
}

json suites_json(const GroupCheckReport& rep) {
    json suites = json::array();
    for (const CheckSuite& s : rep.suites)
        suites.push_back({{"name", s.name},
                          {"trials", s.trials},
                          {"failures", s.failures},
                          {"max_err", s.max_err},
                          {"tol", s.tol},
                          {"passed", s.passed()}});
    return json{{"algebra", rep.algebra_name},
                {"seed", rep.seed},
                {"suites", suites},
                {"passed", rep.passed()}};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"calculus, heat kernels, and decay experiments on stratified groups"};
    app.set_config("--config", "", "read option values from a TOML file");
    std::string emit_config;
    app.add_option("--emit-config", emit_config,
                   "write the explicitly set option values to this TOML file")
        ->configurable(false);
    int threads = 0;
    app.add_option("--threads", threads, "cap worker threads (0 = hardware)");
    app.require_subcommand(0, 1);

    // groupcheck
    auto* gc = app.add_subcommand("groupcheck", "seeded group-law property suites");
    std::string gc_algebra = "heisenberg";
    std::uint64_t gc_seed = 12345;
    int gc_trials = 200;
    std::string gc_json;
    gc->add_option("--algebra", gc_algebra, "heisenberg | euclidean:N | schema file");
    gc->add_option("--seed", gc_seed, "random seed for the property suites");
    gc->add_option("--trials", gc_trials, "random trials per suite");
    gc->add_option("--json", gc_json, "report path (default stdout)");

    // kernel
    auto* ke = app.add_subcommand("kernel", "evaluate the heat kernel at points");
    double ke_t = 1.0;
    std::string ke_points, ke_kind = "heisenberg", ke_csv;
    int ke_deriv = -1;
    ke->add_option("--t", ke_t, "time (must be positive)");
    ke->add_option("--points", ke_points, "CSV file of x,y,z rows, or inline x,y,z;x,y,z");
    ke->add_option("--deriv", ke_deriv, "evaluate X^i P_t for this 0-based i");
    ke->add_option("--kernel", ke_kind, "heisenberg | euclidean");
    ke->add_option("--csv", ke_csv, "output path (default stdout)");

    // convolve
    auto* cv = app.add_subcommand("convolve", "solve the heat Cauchy problem on a grid");
    std::string cv_f0, cv_algebra = "heisenberg", cv_kind = "heisenberg", cv_csv;
    double cv_t = 1.0, cv_floor = 1e-9;
    std::vector<std::string> cv_box;
    cv->add_option("--f0", cv_f0, "datum: grid CSV path or builtin:name(k=v,...)")
        ->required();
    cv->add_option("--t", cv_t, "time (must be positive)");
    cv->add_option("--out-box", cv_box,
                   "output box, two tokens: R=<r[:r2...]> res=<odd n>")
        ->expected(2);
    cv->add_option("--algebra", cv_algebra, "algebra for reading CSV data");
    cv->add_option("--kernel", cv_kind, "heisenberg | euclidean");
    cv->add_option("--rel-floor", cv_floor, "skip floor relative to the kernel peak");
    cv->add_option("--csv", cv_csv, "grid output path (default stdout)");

    // moments
    auto* mo = app.add_subcommand("moments", "mass and first-layer moments of a datum");
    std::string mo_f0, mo_algebra = "heisenberg", mo_json;
    mo->add_option("--f0", mo_f0, "datum source")->required();
    mo->add_option("--algebra", mo_algebra, "algebra for reading CSV data");
    mo->add_option("--json", mo_json, "report path (default stdout)");

    // decompose
    auto* de = app.add_subcommand("decompose",
                                  "moment-decomposition fields and weak residual");
    std::string de_f0, de_algebra = "heisenberg", de_json, de_outdir;
    int de_order = 0, de_nodes = 48;
    double de_flat = 1.0, de_zero = 2.5;
    double de_max_residual = std::nan("");
    de->add_option("--f0", de_f0, "datum source")->required();
    de->add_option("--order", de_order, "decomposition order, 0 or 1");
    de->add_option("--algebra", de_algebra, "algebra for reading CSV data");
    de->add_option("--outdir", de_outdir, "write the F-field grids here as CSV");
    de->add_option("--phi-flat", de_flat, "test bump is 1 inside this radius");
    de->add_option("--phi-zero", de_zero, "test bump is 0 outside this radius");
    de->add_option("--radial-nodes", de_nodes, "Gauss nodes per radial integral");
    de->add_option("--max-residual", de_max_residual,
                   "fail (exit 1) if the weak residual exceeds this");
    de->add_option("--json", de_json, "report path (default stdout)");

    // asymptotics
    auto* as = app.add_subcommand("asymptotics", "large-time decay-rate experiment");
    std::string as_f0, as_algebra = "heisenberg", as_kind = "heisenberg";
    std::string as_times, as_q = "inf", as_radii = "5:8", as_json;
    int as_order = 0, as_res = 33;
    double as_p = 1.0, as_tol = 0.2, as_floor = 1e-9;
    as->add_option("--f0", as_f0, "datum source")->required();
    as->add_option("--order", as_order, "expansion order, 0 or 1");
    as->add_option("--p", as_p, "datum norm exponent");
    as->add_option("--q", as_q, "residual norm exponent (number or inf)");
    as->add_option("--times", as_times, "geometric sweep start:ratio:count")->required();
    as->add_option("--radii", as_radii, "self-similar box radii per layer, r1[:r2...]");
    as->add_option("--res", as_res, "output nodes per axis (odd hits the origin)");
    as->add_option("--slope-tol", as_tol, "pass margin over the predicted slope");
    as->add_option("--algebra", as_algebra, "algebra for reading CSV data");
    as->add_option("--kernel", as_kind, "heisenberg | euclidean");
    as->add_option("--rel-floor", as_floor, "skip floor relative to the kernel peak");
    as->add_option("--json", as_json, "report path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (threads < 0) throw ConfigError("--threads must be >= 0");
        if (threads > 0) set_max_threads(threads);
        if (!emit_config.empty()) write_text(emit_config, app.config_to_str(false, true));

        if (gc->parsed()) {
            const GroupCheckReport rep =
                run_groupcheck(algebra_from(gc_algebra), gc_algebra, gc_seed, gc_trials);
            write_text(gc_json, suites_json(rep).dump(2) + "\n");
            return rep.passed() ? 0 : 1;
        }

        if (ke->parsed()) {
            if (!(ke_t > 0.0)) throw ConfigError("--t must be positive");
            const KernelSpec spec = kernel_spec(ke_kind);
            const StratifiedAlgebra alg =
                spec.kind == KernelKind::euclidean_gaussian ? euclidean(3) : heisenberg();
            if (ke_points.empty()) throw ConfigError("--points is required");
            const std::vector<GroupPoint> pts = parse_points(ke_points, alg.dim());
            const FrameCoefficients frame = left_invariant_frame(alg);
            if (ke_deriv >= alg.dim())
                throw ConfigError("--deriv index out of range");
            std::ostringstream os;
            os << std::setprecision(17) << "x,y,z,P,estErr\n";
            for (const GroupPoint& x : pts) {
                const KernelValue v =
                    ke_deriv < 0 ? eval_kernel(spec, ke_t, x)
                                 : eval_kernel_derivative(spec, frame, ke_deriv, ke_t, x);
                os << x[0] << ',' << x[1] << ',' << x[2] << ',' << v.value << ','
                   << v.est_abs_err << '\n';
            }
            write_text(ke_csv, os.str());
            return 0;
        }

        if (cv->parsed()) {
            if (!(cv_t > 0.0)) throw ConfigError("--t must be positive");
            if (cv_box.size() != 2)
                throw ConfigError("--out-box needs two tokens: R=<r> res=<n>");
            std::string radii_str;
            int res = 0;
            for (const std::string& tok : cv_box) {
                if (tok.rfind("R=", 0) == 0)
                    radii_str = tok.substr(2);
                else if (tok.rfind("res=", 0) == 0)
                    res = static_cast<int>(cli::parse_real(tok.substr(4)));
                else
                    throw ConfigError("unknown --out-box token: " + tok);
            }
            if (radii_str.empty() || res == 0)
                throw ConfigError("--out-box needs both R=<r> and res=<n>");
            const KernelSpec spec = kernel_spec(cv_kind);
            const GridFunction f0 = load_f0(cv_f0, algebra_from(cv_algebra));
            const GridGeometry out = self_similar_geometry(
                f0.alg, cv_t, cli::parse_radii(radii_str, f0.alg.step()), res);
            ConvolveControls ctl;
            ctl.rel_floor = cv_floor;
            double err = 0.0;
            const GridFunction g = group_convolve_kernel_grid(f0, spec, cv_t, out, ctl, &err);
            std::ostringstream os;
            write_grid_csv(os, g);
            write_text(cv_csv, os.str());
            if (!cv_csv.empty() && cv_csv != "-") {
                const json summary{{"t", cv_t},
                                   {"mass", integrate(g)},
                                   {"est_abs_err", err},
                                   {"csv", cv_csv}};
                std::cout << summary.dump(2) << "\n";
            }
            return 0;
        }

        if (mo->parsed()) {
            const GridFunction f0 = load_f0(mo_f0, algebra_from(mo_algebra));
            const MomentVector m = moments(f0);
            json j{{"a0", m.a0}};
            for (size_t i = 0; i < m.a.size(); ++i)
                j["a" + std::to_string(i + 1)] = m.a[i];
            write_text(mo_json, j.dump(2) + "\n");
            return 0;
        }

        if (de->parsed()) {
            if (de_order != 0 && de_order != 1)
                throw ConfigError("--order must be 0 or 1");
            const GridFunction f0 = load_f0(de_f0, algebra_from(de_algebra));
            const FrameCoefficients frame = left_invariant_frame(f0.alg);
            const TestFunction phi = quintic_bump(f0.dim(), de_flat, de_zero);
            RadialQuadControls rctl;
            rctl.nodes = de_nodes;
            const double residual =
                de_order == 0 ? weak_residual_order0(frame, f0, phi, rctl)
                              : weak_residual_order1(frame, f0, phi, rctl);
            json files = json::array();
            if (!de_outdir.empty()) {
                std::filesystem::create_directories(de_outdir);
                auto emit = [&](const GridFunction& g, const std::string& nm) {
                    const std::string path = de_outdir + "/" + nm;
                    std::ofstream out(path);
                    if (!out) throw ConfigError("cannot write: " + path);
                    write_grid_csv(out, g);
                    files.push_back(nm);
                };
                if (de_order == 0) {
                    for (int i = 0; i < f0.dim(); ++i)
                        emit(field_F_first(f0, i, rctl),
                             "F_first_" + std::to_string(i + 1) + ".csv");
                } else {
                    const Order1Fields f = fields_F_order1(f0, rctl);
                    for (int i = 0; i < f.dim; ++i)
                        for (int j = i; j < f.dim; ++j)
                            emit(f.f_pair[static_cast<size_t>(f.pair_index(i, j))],
                                 "F_pair_" + std::to_string(i + 1) + "_" +
                                     std::to_string(j + 1) + ".csv");
                    for (size_t k = 0; k < f.f_single.size(); ++k)
                        emit(f.f_single[k],
                             "F_single_" +
                                 std::to_string(f0.alg.horizontal_dim() + 1 + k) +
                                 ".csv");
                }
            }
            const bool pass = std::isnan(de_max_residual) || residual <= de_max_residual;
            const json j{{"order", de_order},
                         {"residual", residual},
                         {"phi_flat", de_flat},
                         {"phi_zero", de_zero},
                         {"radial_nodes", de_nodes},
                         {"files", files},
                         {"pass", pass}};
            write_text(de_json, j.dump(2) + "\n");
            return pass ? 0 : 1;
        }

        if (as->parsed()) {
            if (as_order != 0 && as_order != 1)
                throw ConfigError("--order must be 0 or 1");
            const KernelSpec spec = kernel_spec(as_kind);
            const GridFunction f0 = load_f0(as_f0, algebra_from(as_algebra));
            const FrameCoefficients frame = left_invariant_frame(f0.alg);
            ExperimentControls ctl;
            ctl.expansion.radii = cli::parse_radii(as_radii, f0.alg.step());
            ctl.expansion.res = as_res;
            ctl.expansion.conv.rel_floor = as_floor;
            ctl.slope_tol = as_tol;
            const DecayReport rep =
                run_decay_experiment(f0, spec, frame, as_order, as_p,
                                     cli::parse_real(as_q), cli::parse_times(as_times),
                                     ctl);
            const json j{{"times", rep.times},
                         {"residual_norms", rep.residual_norms},
                         {"fitted_slope", rep.fitted_slope},
                         {"slope_stderr", rep.slope_stderr},
                         {"predicted", rep.predicted},
                         {"p", rep.p},
                         {"q", q_to_json(rep.q)},
                         {"order", rep.order},
                         {"slope_tol", rep.slope_tol},
                         {"pass", rep.pass}};
            write_text(as_json, j.dump(2) + "\n");
            return rep.pass ? 0 : 1;
        }

        if (!emit_config.empty()) return 0;  // config emission was the whole job
        std::cerr << app.help();
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::exit_code_for(e);
    }
}
