#pragma once
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "carnot/errors.hpp"

// Small parsing helpers for the command-line front end, header-only so the
// unit tests can exercise them without spawning the binary.
namespace carnot::cli {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    size_t from = 0;
    while (true) {
        const size_t at = s.find(sep, from);
        out.push_back(s.substr(from, at == std::string::npos ? at : at - from));
        if (at == std::string::npos) break;
        from = at + 1;
    }
    return out;
}

inline double parse_real(const std::string& s) {
    if (s == "inf" || s == "+inf") return HUGE_VAL;
    try {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw ConfigError("trailing junk in number: " + s);
        return v;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("not a number: " + s);
    }
}

// "start:ratio:count" -> geometric sequence of count times
inline std::vector<double> parse_times(const std::string& s) {
    const std::vector<std::string> parts = split(s, ':');
    if (parts.size() != 3)
        throw ConfigError("times must look like start:ratio:count, got " + s);
    const double start = parse_real(parts[0]);
    const double ratio = parse_real(parts[1]);
    const double countf = parse_real(parts[2]);
    const int count = static_cast<int>(countf);
    if (!(start > 0.0) || !(ratio > 0.0))
        throw ConfigError("times need positive start and ratio");
    if (count < 1 || countf != count)
        throw ConfigError("times count must be a positive integer");
    std::vector<double> t(static_cast<size_t>(count));
    double v = start;
    for (int k = 0; k < count; ++k, v *= ratio) t[static_cast<size_t>(k)] = v;
    return t;
}

// "5" (broadcast to every layer) or "5:8:..." (one radius per layer)
inline std::vector<double> parse_radii(const std::string& s, int layers) {
    const std::vector<std::string> parts = split(s, ':');
    std::vector<double> r;
    for (const auto& p : parts) r.push_back(parse_real(p));
    if (r.size() == 1) r.assign(static_cast<size_t>(layers), r[0]);
    if (r.size() != static_cast<size_t>(layers))
        throw ConfigError("need one radius per layer (or a single broadcast value)");
    for (double v : r)
        if (!(v > 0.0)) throw ConfigError("radii must be positive");
    return r;
}

struct DatumSource {
    bool builtin = false;
    std::string name_or_path;
    std::map<std::string, double> params;
};

// "builtin:name(k=v,k=v)" or "builtin:name" or a file path
inline DatumSource parse_datum_source(const std::string& s) {
    DatumSource d;
    if (s.rfind("builtin:", 0) != 0) {
        d.name_or_path = s;
        return d;
    }
    d.builtin = true;
    std::string rest = s.substr(8);
    const size_t open = rest.find('(');
    if (open == std::string::npos) {
        d.name_or_path = rest;
        return d;
    }
    if (rest.back() != ')')
        throw ConfigError("unbalanced parens in datum source: " + s);
    d.name_or_path = rest.substr(0, open);
    const std::string inner = rest.substr(open + 1, rest.size() - open - 2);
    if (inner.empty()) return d;
    for (const std::string& kv : split(inner, ',')) {
        const size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("datum parameter needs key=value, got " + kv);
        d.params[kv.substr(0, eq)] = parse_real(kv.substr(eq + 1));
    }
    return d;
}

// exit codes: 0 pass, 1 check failure, 2 usage/config, 3 non-convergence
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const QuadratureNotConverged*>(&e)) return 3;
    if (dynamic_cast<const DegenerateFit*>(&e)) return 3;
    return 2;
}

} // namespace carnot::cli
