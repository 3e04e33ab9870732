#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "carnot/algebra.hpp"

namespace carnot {

struct CheckSuite {
    std::string name;
    int trials = 0;
    int failures = 0;
    double max_err = 0.0;
    double tol = 0.0;
    bool passed() const { return failures == 0; }
};

struct GroupCheckReport {
    std::string algebra_name;
    std::uint64_t seed = 0;
    std::vector<CheckSuite> suites;
    bool passed() const {
        for (const auto& s : suites)
            if (!s.passed()) return false;
        return true;
    }
};

// Seeded property suites on one algebra: structure-constant validation,
// associativity, identity/inverse laws, dilation automorphism and norm
// homogeneity, frame-coefficient homogeneity, frame commutators against
// the structure constants, and (Heisenberg only) the exact 3x3
// upper-triangular matrix model of the product.
GroupCheckReport run_groupcheck(const StratifiedAlgebra& alg,
                                const std::string& algebra_name,
                                std::uint64_t seed, int trials = 200);

} // namespace carnot
