#pragma once

#include "bowcalc/expr.hpp"

#include <cstdint>
#include <vector>

namespace bowcalc {

// A class in the t-variables of a left dimension vector; d[j] = d_{-j}.
struct GradedFunction {
    FlavorClass cls;
    std::vector<int> d;

    int level(int k) const { // k <= 0
        int j = -k;
        return j < static_cast<int>(d.size()) ? d[j] : 0;
    }
    int depth() const { return static_cast<int>(d.size()) - 1; }
};

GradedFunction unit(Flavor fl);

// Kernel in the primed (tag 1) and double-primed (tag 2) alphabets.
FlavorClass kernel(const std::vector<int> &d1, const std::vector<int> &d2, Flavor fl);

GradedFunction star(const GradedFunction &f1, const GradedFunction &f2);

long binomial(int n, int k);

struct WheelReport {
    bool vacuous = false;
    int conditions = 0;
    int trials = 0;
    double max_residual = 0; // |f| / (largest term) on the wheel locus
    bool pass(double tol) const { return vacuous || max_residual < tol; }
};

WheelReport wheel_check(const GradedFunction &f, int trials, std::uint64_t seed, cplx q = {0.1, 0.05});

} // namespace bowcalc
