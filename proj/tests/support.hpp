#pragma once

#include "bowcalc/verify.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <set>
#include <vector>

namespace testing {

using namespace bowcalc;

inline Monomial t(int k, int i) { return Monomial::of(tvar(k, i)); }
inline Monomial a(int j) { return Monomial::of(avar(j)); }
inline Monomial z(int j) { return Monomial::of(zvar(j)); }
inline Monomial h(int p = 1) { return Monomial::of(hbar(), p); }

// additive form of a multiplicative weight
inline LinearForm lin(const Monomial &w) { return LinearForm::from_monomial(w); }

struct F {
    Monomial w;
    int power = 1;
};

// coeff * prod e(w)^power in the given flavor
inline FlavorClass product(Flavor fl, std::vector<F> fs, mpq_class coeff = 1, Monomial pre = {}) {
    Term term;
    term.coeff = coeff;
    term.pre = pre;
    for (auto &f : fs) term.factors.push_back(Factor{euler_atom(fl, f.w), f.power, false, {}});
    canonicalize(term);
    return FlavorClass{fl, {term}};
}

// Jacobi theta straight from the product, independent of the library evaluator
// (the half power is taken from the given logarithm, so products of thetas keep consistent branches)
inline std::complex<double> theta_product_log(std::complex<double> logx, std::complex<double> q) {
    std::complex<double> x = std::exp(logx), s = std::exp(logx / 2.0);
    std::complex<double> r = s - 1.0 / s;
    std::complex<double> qn = q;
    for (int n = 1; n < 200 && std::abs(qn) > 1e-20; ++n, qn *= q) r *= (1.0 - qn * x) * (1.0 - qn / x);
    return r;
}
inline std::complex<double> theta_product(std::complex<double> x, std::complex<double> q) {
    return theta_product_log(std::log(x), q);
}

// Evaluate a multiplicative weight at explicit values (principal branches are only
// used for whole powers, which is all the tests need).
inline std::complex<double> value(const Monomial &w, const std::map<Var, std::complex<double>> &vals) {
    std::complex<double> r = 1.0;
    for (auto &[v, d] : w.terms()) r *= std::pow(vals.at(v), d / 2.0);
    return r;
}

inline EvalPoint to_point(const std::map<Var, std::complex<double>> &vals, std::complex<double> q) {
    EvalPoint p;
    for (auto &[v, x] : vals) p.set(v, x);
    p.q = q;
    return p;
}

inline std::map<Var, std::complex<double>> random_values(const std::vector<Var> &vars, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> mod(0.7, 1.4), ph(-3.0, 3.0);
    std::map<Var, std::complex<double>> out;
    for (auto &v : vars) out[v] = std::polar(mod(rng), ph(rng));
    return out;
}

inline double rel(std::complex<double> x, std::complex<double> y) {
    return std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-300});
}

} // namespace testing
