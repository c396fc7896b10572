#pragma once

#include "bowcalc/bowcore.hpp"
#include "bowcalc/shuffle.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bowcalc {

// Slopes s_1..s_{m-1}; m_{ik} = s_i + ... + s_{k-1}.
struct SlopeConfig {
    std::vector<mpq_class> s;

    mpq_class m(int i, int k) const;
    // no sum n_i s_i with |n_i| <= guard, not all zero, is an integer
    bool generic(int guard = 8) const;
    static SlopeConfig default_for(int m, std::uint64_t seed = 0);
    static SlopeConfig parse(const std::string &text); // "p/q,p/q,..."
    std::string text() const;
};

GradedFunction one_tie(int k, int l, Flavor fl, const SlopeConfig &slopes = {});
std::vector<std::pair<int, int>> tie_order(const FixedPoint &f, const Chamber &sigma);
GradedFunction wtilde(const FixedPoint &f, const Chamber &sigma, Flavor fl,
                      const SlopeConfig &slopes = {});

FlavorClass epsilon_factor(const std::vector<int> &c, Flavor fl);
FlavorClass tau_factor(const BraneDiagram &D, Flavor fl);
FlavorClass eu_factor(const std::vector<int> &c, const Chamber &sigma, Flavor fl,
                      ChamberConvention conv = default_chamber_convention());
Substitution t0_substitution(const std::vector<int> &c, const Chamber &sigma);

struct StabResult {
    BraneDiagram D;
    FixedPoint f;
    Chamber sigma;
    Flavor flavor = Flavor::E;
    SlopeConfig slopes;
    FlavorClass epsilon, tau, eu;
    FlavorClass wtilde_restricted; // W-tilde after the t_0 substitution
    FlavorClass cls;               // the product of the four
};

StabResult w_function(const BraneDiagram &D, const FixedPoint &f, const Chamber &sigma, Flavor fl,
                      const SlopeConfig &slopes = {},
                      ChamberConvention conv = default_chamber_convention());

struct RestrictionOptions {
    std::uint64_t seed = 7;
    int check_points = 3;
    double agree_tol = 1e-6;
    cplx q = {0.1, 0.05};
};

struct Restriction {
    FlavorClass value; // a class in a, z, hbar only
    LimitStats stats;
    double direction_disagreement = 0;
};

struct LimitDisagreement : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Restriction restrict_class(const StabResult &w, const FixedPoint &g,
                           const RestrictionOptions &opt = {});

// diagonal normalization target: Euler class of the chamber-negative tangent weights
FlavorClass diagonal_target(const BraneDiagram &D, const FixedPoint &f, const Chamber &sigma,
                            Flavor fl, ChamberConvention conv = default_chamber_convention());

// T*P^{n-1} = X(r=(n-1,1), c=(1,...,1)); f_k ties Z_2 to A_k
BraneDiagram tpn_diagram(int n);
FixedPoint tpn_fixed_point(int n, int k);
// closed forms for chamber id in the variable t = t_{-1,1}
FlavorClass tpn_closed_form(int n, int k, Flavor fl, const SlopeConfig &slopes = {});

// K -> H: ahat(x) -> log x, monomial prefactors -> 1
FlavorClass k_to_h(const FlavorClass &k);

// numeric comparison helpers
struct Comparison {
    int points = 0;
    double max_residual = 0;
};
// |a - b| / max(|a|, |b|, tiny) at random points in the variables of both classes
Comparison compare_numeric(const FlavorClass &a, const FlavorClass &b, int points,
                           std::uint64_t seed, cplx q);
// exact comparison of H classes at random rational points; returns number of mismatches
int compare_exact(const FlavorClass &a, const FlavorClass &b, int points, std::uint64_t seed);

} // namespace bowcalc
