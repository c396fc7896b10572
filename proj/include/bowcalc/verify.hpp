#pragma once

#include "bowcalc/stab.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bowcalc {

// ---------------- axioms ----------------

struct AxiomOptions {
    int points = 5;
    double tol = 1e-8;
    std::uint64_t seed = 11;
    cplx q = {0.1, 0.05};
};

struct AxiomReport {
    int size = 0;
    std::vector<FixedPoint> points;
    // nonzero[f][g]: W(f)|_g does not vanish. The order is the transitive closure (g <= f);
    // a restriction may still vanish for some g < f.
    std::vector<std::vector<bool>> nonzero;
    std::vector<double> diagonal_residual;
    std::vector<std::string> failures;
    bool antisymmetric = true; // no f != g with both restrictions nonzero
    bool acyclic = true;       // the closure is a partial order

    bool diagonal_ok(double tol) const;
    bool pass(double tol) const { return diagonal_ok(tol) && failures.empty() && antisymmetric && acyclic; }
    std::vector<std::vector<bool>> order() const; // order[f][g]: g <= f
    // a -> b edges (a < b) of the transitive reduction, 0-based
    std::vector<std::pair<int, int>> hasse() const;
};

AxiomReport check_axioms(const BraneDiagram &D, const Chamber &sigma, Flavor fl, const AxiomOptions &opt = {});

// Is there a bijection between the computed points and the labels 1..N extending the
// given partial labelling so that the computed Hasse diagram equals `edges` (a < b)?
std::optional<std::vector<int>> match_hasse(const AxiomReport &rep,
                                            const std::vector<std::pair<int, FixedPoint>> &known,
                                            const std::vector<std::pair<int, int>> &edges);

// ---------------- mirror identities ----------------

struct Certification {
    int points = 0;
    double max_residual = 0;
    std::vector<cplx> q;
    bool certified = false;
};

struct IdentityRecord {
    std::vector<int> r, c;
    FixedPoint f, g;
    int sign = 1; // (-1)^{#f + #g}
    bool trivial = false;
    bool hbar_inverted = true;
    FlavorClass lhs, rhs;  // both in the variables of the mirror X^!
    FlavorClass expanded;  // lhs - rhs with denominators cleared, common factors removed
    Certification cert;

    int term_count() const { return static_cast<int>(expanded.terms.size()); }
    int factors_per_term() const; // largest theta-factor count, with multiplicity
};

struct MirrorOptions {
    int points = 20;
    std::vector<cplx> q = {0.05, {0.1, 0.1}, 0.3};
    double tol = 1e-8;
    std::uint64_t seed = 23;
};

// W(f)|_g / e(N^-_g) on X against its mirror counterpart, chamber id on both sides
IdentityRecord mirror_identity(const BraneDiagram &D, const FixedPoint &f, const FixedPoint &g,
                               const MirrorOptions &opt = {});

// all pairs of a diagram, sharing the W computations
std::vector<IdentityRecord> mirror_identities(const BraneDiagram &D, const MirrorOptions &opt = {},
                                              bool include_diagonal = false);

struct FayMatch {
    std::vector<Monomial> x, y; // x_1..x_3, y_1..y_3
};
// every assignment that reproduces the record; those with the x_i in the a variables alone come first
std::vector<FayMatch> fay_normal_form(const IdentityRecord &rec);

// numeric: does some proper subset of at most max_size terms sum to zero?
bool reducible(const FlavorClass &expanded, int max_size, std::uint64_t seed);

// ---------------- limits ----------------

struct LimitRow {
    FixedPoint f;
    Chamber sigma;
    std::vector<double> ek_residual; // one per q
    bool monotone = true;
    int kh_mismatches = 0;
};

struct LimitReport {
    std::vector<double> q;
    std::vector<LimitRow> rows;
    double worst_final = 0;
    bool all_monotone = true;
    int kh_mismatches = 0;
    bool pass(double tol) const { return all_monotone && worst_final < tol && kh_mismatches == 0; }
};

struct LimitOptions {
    std::vector<double> q = {1e-2, 1e-3, 1e-4};
    int points = 5;
    std::uint64_t seed = 31;
    bool all_chambers = true;
};

// W^E with z_{i+1}/z_i = q^{-s_i} against W^K, and the lowest-degree part of W^K against W^H
LimitReport limit_suite(const BraneDiagram &D, const SlopeConfig &slopes, const LimitOptions &opt = {});
double ek_residual(const StabResult &e, const StabResult &k, double q, int points, std::uint64_t seed);

// ---------------- sweep ----------------

struct SweepPoint {
    int terms = 0, factors = 0;
    std::vector<int> r, c;
    FixedPoint f, g;
};

struct SweepOptions {
    int max_m = 4, max_n = 4, max_boxes = 6;
    long max_wtilde_terms = 800; // skip varieties whose W-tilde would be larger
    int max_fixed_points = 40;
    MirrorOptions mirror{6, {0.05, {0.1, 0.1}, 0.3}, 1e-8, 41};
};

struct SweepReport {
    std::vector<SweepPoint> points; // one representative per (terms, factors)
    int varieties = 0, skipped = 0, pairs = 0, certified = 0, trivial = 0, failed = 0, reducible = 0;
    std::vector<std::string> failures;
};

SweepReport sweep(const SweepOptions &opt);
long wtilde_term_bound(const BraneDiagram &D);

// ---------------- export ----------------

std::string to_latex(const IdentityRecord &rec);
std::string to_text(const IdentityRecord &rec);

} // namespace bowcalc
