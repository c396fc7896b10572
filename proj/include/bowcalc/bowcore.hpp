#pragma once

#include "bowcalc/expr.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace bowcalc {

struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// NS5 charges r (Z_1..Z_m, right to left) and D5 charges c (A_1..A_n, left to right).
// dneg[i] = d_{-i} for i = 0..m, dpos[k] = d_k for k = 0..n.
struct BraneDiagram {
    std::vector<int> r;
    std::vector<int> c;
    std::vector<int> dneg;
    std::vector<int> dpos;

    int m() const { return static_cast<int>(r.size()); }
    int n() const { return static_cast<int>(c.size()); }
    int d0() const { return dpos.empty() ? 0 : dpos[0]; }
    int d(int k) const; // any k; zero outside the diagram
    int dimension() const;
    std::string text() const;
};

// Zero NS5 charges are accepted here (varieties such as r=(0,1,0,1) need them);
// the text parser refuses them.
BraneDiagram make_diagram(const std::vector<int> &r, const std::vector<int> &c);
BraneDiagram parse_brane_diagram(const std::string &text);

struct FixedPoint {
    int m = 0, n = 0;
    std::vector<std::vector<int>> T; // T[k-1][l-1] = 1 iff Z_k and A_l are tied

    bool tie(int k, int l) const { return T[k - 1][l - 1] != 0; }
    std::vector<std::pair<int, int>> ties() const; // (k,l), row-major
    std::vector<int> row_sums() const;
    std::vector<int> col_sums() const;
    bool operator==(const FixedPoint &o) const { return T == o.T; }
    bool operator<(const FixedPoint &o) const { return T < o.T; }
};

FixedPoint fixed_point_from_rows(const std::vector<std::vector<int>> &rows);
std::string to_string(const FixedPoint &f);

std::vector<FixedPoint> enumerate_fixed_points(const std::vector<int> &r, const std::vector<int> &c);
long brute_force_count(const std::vector<int> &r, const std::vector<int> &c);

int crossings(const FixedPoint &f);
FixedPoint mirror(const FixedPoint &f);
std::pair<std::vector<int>, std::vector<int>> mirror_charges(const std::vector<int> &r,
                                                            const std::vector<int> &c);

struct Chamber {
    std::vector<int> sigma; // 1-based permutation of 1..n
    static Chamber identity(int n);
    int inverse(int l) const; // sigma^{-1}(l)
};
Chamber parse_chamber(const std::string &s, int n);

// Which comparison decides the negative part: sigma(i) < sigma(j) as printed, or
// sigma^{-1}(i) < sigma^{-1}(j), the reading that agrees with the chamber a_{sigma(1)} < ...
enum class ChamberConvention { Literal, Inverse };
ChamberConvention default_chamber_convention();

// Decorations: tie (k,l) contributes a_l hbar^{-(rank + |level|)} to every level it covers.
std::map<int, std::vector<Monomial>> decorations(const BraneDiagram &D, const FixedPoint &f);
Substitution restriction_substitution(const BraneDiagram &D, const FixedPoint &f);

using CharacterSum = std::map<Monomial, long>;

CharacterSum tangent_character(const BraneDiagram &D, const FixedPoint &f);
CharacterSum d5_character(const std::vector<int> &c); // T'_{D5}(c)
CharacterSum negative_part(const CharacterSum &ch, const Chamber &s,
                           ChamberConvention conv = default_chamber_convention());
long rank(const CharacterSum &ch);
std::string to_string(const CharacterSum &ch);

// e(ch) = prod e(w)^{n_w}, a single-term class
FlavorClass euler_class(const CharacterSum &ch, Flavor fl);

} // namespace bowcalc
