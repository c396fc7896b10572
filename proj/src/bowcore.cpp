#include "bowcalc/bowcore.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <numeric>
#include <sstream>

namespace bowcalc {

int BraneDiagram::d(int k) const {
    if (k <= 0) {
        int i = -k;
        return i < static_cast<int>(dneg.size()) ? dneg[i] : 0;
    }
    return k < static_cast<int>(dpos.size()) ? dpos[k] : 0;
}

int BraneDiagram::dimension() const {
    long ns = 0, d5 = 0;
    for (int k = 0; k >= -m(); --k) ns += 2L * d(k) * d(k - 1);
    for (int k = -1; k >= -m(); --k) ns -= 2L * d(k) * d(k);
    for (int k = 1; k <= n(); ++k)
        d5 += d(k - 1) + d(k) + 1L * d(k - 1) * d(k - 1) + 1L * d(k) * d(k);
    for (int k = 0; k <= n(); ++k) d5 -= 2L * d(k) * d(k);
    return static_cast<int>(ns + d5);
}

std::string BraneDiagram::text() const {
    std::ostringstream os;
    for (int i = m(); i >= 1; --i) os << "/" << d(-(i - 1));
    for (int k = 1; k <= n(); ++k) {
        os << "\\";
        if (k < n()) os << d(k);
    }
    return os.str();
}

BraneDiagram make_diagram(const std::vector<int> &r, const std::vector<int> &c) {
    if (r.empty() || c.empty()) throw InputError("need at least one NS5 and one D5 brane");
    for (int x : r)
        if (x < 0) throw InputError("negative NS5 charge");
    for (int x : c)
        if (x <= 0) throw InputError("D5 charges must be positive");
    int sr = std::accumulate(r.begin(), r.end(), 0), sc = std::accumulate(c.begin(), c.end(), 0);
    if (sr != sc) throw InputError("charge sums differ: sum r = " + std::to_string(sr) +
                                   ", sum c = " + std::to_string(sc));
    BraneDiagram D;
    D.r = r;
    D.c = c;
    D.dneg.push_back(sc);
    for (int x : r) D.dneg.push_back(D.dneg.back() - x);
    D.dpos.push_back(sc);
    for (int x : c) D.dpos.push_back(D.dpos.back() - x);
    return D;
}

static std::vector<int> parse_int_list(const std::string &s) {
    std::vector<int> out;
    std::string t;
    for (char ch : s)
        if (ch != '(' && ch != ')' && ch != ' ') t += ch;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) throw InputError("empty entry in integer list '" + s + "'");
        std::size_t pos = 0;
        int v = std::stoi(item, &pos);
        if (pos != item.size()) throw InputError("bad integer '" + item + "'");
        out.push_back(v);
    }
    return out;
}

BraneDiagram parse_brane_diagram(const std::string &text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty()) throw InputError("empty brane diagram");

    if (s.rfind("r=", 0) == 0) {
        auto semi = s.find(';');
        if (semi == std::string::npos || s.compare(semi + 1, 2, "c=") != 0)
            throw InputError("charge form must read r=...;c=...");
        std::vector<int> r, c;
        try {
            r = parse_int_list(s.substr(2, semi - 2));
            c = parse_int_list(s.substr(semi + 3));
        } catch (const std::logic_error &e) {
            throw InputError(std::string("malformed charge list: ") + e.what());
        }
        for (int x : r)
            if (x <= 0) throw InputError("fivebrane charges must be positive");
        return make_diagram(r, c);
    }

    // ('/' INT)+ ('\' INT)* '\'
    std::vector<char> branes;
    std::vector<int> mult{0};
    std::size_t i = 0;
    while (i < s.size()) {
        char b = s[i];
        if (b != '/' && b != '\\') throw InputError(std::string("unexpected character '") + b + "'");
        if (!branes.empty() && branes.back() == '\\' && b == '/')
            throw InputError("diagram is not separated: NS5 brane to the right of a D5 brane");
        branes.push_back(b);
        ++i;
        std::size_t j = i;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (j == i) {
            if (b == '/' || j != s.size())
                throw InputError("missing D3 multiplicity after brane " + std::to_string(branes.size()));
            mult.push_back(0);
        } else {
            mult.push_back(std::stoi(s.substr(i, j - i)));
        }
        i = j;
    }
    if (branes.empty() || branes.front() != '/') throw InputError("diagram must start with an NS5 brane");
    if (branes.back() != '\\') throw InputError("diagram must end with a D5 brane");
    if (mult.back() != 0) throw InputError("last D5 brane must close the diagram");

    std::vector<int> left_to_right_ns, c;
    for (std::size_t b = 0; b < branes.size(); ++b) {
        int charge = branes[b] == '/' ? mult[b + 1] - mult[b] : mult[b] - mult[b + 1];
        if (charge < 0) throw InputError("non-monotone multiplicities give a negative charge");
        if (charge == 0) throw InputError("zero charge fivebrane; use the equivalent positive diagram");
        if (branes[b] == '/')
            left_to_right_ns.push_back(charge);
        else
            c.push_back(charge);
    }
    std::vector<int> r(left_to_right_ns.rbegin(), left_to_right_ns.rend());
    return make_diagram(r, c);
}

// ---------------- fixed points ----------------

std::vector<std::pair<int, int>> FixedPoint::ties() const {
    std::vector<std::pair<int, int>> out;
    for (int k = 1; k <= m; ++k)
        for (int l = 1; l <= n; ++l)
            if (tie(k, l)) out.push_back({k, l});
    return out;
}

std::vector<int> FixedPoint::row_sums() const {
    std::vector<int> s(m, 0);
    for (int k = 0; k < m; ++k)
        for (int l = 0; l < n; ++l) s[k] += T[k][l];
    return s;
}

std::vector<int> FixedPoint::col_sums() const {
    std::vector<int> s(n, 0);
    for (int k = 0; k < m; ++k)
        for (int l = 0; l < n; ++l) s[l] += T[k][l];
    return s;
}

FixedPoint fixed_point_from_rows(const std::vector<std::vector<int>> &rows) {
    FixedPoint f;
    f.m = static_cast<int>(rows.size());
    f.n = rows.empty() ? 0 : static_cast<int>(rows[0].size());
    for (auto &row : rows) {
        if (static_cast<int>(row.size()) != f.n) throw InputError("ragged BCT");
        for (int x : row)
            if (x != 0 && x != 1) throw InputError("BCT entries must be 0 or 1");
    }
    f.T = rows;
    return f;
}

std::string to_string(const FixedPoint &f) {
    std::ostringstream os;
    os << "[";
    for (int k = 0; k < f.m; ++k) {
        os << (k ? "," : "") << "[";
        for (int l = 0; l < f.n; ++l) os << (l ? "," : "") << f.T[k][l];
        os << "]";
    }
    os << "]";
    return os.str();
}

static bool gale_ryser(std::vector<int> rows, std::vector<int> cols) {
    long sr = std::accumulate(rows.begin(), rows.end(), 0L);
    long sc = std::accumulate(cols.begin(), cols.end(), 0L);
    if (sr != sc) return false;
    std::sort(rows.rbegin(), rows.rend());
    long lhs = 0;
    for (std::size_t k = 1; k <= rows.size(); ++k) {
        lhs += rows[k - 1];
        long rhs = 0;
        for (int c : cols) rhs += std::min<long>(c, static_cast<long>(k));
        if (lhs > rhs) return false;
    }
    return true;
}

std::vector<FixedPoint> enumerate_fixed_points(const std::vector<int> &r, const std::vector<int> &c) {
    const int m = static_cast<int>(r.size()), n = static_cast<int>(c.size());
    std::vector<FixedPoint> out;
    for (int x : r)
        if (x < 0 || x > n) return out;
    for (int x : c)
        if (x < 0 || x > m) return out;
    FixedPoint cur;
    cur.m = m;
    cur.n = n;
    cur.T.assign(m, std::vector<int>(n, 0));
    std::vector<int> rem = c;

    std::function<void(int)> rec = [&](int k) {
        if (k == m) {
            if (std::all_of(rem.begin(), rem.end(), [](int x) { return x == 0; })) out.push_back(cur);
            return;
        }
        std::vector<int> row(n, 0);
        // zeros before ones: the matrices come out in ascending lexicographic order
        std::function<void(int, int)> pick = [&](int l, int left) {
            if (left == 0) {
                std::vector<int> rows_left(r.begin() + k + 1, r.end());
                std::vector<int> cols_left = rem;
                for (int j = 0; j < n; ++j) cols_left[j] -= row[j];
                if (!gale_ryser(rows_left, cols_left)) return;
                cur.T[k] = row;
                auto saved = rem;
                rem = cols_left;
                rec(k + 1);
                rem = saved;
                return;
            }
            if (n - l < left) return;
            pick(l + 1, left);
            if (rem[l] > 0) {
                row[l] = 1;
                pick(l + 1, left - 1);
                row[l] = 0;
            }
        };
        pick(0, r[k]);
        cur.T[k].assign(n, 0);
    };
    rec(0);
    return out;
}

long brute_force_count(const std::vector<int> &r, const std::vector<int> &c) {
    const int m = static_cast<int>(r.size()), n = static_cast<int>(c.size());
    if (m * n > 24) throw std::invalid_argument("brute force limited to 24 cells");
    long count = 0;
    for (unsigned long mask = 0; mask < (1UL << (m * n)); ++mask) {
        bool ok = true;
        for (int k = 0; k < m && ok; ++k) {
            int s = 0;
            for (int l = 0; l < n; ++l) s += (mask >> (k * n + l)) & 1UL;
            ok = s == r[k];
        }
        for (int l = 0; l < n && ok; ++l) {
            int s = 0;
            for (int k = 0; k < m; ++k) s += (mask >> (k * n + l)) & 1UL;
            ok = s == c[l];
        }
        count += ok;
    }
    return count;
}

int crossings(const FixedPoint &f) {
    auto t = f.ties();
    int x = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = i + 1; j < t.size(); ++j)
            if ((t[i].first - t[j].first) * (t[i].second - t[j].second) < 0) ++x;
    return x;
}

FixedPoint mirror(const FixedPoint &f) {
    FixedPoint g;
    g.m = f.n;
    g.n = f.m;
    g.T.assign(g.m, std::vector<int>(g.n, 0));
    for (int i = 1; i <= g.m; ++i)
        for (int j = 1; j <= g.n; ++j) g.T[i - 1][j - 1] = 1 - f.T[f.m - j][f.n - i];
    return g;
}

std::pair<std::vector<int>, std::vector<int>> mirror_charges(const std::vector<int> &r,
                                                            const std::vector<int> &c) {
    const int m = static_cast<int>(r.size()), n = static_cast<int>(c.size());
    std::vector<int> rr(n), cc(m);
    for (int i = 1; i <= n; ++i) rr[i - 1] = m - c[n - i];
    for (int i = 1; i <= m; ++i) cc[i - 1] = n - r[m - i];
    return {rr, cc};
}

// ---------------- chambers ----------------

Chamber Chamber::identity(int n) {
    Chamber ch;
    ch.sigma.resize(n);
    std::iota(ch.sigma.begin(), ch.sigma.end(), 1);
    return ch;
}

int Chamber::inverse(int l) const {
    for (std::size_t p = 0; p < sigma.size(); ++p)
        if (sigma[p] == l) return static_cast<int>(p) + 1;
    throw InputError("label outside the permutation");
}

Chamber parse_chamber(const std::string &s, int n) {
    Chamber ch;
    ch.sigma = parse_int_list(s);
    if (static_cast<int>(ch.sigma.size()) != n)
        throw InputError("chamber must be a permutation of 1.." + std::to_string(n));
    auto sorted = ch.sigma;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < n; ++i)
        if (sorted[i] != i + 1) throw InputError("chamber is not a permutation");
    return ch;
}

ChamberConvention default_chamber_convention() { return ChamberConvention::Inverse; }

// ---------------- restrictions and characters ----------------

std::map<int, std::vector<Monomial>> decorations(const BraneDiagram &D, const FixedPoint &f) {
    if (f.m != D.m() || f.n != D.n() || f.row_sums() != D.r || f.col_sums() != D.c)
        throw InputError("fixed point does not match the brane diagram");
    std::map<int, std::vector<Monomial>> out;
    for (int l = 1; l <= f.n; ++l) {
        int rank = 0;
        for (int k = f.m; k >= 1; --k) {
            if (!f.tie(k, l)) continue;
            for (int depth = 0; depth <= k - 1; ++depth)
                out[-depth].push_back(Monomial::of(avar(l)) * Monomial::of(hbar(), -(rank + depth)));
            ++rank;
        }
    }
    for (auto &[lev, v] : out) std::sort(v.begin(), v.end());
    return out;
}

Substitution restriction_substitution(const BraneDiagram &D, const FixedPoint &f) {
    Substitution s;
    for (auto &[lev, v] : decorations(D, f)) {
        if (lev == 0) continue;
        if (static_cast<int>(v.size()) != D.d(lev))
            throw InputError("decoration count does not match the dimension vector");
        for (std::size_t i = 0; i < v.size(); ++i) s.image[tvar(lev, static_cast<int>(i) + 1)] = v[i];
    }
    return s;
}

namespace {

using Multiset = std::vector<Monomial>;

void add_hom(CharacterSum &ch, const Multiset &A, const Multiset &B, const Monomial &scale, long coef) {
    for (auto &a : A)
        for (auto &b : B) {
            auto &x = ch[b / a * scale];
            x += coef;
        }
}

void prune(CharacterSum &ch) {
    for (auto it = ch.begin(); it != ch.end();)
        it = it->second == 0 ? ch.erase(it) : std::next(it);
}

Multiset xi_positive(const std::vector<int> &c, int k) {
    Multiset out;
    for (int j = k + 1; j <= static_cast<int>(c.size()); ++j)
        for (int i = 0; i < c[j - 1]; ++i) out.push_back(Monomial::of(avar(j)) * Monomial::of(hbar(), -i));
    return out;
}

void add_d5(CharacterSum &ch, const std::vector<int> &c) {
    const int n = static_cast<int>(c.size());
    const Monomial one, h = Monomial::of(hbar());
    for (int k = 1; k <= n; ++k) {
        Multiset prev = xi_positive(c, k - 1), cur = xi_positive(c, k);
        Multiset ak{Monomial::of(avar(k))};
        add_hom(ch, ak, prev, one, 1);
        add_hom(ch, cur, ak, h, 1);
        add_hom(ch, cur, prev, one, 1);
        add_hom(ch, cur, prev, h, -1);
        add_hom(ch, prev, prev, h, 1);
        add_hom(ch, cur, cur, h, 1);
    }
    for (int k = 0; k <= n; ++k) {
        Multiset x = xi_positive(c, k);
        add_hom(ch, x, x, one, -1);
        add_hom(ch, x, x, h, -1);
    }
}

} // namespace

CharacterSum d5_character(const std::vector<int> &c) {
    CharacterSum ch;
    add_d5(ch, c);
    prune(ch);
    return ch;
}

CharacterSum tangent_character(const BraneDiagram &D, const FixedPoint &f) {
    auto dec = decorations(D, f);
    auto xi = [&](int k) -> Multiset {
        auto it = dec.find(k);
        return it == dec.end() ? Multiset{} : it->second;
    };
    CharacterSum ch;
    const Monomial one, h = Monomial::of(hbar());
    for (int k = 0; k >= -D.m(); --k) {
        add_hom(ch, xi(k), xi(k - 1), h, 1);
        add_hom(ch, xi(k - 1), xi(k), one, 1);
    }
    for (int k = -1; k >= -D.m(); --k) {
        add_hom(ch, xi(k), xi(k), one, -1);
        add_hom(ch, xi(k), xi(k), h, -1);
    }
    add_d5(ch, D.c);
    prune(ch);
    return ch;
}

CharacterSum negative_part(const CharacterSum &ch, const Chamber &s, ChamberConvention conv) {
    CharacterSum out;
    for (auto &[w, mult] : ch) {
        int num = 0, den = 0, count = 0;
        for (auto &[v, d] : w.terms()) {
            if (v.kind == VarKind::Hbar) continue;
            if (v.kind != VarKind::A) throw std::invalid_argument("character weight outside {a, hbar}");
            ++count;
            if (d == 2)
                num = v.i;
            else if (d == -2)
                den = v.i;
            else
                throw std::invalid_argument("weight is not of the form a_i/a_j hbar^s");
        }
        if (count == 0) continue;
        if (count != 2 || num == 0 || den == 0)
            throw std::invalid_argument("weight is not of the form a_i/a_j hbar^s: " + to_string(w));
        bool keep = conv == ChamberConvention::Literal
                        ? s.sigma.at(num - 1) < s.sigma.at(den - 1)
                        : s.inverse(num) < s.inverse(den);
        if (keep) out[w] += mult;
    }
    return out;
}

long rank(const CharacterSum &ch) {
    long r = 0;
    for (auto &[w, c] : ch) r += c;
    return r;
}

std::string to_string(const CharacterSum &ch) {
    if (ch.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto &[w, c] : ch) {
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        first = false;
        long a = c < 0 ? -c : c;
        if (a != 1) os << a << "*";
        os << to_string(w);
    }
    return os.str();
}

FlavorClass euler_class(const CharacterSum &ch, Flavor fl) {
    Term t;
    for (auto &[w, c] : ch) t.factors.push_back(Factor{euler_atom(fl, w), static_cast<int>(c), false, {}});
    canonicalize(t);
    return FlavorClass{fl, {t}};
}

} // namespace bowcalc
