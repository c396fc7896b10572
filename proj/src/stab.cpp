#include "bowcalc/stab.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace bowcalc {

// ---------------- slopes ----------------

mpq_class SlopeConfig::m(int i, int k) const {
    mpq_class r = 0;
    for (int j = i; j <= k - 1; ++j) {
        if (j < 1 || j > static_cast<int>(s.size()))
            throw std::out_of_range("slope s_" + std::to_string(j) + " not configured");
        r += s[j - 1];
    }
    return r;
}

bool SlopeConfig::generic(int guard) const {
    const int len = static_cast<int>(s.size());
    if (len == 0) return true;
    if (len > 6) guard = std::min(guard, 2); // keep the search at desk scale
    std::vector<int> n(len, -guard);
    while (true) {
        bool all_zero = std::all_of(n.begin(), n.end(), [](int x) { return x == 0; });
        if (!all_zero) {
            mpq_class sum = 0;
            for (int i = 0; i < len; ++i) sum += n[i] * s[i];
            if (sum.get_den() == 1) return false;
        }
        int p = 0;
        while (p < len && n[p] == guard) n[p++] = -guard;
        if (p == len) break;
        ++n[p];
    }
    return true;
}

SlopeConfig SlopeConfig::default_for(int m, std::uint64_t seed) {
    std::mt19937_64 rng(seed ? seed : 997);
    std::vector<int> pool(800);
    std::iota(pool.begin(), pool.end(), 100);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::shuffle(pool.begin(), pool.end(), rng);
        SlopeConfig sc;
        for (int i = 0; i < m - 1; ++i) sc.s.emplace_back(pool[i], 997);
        for (auto &x : sc.s) x.canonicalize();
        if (sc.generic()) return sc;
    }
    throw std::runtime_error("could not draw generic slopes");
}

SlopeConfig SlopeConfig::parse(const std::string &text) {
    SlopeConfig sc;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
        if (item.empty()) continue;
        mpq_class v;
        if (v.set_str(item, 10) != 0) throw InputError("bad slope '" + item + "'");
        v.canonicalize();
        sc.s.push_back(v);
    }
    return sc;
}

std::string SlopeConfig::text() const {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + s[i].get_str();
    return out;
}

static mpz_class floor_q(const mpq_class &x) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return r;
}

// ---------------- W-tilde ----------------

GradedFunction one_tie(int k, int l, Flavor fl, const SlopeConfig &slopes) {
    (void)l;
    if (k < 1) throw InputError("tie must start at an NS5 brane Z_k with k >= 1");
    GradedFunction g{FlavorClass::one(fl), std::vector<int>(k, 1)};
    Term t;
    const Monomial h = Monomial::of(hbar());
    for (int i = 1; i <= k - 1; ++i) {
        Monomial ratio = Monomial::of(tvar(-i, 1)) / Monomial::of(tvar(-i + 1, 1));
        Monomial zz = Monomial::of(zvar(k)) / Monomial::of(zvar(i));
        switch (fl) {
        case Flavor::E:
            t.factors.push_back(Factor{euler_atom(fl, ratio * zz), 1, false, {}});
            t.factors.push_back(Factor{euler_atom(fl, h), 1, false, {}});
            t.factors.push_back(Factor{euler_atom(fl, zz / h), -1, false, {}});
            break;
        case Flavor::K: {
            t.factors.push_back(Factor{euler_atom(fl, h), 1, false, {}});
            mpz_class fl_m = floor_q(slopes.m(i, k));
            int doubled = static_cast<int>(2 * fl_m.get_si() + 1);
            Monomial base = ratio * h;
            for (auto &[v, d] : base.terms()) t.pre *= Monomial::of_doubled(v, d / 2 * doubled);
            break;
        }
        case Flavor::H:
            t.factors.push_back(Factor{euler_atom(fl, h), 1, false, {}});
            break;
        }
    }
    canonicalize(t);
    g.cls.terms = {t};
    return g;
}

std::vector<std::pair<int, int>> tie_order(const FixedPoint &f, const Chamber &sigma) {
    auto ties = f.ties();
    std::sort(ties.begin(), ties.end(), [&](auto &x, auto &y) {
        int sx = sigma.inverse(x.second), sy = sigma.inverse(y.second);
        if (sx != sy) return sx < sy;
        return x.first > y.first;
    });
    return ties;
}

GradedFunction wtilde(const FixedPoint &f, const Chamber &sigma, Flavor fl, const SlopeConfig &slopes) {
    auto order = tie_order(f, sigma);
    if (order.empty()) return unit(fl);
    GradedFunction acc = one_tie(order[0].first, order[0].second, fl, slopes);
    for (std::size_t i = 1; i < order.size(); ++i)
        acc = star(acc, one_tie(order[i].first, order[i].second, fl, slopes));
    return acc;
}

// ---------------- correction factors ----------------

FlavorClass epsilon_factor(const std::vector<int> &c, Flavor fl) {
    Term t;
    for (int ck : c)
        for (int j = 1; j <= ck - 1; ++j)
            for (int i = 1; i <= j; ++i)
                t.factors.push_back(Factor{euler_atom(fl, Monomial::of(hbar(), i)), -1, false, {}});
    canonicalize(t);
    return FlavorClass{fl, {t}};
}

FlavorClass tau_factor(const BraneDiagram &D, Flavor fl) {
    Term t;
    for (int k = -1; k >= -D.m(); --k)
        for (int i = 1; i <= D.d(k); ++i)
            for (int j = 1; j <= D.d(k); ++j) {
                Monomial w = Monomial::of(hbar()) * Monomial::of(tvar(k, i)) / Monomial::of(tvar(k, j));
                t.factors.push_back(Factor{euler_atom(fl, w), -1, false, {}});
            }
    canonicalize(t);
    return FlavorClass{fl, {t}};
}

FlavorClass eu_factor(const std::vector<int> &c, const Chamber &sigma, Flavor fl, ChamberConvention conv) {
    return euler_class(negative_part(d5_character(c), sigma, conv), fl);
}

Substitution t0_substitution(const std::vector<int> &c, const Chamber &sigma) {
    if (sigma.sigma.size() != c.size()) throw InputError("chamber size does not match the D5 branes");
    Substitution s;
    int pos = 1;
    for (int l : sigma.sigma)
        for (int e = 0; e < c[l - 1]; ++e)
            s.image[tvar(0, pos++)] = Monomial::of(avar(l)) * Monomial::of(hbar(), -e);
    return s;
}

StabResult w_function(const BraneDiagram &D, const FixedPoint &f, const Chamber &sigma, Flavor fl,
                      const SlopeConfig &slopes, ChamberConvention conv) {
    StabResult r;
    r.D = D;
    r.f = f;
    r.sigma = sigma;
    r.flavor = fl;
    r.slopes = slopes;
    if (f.row_sums() != D.r || f.col_sums() != D.c) throw InputError("fixed point does not match the diagram");
    r.epsilon = epsilon_factor(D.c, fl);
    r.tau = tau_factor(D, fl);
    r.eu = eu_factor(D.c, sigma, fl, conv);
    GradedFunction wt = wtilde(f, sigma, fl, slopes);
    r.wtilde_restricted = apply_substitution(wt.cls, t0_substitution(D.c, sigma));
    for (auto &t : r.wtilde_restricted.terms)
        for (auto &x : t.factors)
            if (x.zero) throw std::logic_error("t_0 substitution hit a vanishing factor");
    r.cls = r.epsilon * r.tau * r.eu * r.wtilde_restricted;
    return r;
}

// ---------------- restriction ----------------

static std::map<Var, mpq_class> random_direction(const Substitution &s, std::mt19937_64 &rng) {
    std::uniform_int_distribution<int> d(1, 1000003);
    std::map<Var, mpq_class> u;
    for (auto &[v, img] : s.image) u[v] = mpq_class(d(rng), 1000);
    return u;
}

Restriction restrict_class(const StabResult &w, const FixedPoint &g, const RestrictionOptions &opt) {
    Substitution s = restriction_substitution(w.D, g);
    FlavorClass sub = apply_substitution(w.cls, s);
    std::mt19937_64 rng(opt.seed);
    Restriction out;
    FlavorClass first, second;
    for (int attempt = 0;; ++attempt) {
        try {
            first = leading_limit(sub, random_direction(s, rng), &out.stats);
            second = leading_limit(sub, random_direction(s, rng));
            break;
        } catch (const DegenerateDirection &) {
            if (attempt > 50) throw;
        }
    }
    out.value = first;
    if (out.stats.balanced == 0) return out;
    if (w.flavor == Flavor::H) {
        if (compare_exact(first, second, opt.check_points, opt.seed + 1) != 0)
            throw LimitDisagreement("restriction limit depends on the direction of approach");
    } else {
        auto cmp = compare_numeric(first, second, opt.check_points, opt.seed + 1, opt.q);
        out.direction_disagreement = cmp.max_residual;
        if (cmp.max_residual > opt.agree_tol)
            throw LimitDisagreement("restriction limit depends on the direction of approach");
    }
    return out;
}

FlavorClass diagonal_target(const BraneDiagram &D, const FixedPoint &f, const Chamber &sigma, Flavor fl,
                            ChamberConvention conv) {
    return euler_class(negative_part(tangent_character(D, f), sigma, conv), fl);
}

// ---------------- T*P^{n-1} ----------------

BraneDiagram tpn_diagram(int n) { return make_diagram({n - 1, 1}, std::vector<int>(n, 1)); }

FixedPoint tpn_fixed_point(int n, int k) {
    std::vector<std::vector<int>> rows(2, std::vector<int>(n, 0));
    for (int l = 1; l <= n; ++l) rows[l == k ? 1 : 0][l - 1] = 1;
    return fixed_point_from_rows(rows);
}

FlavorClass tpn_closed_form(int n, int k, Flavor fl, const SlopeConfig &slopes) {
    const Monomial t = Monomial::of(tvar(-1, 1)), h = Monomial::of(hbar());
    auto a = [](int i) { return Monomial::of(avar(i)); };
    Term term;
    auto push = [&](const Monomial &w, int p) { term.factors.push_back(Factor{euler_atom(fl, w), p, false, {}}); };
    for (int i = 1; i < k; ++i) push(a(i) / t, 1);
    for (int i = k + 1; i <= n; ++i) push(t / a(i) * h, 1);
    if (fl == Flavor::E) {
        Monomial zz = Monomial::of(zvar(2)) / Monomial::of(zvar(1));
        push(t / a(k) * zz * h.pow(k - 1), 1);
        push(zz * h.pow(k - 2), -1);
    } else if (fl == Flavor::K) {
        int doubled = static_cast<int>(2 * floor_q(slopes.m(1, 2)).get_si() + 1);
        for (auto &[v, d] : (t * h / a(k)).terms()) term.pre *= Monomial::of_doubled(v, d / 2 * doubled);
    }
    canonicalize(term);
    return FlavorClass{fl, {term}};
}

FlavorClass k_to_h(const FlavorClass &k) {
    if (k.flavor != Flavor::K) throw std::invalid_argument("k_to_h needs a K class");
    FlavorClass out{Flavor::H, {}};
    for (auto &t : k.terms) {
        Term r;
        r.coeff = t.coeff;
        for (auto &f : t.factors) {
            Factor g = f;
            g.atom.kind = AtomKind::Linear;
            g.atom.lin = LinearForm::from_monomial(f.atom.mono);
            g.atom.mono = Monomial();
            r.factors.push_back(g);
        }
        canonicalize(r);
        out.terms.push_back(std::move(r));
    }
    return out;
}

// ---------------- comparisons ----------------

static std::vector<Var> union_vars(const FlavorClass &a, const FlavorClass &b) {
    std::set<Var> s;
    for (auto &v : variables(a)) s.insert(v);
    for (auto &v : variables(b)) s.insert(v);
    return {s.begin(), s.end()};
}

Comparison compare_numeric(const FlavorClass &a, const FlavorClass &b, int points, std::uint64_t seed, cplx q) {
    std::mt19937_64 rng(seed);
    Comparison c;
    auto vars = union_vars(a, b);
    const cplx qq = a.flavor == Flavor::E ? q : cplx(0);
    int guard = 0;
    while (c.points < points) {
        if (++guard > 50 * points + 100) throw std::runtime_error("could not find regular sample points");
        EvalPoint pt = random_point(vars, rng, qq);
        try {
            cplx va = evaluate(a, pt), vb = evaluate(b, pt);
            double scale = std::max({std::abs(va), std::abs(vb), 1e-300});
            c.max_residual = std::max(c.max_residual, std::abs(va - vb) / scale);
            ++c.points;
        } catch (const ResampleRequired &) {
        }
    }
    return c;
}

int compare_exact(const FlavorClass &a, const FlavorClass &b, int points, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> d(-100000, 100000);
    auto vars = union_vars(a, b);
    int bad = 0, done = 0, guard = 0;
    while (done < points) {
        if (++guard > 50 * points + 100) throw std::runtime_error("could not find regular sample points");
        std::map<Var, mpq_class> vals;
        for (auto &v : vars) vals[v] = mpq_class(d(rng), 97);
        try {
            if (evaluate_exact(a, vals) != evaluate_exact(b, vals)) ++bad;
            ++done;
        } catch (const StructuralPole &) {
        }
    }
    return bad;
}

} // namespace bowcalc
