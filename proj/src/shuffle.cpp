#include "bowcalc/shuffle.hpp"

#include <algorithm>
#include <functional>
#include <random>

namespace bowcalc {

GradedFunction unit(Flavor fl) { return GradedFunction{FlavorClass::one(fl), {0}}; }

long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

static int at(const std::vector<int> &d, int j) { return j < static_cast<int>(d.size()) ? d[j] : 0; }

FlavorClass kernel(const std::vector<int> &d1, const std::vector<int> &d2, Flavor fl) {
    const int M = static_cast<int>(std::max(d1.size(), d2.size())) - 1;
    const Monomial h = Monomial::of(hbar());
    Term t;
    auto add = [&](int la, int na, int ta, int lb, int nb, int tb, bool with_h, int power) {
        // prod over a in t^{ta}_{la}, b in t^{tb}_{lb} of e(h^? b/a)^power
        for (int i = 1; i <= na; ++i)
            for (int j = 1; j <= nb; ++j) {
                Monomial w = Monomial::of(tvar(lb, j, tb)) / Monomial::of(tvar(la, i, ta));
                if (with_h) w *= h;
                t.factors.push_back(Factor{euler_atom(fl, w), power, false, {}});
            }
    };
    for (int j = 1; j <= M; ++j) {
        const int k = -j;
        add(k, at(d1, j), 1, k, at(d2, j), 2, true, 1);              // e_h(t'_k, t''_k)
        add(k + 1, at(d2, j - 1), 2, k, at(d1, j), 1, true, 1);      // e_h(t''_{k+1}, t'_k)
        add(k, at(d2, j), 2, k + 1, at(d1, j - 1), 1, false, 1);     // e(t''_k, t'_{k+1})
        add(k, at(d2, j), 2, k, at(d1, j), 1, false, -1);            // 1 / e(t''_k, t'_k)
    }
    canonicalize(t);
    return FlavorClass{fl, {t}};
}

GradedFunction star(const GradedFunction &f1, const GradedFunction &f2) {
    if (f1.cls.flavor != f2.cls.flavor) throw std::invalid_argument("flavor mismatch in star");
    const Flavor fl = f1.cls.flavor;
    const int M = std::max(f1.depth(), f2.depth());
    std::vector<int> d(M + 1), d1(M + 1), d2(M + 1);
    for (int j = 0; j <= M; ++j) {
        d1[j] = at(f1.d, j);
        d2[j] = at(f2.d, j);
        d[j] = d1[j] + d2[j];
    }
    // Z_{d'}: z_k -> hbar^{-c_k} z_k with c_k = d'_{-k+1} - d'_{-k}
    std::vector<int> charges(M + 1);
    for (int k = 1; k <= M + 1; ++k) charges[k - 1] = at(d1, k - 1) - at(d1, k);
    const FlavorClass shifted = z_shift(f2.cls, charges);
    const FlavorClass ker = kernel(d1, d2, fl);

    GradedFunction out{FlavorClass::zero(fl), d};
    std::vector<std::vector<int>> chosen(M + 1);

    std::function<void(int)> levels = [&](int j) {
        if (j > M) {
            std::map<Var, Var> m1, m2, mk;
            for (int i = 1; i <= d1[0]; ++i) m1[tvar(0, i)] = tvar(0, i);
            for (int i = 1; i <= d2[0]; ++i) m2[tvar(0, i)] = tvar(0, d1[0] + i);
            for (int l = 1; l <= M; ++l) {
                std::vector<int> comp;
                for (int i = 1; i <= d[l]; ++i)
                    if (!std::binary_search(chosen[l].begin(), chosen[l].end(), i)) comp.push_back(i);
                for (int i = 1; i <= d1[l]; ++i) m1[tvar(-l, i)] = tvar(-l, chosen[l][i - 1]);
                for (int i = 1; i <= d2[l]; ++i) m2[tvar(-l, i)] = tvar(-l, comp[i - 1]);
            }
            for (auto &[v, w] : m1) mk[tvar(v.k, v.i, 1)] = w;
            for (auto &[v, w] : m2) mk[tvar(v.k, v.i, 2)] = w;
            FlavorClass piece = rename(f1.cls, m1) * rename(shifted, m2) * rename(ker, mk);
            out.cls.terms.insert(out.cls.terms.end(), std::make_move_iterator(piece.terms.begin()),
                                 std::make_move_iterator(piece.terms.end()));
            return;
        }
        // subsets of {1..d_j} of size d'_j in lexicographic order
        std::vector<int> cur;
        std::function<void(int)> pick = [&](int start) {
            if (static_cast<int>(cur.size()) == d1[j]) {
                chosen[j] = cur;
                levels(j + 1);
                return;
            }
            for (int i = start; i <= d[j]; ++i) {
                cur.push_back(i);
                pick(i + 1);
                cur.pop_back();
            }
        };
        pick(1);
    };
    levels(1);
    return out;
}

WheelReport wheel_check(const GradedFunction &f, int trials, std::uint64_t seed, cplx q) {
    WheelReport rep;
    const Flavor fl = f.cls.flavor;
    bool any = false;
    for (int j = 1; j <= f.depth(); ++j)
        if (f.d[j] >= 2) any = true;
    if (!any) {
        rep.vacuous = true;
        return rep;
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> udir(1, 997);
    auto vars = variables(f.cls);
    for (int j = 1; j <= f.depth(); ++j) {
        const int k = -j;
        const int dk = f.d[j];
        if (dk < 2) continue;
        for (int side : {+1, -1}) { // +1: neighbour level k+1 with t_a = h t_c; -1: level k-1, t_a = t_c / h
            const int nb = side > 0 ? at(f.d, j - 1) : at(f.d, j + 1);
            for (int a = 1; a <= dk; ++a)
                for (int c = 1; c <= dk; ++c) {
                    if (a == c) continue;
                    for (int b = 1; b <= nb; ++b) {
                        Substitution s;
                        s.image[tvar(k + side, b)] = Monomial::of(tvar(k, a));
                        s.image[tvar(k, c)] = Monomial::of(tvar(k, a)) * Monomial::of(hbar(), -side);
                        ++rep.conditions;
                        FlavorClass sub = apply_substitution(f.cls, s);
                        for (int tr = 0; tr < trials; ++tr) {
                            std::map<Var, mpq_class> u;
                            for (auto &[v, img] : s.image) u[v] = udir(rng);
                            FlavorClass lim;
                            try {
                                lim = leading_limit(sub, u);
                            } catch (const DegenerateDirection &) {
                                --tr;
                                continue;
                            } catch (const PoleError &) {
                                rep.max_residual = std::max(rep.max_residual, 1.0e300);
                                break;
                            }
                            if (lim.terms.empty()) {
                                ++rep.trials;
                                continue;
                            }
                            auto pvars = variables(lim);
                            for (int attempt = 0; attempt < 20; ++attempt) {
                                EvalPoint pt = random_point(pvars, rng, fl == Flavor::E ? q : cplx(0));
                                try {
                                    auto [val, scale] = evaluate_with_scale(lim, pt);
                                    double res = scale > 0 ? std::abs(val) / scale : 0.0;
                                    rep.max_residual = std::max(rep.max_residual, res);
                                    ++rep.trials;
                                    break;
                                } catch (const ResampleRequired &) {
                                }
                            }
                        }
                    }
                }
        }
    }
    return rep;
}

} // namespace bowcalc
