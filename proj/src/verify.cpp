#include "bowcalc/verify.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace bowcalc {

namespace {

bool numerically_zero(const FlavorClass &c, int points, std::uint64_t seed, cplx q, double tol) {
    if (c.terms.empty()) return true;
    std::mt19937_64 rng(seed);
    auto vars = variables(c);
    int done = 0, guard = 0;
    while (done < points) {
        if (++guard > 50 * points + 100) throw std::runtime_error("could not find regular sample points");
        EvalPoint pt = random_point(vars, rng, c.flavor == Flavor::E ? q : cplx(0));
        try {
            auto [v, scale] = evaluate_with_scale(c, pt);
            if (std::abs(v) > tol * std::max(scale, 1e-300)) return false;
            ++done;
        } catch (const ResampleRequired &) {
        }
    }
    return true;
}

bool is_zero(const FlavorClass &c, int points, std::uint64_t seed, cplx q, double tol) {
    if (c.terms.empty()) return true;
    if (c.flavor == Flavor::H) return compare_exact(c, FlavorClass::zero(Flavor::H), points, seed) == 0;
    return numerically_zero(c, points, seed, q, tol);
}

FlavorClass invert_single(const FlavorClass &c) {
    if (c.terms.size() != 1) throw std::invalid_argument("can only invert a single-term class");
    Term t = c.terms[0];
    t.coeff = mpq_class(1) / t.coeff;
    t.pre = t.pre.inverse();
    for (auto &f : t.factors) f.power = -f.power;
    return FlavorClass{c.flavor, {t}};
}

// rewrite every monomial variable by a monomial
FlavorClass map_monomials(const FlavorClass &c, const std::function<Monomial(Var)> &fn) {
    auto mm = [&](const Monomial &m) {
        Monomial out;
        for (auto &[v, d] : m.terms()) {
            Monomial img = fn(v);
            for (auto &[w, e] : img.terms()) {
                long prod = static_cast<long>(e) * d;
                if (prod % 2 != 0) throw std::invalid_argument("quarter power in variable swap");
                out *= Monomial::of_doubled(w, static_cast<int>(prod / 2));
            }
        }
        return out;
    };
    FlavorClass r = c;
    for (auto &t : r.terms) {
        t.pre = mm(t.pre);
        for (auto &f : t.factors) {
            if (f.atom.kind == AtomKind::Linear) throw std::invalid_argument("variable swap needs a multiplicative class");
            f.atom.mono = mm(f.atom.mono);
        }
        canonicalize(t);
    }
    return r;
}

// Multiply through by the common denominator, strip common factors, merge equal terms.
FlavorClass clear_denominators(const FlavorClass &c) {
    std::map<Atom, int> denom;
    for (auto &t : c.terms)
        for (auto &f : t.factors)
            if (f.power < 0) denom[f.atom] = std::max(denom[f.atom], -f.power);
    std::vector<std::pair<mpq_class, std::map<Atom, int>>> terms;
    std::vector<Monomial> pres;
    for (auto &t : c.terms) {
        std::map<Atom, int> p = denom;
        for (auto &f : t.factors) p[f.atom] += f.power;
        terms.push_back({t.coeff, p});
        pres.push_back(t.pre);
    }
    if (!terms.empty()) {
        std::map<Atom, int> common;
        for (auto &[a, e] : terms[0].second) common[a] = e;
        for (auto &[coef, p] : terms)
            for (auto &[a, e] : common) {
                auto it = p.find(a);
                e = std::min(e, it == p.end() ? 0 : it->second);
            }
        for (auto &[coef, p] : terms)
            for (auto &[a, e] : common) p[a] -= e;
    }
    std::map<std::pair<Monomial, std::vector<std::pair<Atom, int>>>, mpq_class> merged;
    std::vector<std::pair<Monomial, std::vector<std::pair<Atom, int>>>> order;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        std::vector<std::pair<Atom, int>> key;
        for (auto &[a, e] : terms[i].second)
            if (e != 0) key.push_back({a, e});
        auto k = std::make_pair(pres[i], key);
        auto it = merged.find(k);
        if (it == merged.end()) {
            merged.emplace(k, terms[i].first);
            order.push_back(k);
        } else {
            it->second += terms[i].first;
        }
    }
    FlavorClass out{c.flavor, {}};
    for (auto &k : order) {
        const mpq_class &coef = merged[k];
        if (coef == 0) continue;
        Term t;
        t.coeff = coef;
        t.pre = k.first;
        for (auto &[a, e] : k.second) t.factors.push_back(Factor{a, e, false, {}});
        out.terms.push_back(std::move(t));
    }
    return out;
}

Certification certify(const FlavorClass &expanded, const MirrorOptions &opt) {
    Certification cert;
    cert.q = opt.q;
    std::mt19937_64 rng(opt.seed);
    auto vars = variables(expanded);
    for (auto q : opt.q) {
        int done = 0, guard = 0;
        while (done < opt.points) {
            if (++guard > 50 * opt.points + 100) throw std::runtime_error("could not find regular sample points");
            EvalPoint pt = random_point(vars, rng, q);
            try {
                auto [v, scale] = evaluate_with_scale(expanded, pt);
                double res = scale > 0 ? std::abs(v) / scale : 0.0;
                cert.max_residual = std::max(cert.max_residual, res);
                ++done;
                ++cert.points;
            } catch (const ResampleRequired &) {
            }
        }
    }
    cert.certified = cert.max_residual < opt.tol;
    return cert;
}

struct Side {
    BraneDiagram D;
    std::vector<FixedPoint> fps;
    std::map<FixedPoint, int> index;
    std::vector<StabResult> w;
    std::vector<FlavorClass> target_inv;
    std::map<std::pair<int, int>, FlavorClass> restricted;

    explicit Side(const BraneDiagram &d) : D(d), fps(enumerate_fixed_points(d.r, d.c)) {
        for (std::size_t i = 0; i < fps.size(); ++i) index[fps[i]] = static_cast<int>(i);
        w.resize(fps.size());
        target_inv.resize(fps.size());
    }
    const StabResult &stab(int f) {
        if (w[f].cls.terms.empty()) w[f] = w_function(D, fps[f], Chamber::identity(D.n()), Flavor::E);
        return w[f];
    }
    const FlavorClass &tinv(int g) {
        if (target_inv[g].terms.empty())
            target_inv[g] = invert_single(diagonal_target(D, fps[g], Chamber::identity(D.n()), Flavor::E));
        return target_inv[g];
    }
    FlavorClass ratio(int f, int g) {
        auto key = std::make_pair(f, g);
        auto it = restricted.find(key);
        if (it == restricted.end())
            it = restricted.emplace(key, restrict_class(stab(f), fps[g]).value).first;
        if (it->second.terms.empty()) return FlavorClass::zero(Flavor::E);
        return it->second * tinv(g);
    }
};

IdentityRecord build_identity(Side &X, Side &Y, int f, int g, const MirrorOptions &opt) {
    IdentityRecord rec;
    rec.r = X.D.r;
    rec.c = X.D.c;
    rec.f = X.fps[f];
    rec.g = X.fps[g];
    const int m = X.D.m(), n = X.D.n();
    const int fm = Y.index.at(mirror(rec.f)), gm = Y.index.at(mirror(rec.g));
    rec.sign = (crossings(rec.f) + crossings(rec.g)) % 2 == 0 ? 1 : -1;
    FlavorClass lhs_raw = X.ratio(f, g);
    rec.rhs = Y.ratio(gm, fm);
    if (rec.sign < 0) rec.rhs = negate(rec.rhs);

    const int zero_points = 4;
    const bool lz = numerically_zero(lhs_raw, zero_points, opt.seed + 3, opt.q.front(), 1e-9);
    const bool rz = numerically_zero(rec.rhs, zero_points, opt.seed + 5, opt.q.front(), 1e-9);

    // X -> X^! variables: a_i -> z_{n+1-i}, z_i -> a_{m+1-i}
    auto attempt = [&](bool inv) {
        auto swap = [&](Var v) -> Monomial {
            switch (v.kind) {
            case VarKind::A: return Monomial::of(zvar(n + 1 - v.i));
            case VarKind::Z: return Monomial::of(avar(m + 1 - v.i));
            case VarKind::Hbar: return Monomial::of(hbar(), inv ? -1 : 1);
            default: throw std::logic_error("t-variable left after restriction");
            }
        };
        rec.hbar_inverted = inv;
        rec.lhs = map_monomials(lhs_raw, swap);
        rec.expanded = clear_denominators(rec.lhs + negate(rec.rhs));
        rec.cert = rec.expanded.terms.empty() ? Certification{0, 0.0, opt.q, true} : certify(rec.expanded, opt);
    };
    if (lz && rz) {
        rec.trivial = true;
        rec.lhs = FlavorClass::zero(Flavor::E);
        rec.expanded = FlavorClass::zero(Flavor::E);
        rec.cert = Certification{0, 0.0, opt.q, true};
        return rec;
    }
    attempt(true);
    if (rec.cert.certified) return rec;
    attempt(false);
    if (rec.cert.certified) return rec;
    attempt(true); // report the default convention on failure
    return rec;
}

} // namespace

// ---------------- axioms ----------------

bool AxiomReport::diagonal_ok(double tol) const {
    return std::all_of(diagonal_residual.begin(), diagonal_residual.end(), [&](double r) { return r < tol; });
}

std::vector<std::vector<bool>> AxiomReport::order() const {
    auto le = nonzero;
    for (int k = 0; k < size; ++k)
        for (int i = 0; i < size; ++i)
            if (le[i][k])
                for (int j = 0; j < size; ++j)
                    if (le[k][j]) le[i][j] = true;
    return le;
}

std::vector<std::pair<int, int>> AxiomReport::hasse() const {
    auto le = order();
    auto less = [&](int a, int b) { return a != b && le[b][a]; };
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < size; ++a)
        for (int b = 0; b < size; ++b) {
            if (!less(a, b)) continue;
            bool covered = true;
            for (int c = 0; c < size && covered; ++c)
                if (less(a, c) && less(c, b)) covered = false;
            if (covered) out.push_back({a, b});
        }
    return out;
}

AxiomReport check_axioms(const BraneDiagram &D, const Chamber &sigma, Flavor fl, const AxiomOptions &opt) {
    AxiomReport rep;
    rep.points = enumerate_fixed_points(D.r, D.c);
    rep.size = static_cast<int>(rep.points.size());
    rep.nonzero.assign(rep.size, std::vector<bool>(rep.size, false));
    rep.diagonal_residual.assign(rep.size, 0.0);
    RestrictionOptions ro;
    ro.seed = opt.seed;
    ro.q = opt.q;
    for (int f = 0; f < rep.size; ++f) {
        StabResult w = w_function(D, rep.points[f], sigma, fl);
        for (int g = 0; g < rep.size; ++g) {
            Restriction r;
            try {
                r = restrict_class(w, rep.points[g], ro);
            } catch (const std::exception &e) {
                rep.failures.push_back("W(" + to_string(rep.points[f]) + ")|" + to_string(rep.points[g]) + ": " + e.what());
                rep.nonzero[f][g] = true;
                if (f == g) rep.diagonal_residual[f] = 1e300;
                continue;
            }
            rep.nonzero[f][g] = !is_zero(r.value, opt.points, opt.seed + 17 * g + f, opt.q, 1e-9);
            if (f == g) {
                FlavorClass tgt = diagonal_target(D, rep.points[f], sigma, fl);
                if (fl == Flavor::H)
                    rep.diagonal_residual[f] = compare_exact(r.value, tgt, opt.points, opt.seed + f) == 0 ? 0.0 : 1.0;
                else
                    rep.diagonal_residual[f] = compare_numeric(r.value, tgt, opt.points, opt.seed + f, opt.q).max_residual;
                if (!rep.nonzero[f][f]) rep.failures.push_back("vanishing diagonal restriction at " + to_string(rep.points[f]));
            }
        }
    }
    auto le = rep.order();
    for (int a = 0; a < rep.size; ++a)
        for (int b = 0; b < rep.size; ++b) {
            if (a != b && rep.nonzero[a][b] && rep.nonzero[b][a]) rep.antisymmetric = false;
            if (a != b && le[a][b] && le[b][a]) rep.acyclic = false;
        }
    return rep;
}

std::optional<std::vector<int>> match_hasse(const AxiomReport &rep,
                                            const std::vector<std::pair<int, FixedPoint>> &known,
                                            const std::vector<std::pair<int, int>> &edges) {
    const int N = rep.size;
    std::vector<int> label(N, 0);
    std::vector<bool> used(N + 1, false);
    for (auto &[lab, fp] : known) {
        auto it = std::find(rep.points.begin(), rep.points.end(), fp);
        if (it == rep.points.end() || lab < 1 || lab > N) return std::nullopt;
        label[it - rep.points.begin()] = lab;
        used[lab] = true;
    }
    std::vector<int> free_pts, free_labels;
    for (int i = 0; i < N; ++i)
        if (!label[i]) free_pts.push_back(i);
    for (int l = 1; l <= N; ++l)
        if (!used[l]) free_labels.push_back(l);
    std::set<std::pair<int, int>> want(edges.begin(), edges.end());
    auto computed = rep.hasse();
    std::sort(free_labels.begin(), free_labels.end());
    do {
        auto lab = label;
        for (std::size_t i = 0; i < free_pts.size(); ++i) lab[free_pts[i]] = free_labels[i];
        std::set<std::pair<int, int>> got;
        for (auto &[a, b] : computed) got.insert({lab[a], lab[b]});
        if (got == want) return lab;
    } while (std::next_permutation(free_labels.begin(), free_labels.end()));
    return std::nullopt;
}

// ---------------- mirror identities ----------------

int IdentityRecord::factors_per_term() const {
    int best = 0;
    for (auto &t : expanded.terms) {
        int n = 0;
        for (auto &f : t.factors) n += std::abs(f.power);
        best = std::max(best, n);
    }
    return best;
}

IdentityRecord mirror_identity(const BraneDiagram &D, const FixedPoint &f, const FixedPoint &g,
                               const MirrorOptions &opt) {
    auto [rm, cm] = mirror_charges(D.r, D.c);
    Side X(D), Y(make_diagram(rm, cm));
    auto fi = X.index.find(f), gi = X.index.find(g);
    if (fi == X.index.end() || gi == X.index.end()) throw InputError("fixed point not on the diagram");
    return build_identity(X, Y, fi->second, gi->second, opt);
}

std::vector<IdentityRecord> mirror_identities(const BraneDiagram &D, const MirrorOptions &opt, bool include_diagonal) {
    auto [rm, cm] = mirror_charges(D.r, D.c);
    Side X(D), Y(make_diagram(rm, cm));
    std::vector<IdentityRecord> out;
    const int N = static_cast<int>(X.fps.size());
    for (int f = 0; f < N; ++f)
        for (int g = 0; g < N; ++g)
            if (include_diagonal || f != g) out.push_back(build_identity(X, Y, f, g, opt));
    return out;
}

std::vector<FayMatch> fay_normal_form(const IdentityRecord &rec) {
    std::vector<FayMatch> out;
    const auto &T = rec.expanded.terms;
    if (T.size() != 3) return out;
    using Multi = std::vector<Monomial>;
    std::vector<Multi> facs(3);
    for (int i = 0; i < 3; ++i) {
        if (!T[i].pre.is_one()) return out;
        for (auto &f : T[i].factors) {
            if (f.power < 0 || f.atom.kind != AtomKind::Theta) return out;
            for (int p = 0; p < f.power; ++p) facs[i].push_back(f.atom.mono);
        }
        if (facs[i].size() != 4) return out;
    }
    // orientation-free comparison: theta(w) and theta(1/w) agree up to sign
    auto oriented = [](const Monomial &w) { return w.is_oriented() ? w : w.inverse(); };
    auto sign_of = [](const Monomial &w) { return w.is_oriented() ? 1 : -1; };
    auto match_term = [&](const Multi &want, const Multi &have, int &sgn) {
        Multi a, b;
        sgn = 1;
        for (auto &w : want) {
            a.push_back(oriented(w));
            sgn *= sign_of(w);
        }
        for (auto &w : have) b.push_back(oriented(w));
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        return a == b;
    };
    std::set<std::pair<std::vector<Monomial>, std::vector<Monomial>>> seen;
    std::array<int, 3> perm{0, 1, 2};
    do {
        // Fay terms: T1 = {x3, y3, x1 y2, x2/y1}, T2 = {x1, y1, x2 y3, x3/y2}, T3 = {x2, y2, x3 y1, x1/y3}
        const Multi &A2 = facs[perm[1]], &A3 = facs[perm[2]];
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                if (i == j) continue;
                for (int si = 0; si < 4; ++si) {
                    Monomial x1 = si & 1 ? A2[i].inverse() : A2[i];
                    Monomial y1 = si & 2 ? A2[j].inverse() : A2[j];
                    for (int k = 0; k < 4; ++k)
                        for (int l = 0; l < 4; ++l) {
                            if (k == l) continue;
                            for (int sk = 0; sk < 4; ++sk) {
                                Monomial x2 = sk & 1 ? A3[k].inverse() : A3[k];
                                Monomial y2 = sk & 2 ? A3[l].inverse() : A3[l];
                                Monomial x3 = (x1 * x2).inverse(), y3 = (y1 * y2).inverse();
                                Multi F1{x3, y3, x1 * y2, x2 / y1}, F2{x1, y1, x2 * y3, x3 / y2},
                                    F3{x2, y2, x3 * y1, x1 / y3};
                                int s1, s2, s3;
                                if (!match_term(F1, facs[perm[0]], s1) || !match_term(F2, facs[perm[1]], s2) ||
                                    !match_term(F3, facs[perm[2]], s3))
                                    continue;
                                // the record's coefficients must be a common multiple of the Fay signs
                                mpq_class c1 = T[perm[0]].coeff * s1, c2 = T[perm[1]].coeff * s2,
                                          c3 = T[perm[2]].coeff * s3;
                                if (c1 != c2 || c2 != c3) continue;
                                std::vector<Monomial> xs{x1, x2, x3}, ys{y1, y2, y3};
                                if (seen.insert({xs, ys}).second) out.push_back(FayMatch{xs, ys});
                            }
                        }
                }
            }
    } while (std::next_permutation(perm.begin(), perm.end()));
    // list first the matches that separate the two alphabets: x in the a's, y in z and hbar
    auto count_a = [](const std::vector<Monomial> &ws, bool want) {
        for (auto &w : ws)
            for (auto &[v, d] : w.terms())
                if ((v.kind == VarKind::A) != want) return false;
        return true;
    };
    std::stable_partition(out.begin(), out.end(),
                          [&](const FayMatch &m) { return count_a(m.x, true) && count_a(m.y, false); });
    return out;
}

bool reducible(const FlavorClass &expanded, int max_size, std::uint64_t seed) {
    const int T = static_cast<int>(expanded.terms.size());
    if (T < 2) return false;
    std::mt19937_64 rng(seed);
    auto vars = variables(expanded);
    const int P = 3;
    std::vector<std::vector<cplx>> val(T, std::vector<cplx>(P));
    std::vector<double> scale(P, 0.0);
    for (int p = 0; p < P; ++p) {
        EvalPoint pt = random_point(vars, rng, {0.1, 0.05});
        for (int t = 0; t < T; ++t) {
            val[t][p] = evaluate_term(expanded.terms[t], pt);
            scale[p] = std::max(scale[p], std::abs(val[t][p]));
        }
    }
    std::vector<int> idx;
    std::function<bool(int, int)> rec = [&](int start, int left) -> bool {
        if (left == 0) {
            for (int p = 0; p < P; ++p) {
                cplx s = 0;
                for (int i : idx) s += val[i][p];
                if (std::abs(s) > 1e-9 * scale[p]) return false;
            }
            return true;
        }
        for (int i = start; i < T; ++i) {
            idx.push_back(i);
            bool hit = rec(i + 1, left - 1);
            idx.pop_back();
            if (hit) return true;
        }
        return false;
    };
    for (int k = 1; k <= std::min(max_size, T - 1); ++k)
        if (rec(0, k)) return true;
    return false;
}

// ---------------- limits ----------------

double ek_residual(const StabResult &e, const StabResult &k, double q, int points, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Var> vars;
    for (auto &v : variables(k.cls))
        if (v.kind != VarKind::Z) vars.push_back(v);
    for (auto &v : variables(e.cls))
        if (v.kind != VarKind::Z && std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    const double lq = std::log(q);
    double worst = 0;
    int done = 0, guard = 0;
    while (done < points) {
        if (++guard > 50 * points + 100) throw std::runtime_error("could not find regular sample points");
        EvalPoint pt = random_point(vars, rng, q);
        double lz = 0;
        pt.set_log(zvar(1), 0.0);
        for (int i = 1; i < e.D.m(); ++i) {
            lz -= k.slopes.s.at(i - 1).get_d() * lq; // z_{i+1}/z_i = q^{-s_i}
            pt.set_log(zvar(i + 1), lz);
        }
        try {
            cplx ve = evaluate(e.cls, pt);
            EvalPoint pk = pt;
            pk.q = 0;
            cplx vk = evaluate(k.cls, pk);
            worst = std::max(worst, std::abs(ve - vk) / std::max(std::abs(vk), 1e-300));
            ++done;
        } catch (const ResampleRequired &) {
        }
    }
    return worst;
}

LimitReport limit_suite(const BraneDiagram &D, const SlopeConfig &slopes, const LimitOptions &opt) {
    LimitReport rep;
    rep.q = opt.q;
    std::vector<Chamber> chambers{Chamber::identity(D.n())};
    if (opt.all_chambers) {
        chambers.clear();
        Chamber c = Chamber::identity(D.n());
        do chambers.push_back(c);
        while (std::next_permutation(c.sigma.begin(), c.sigma.end()));
    }
    for (auto &f : enumerate_fixed_points(D.r, D.c))
        for (auto &ch : chambers) {
            LimitRow row;
            row.f = f;
            row.sigma = ch;
            StabResult we = w_function(D, f, ch, Flavor::E, slopes);
            StabResult wk = w_function(D, f, ch, Flavor::K, slopes);
            StabResult wh = w_function(D, f, ch, Flavor::H, slopes);
            for (double q : opt.q) row.ek_residual.push_back(ek_residual(we, wk, q, opt.points, opt.seed));
            for (std::size_t i = 1; i < row.ek_residual.size(); ++i)
                if (!(row.ek_residual[i] < row.ek_residual[i - 1])) row.monotone = false;
            row.kh_mismatches = compare_exact(k_to_h(wk.cls), wh.cls, opt.points, opt.seed);
            rep.all_monotone = rep.all_monotone && row.monotone;
            rep.worst_final = std::max(rep.worst_final, row.ek_residual.empty() ? 0.0 : row.ek_residual.back());
            rep.kh_mismatches += row.kh_mismatches;
            rep.rows.push_back(std::move(row));
        }
    return rep;
}

// ---------------- sweep ----------------

long wtilde_term_bound(const BraneDiagram &D) {
    long total = 1;
    for (int k = -1; k >= -D.m(); --k)
        for (int i = 2; i <= D.d(k); ++i) {
            total *= i;
            if (total > 1000000000L) return total;
        }
    return total;
}

static void compositions(int total, int parts, int cap, std::vector<int> &cur, std::vector<std::vector<int>> &out) {
    if (parts == 0) {
        if (total == 0) out.push_back(cur);
        return;
    }
    for (int x = 1; x <= std::min(cap, total - (parts - 1)); ++x) {
        cur.push_back(x);
        compositions(total - x, parts - 1, cap, cur, out);
        cur.pop_back();
    }
}

SweepReport sweep(const SweepOptions &opt) {
    SweepReport rep;
    std::map<std::pair<int, int>, SweepPoint> seen;
    for (int m = 1; m <= opt.max_m; ++m)
        for (int n = 1; n <= opt.max_n; ++n)
            for (int d0 = 1; d0 <= opt.max_boxes; ++d0) {
                std::vector<std::vector<int>> rs, cs;
                std::vector<int> cur;
                compositions(d0, m, n, cur, rs);
                compositions(d0, n, m, cur, cs);
                for (auto &r : rs)
                    for (auto &c : cs) {
                        BraneDiagram D = make_diagram(r, c);
                        auto fps = enumerate_fixed_points(r, c);
                        if (fps.size() < 2) continue;
                        auto [rm, cm] = mirror_charges(r, c);
                        // a brane tied to every brane of the other kind has an uncharged mirror partner
                        if (std::count(rm.begin(), rm.end(), 0) || std::count(cm.begin(), cm.end(), 0)) {
                            ++rep.skipped;
                            continue;
                        }
                        BraneDiagram M = make_diagram(rm, cm);
                        if (static_cast<int>(fps.size()) > opt.max_fixed_points ||
                            wtilde_term_bound(D) > opt.max_wtilde_terms ||
                            wtilde_term_bound(M) > opt.max_wtilde_terms) {
                            ++rep.skipped;
                            continue;
                        }
                        ++rep.varieties;
                        std::vector<IdentityRecord> recs;
                        try {
                            recs = mirror_identities(D, opt.mirror);
                        } catch (const std::exception &e) {
                            ++rep.failed;
                            rep.failures.push_back(D.text() + ": " + e.what());
                            continue;
                        }
                        for (auto &rec : recs) {
                            ++rep.pairs;
                            if (rec.trivial) {
                                ++rep.trivial;
                                continue;
                            }
                            if (!rec.cert.certified) {
                                ++rep.failed;
                                rep.failures.push_back(D.text() + " " + to_string(rec.f) + " " + to_string(rec.g) +
                                                       ": residual " + std::to_string(rec.cert.max_residual));
                                continue;
                            }
                            ++rep.certified;
                            if (rec.term_count() == 0) continue;
                            if (reducible(rec.expanded, 4, opt.mirror.seed)) {
                                ++rep.reducible;
                                continue;
                            }
                            auto key = std::make_pair(rec.term_count(), rec.factors_per_term());
                            if (!seen.count(key))
                                seen[key] = SweepPoint{key.first, key.second, r, c, rec.f, rec.g};
                        }
                    }
            }
    for (auto &[k, p] : seen) rep.points.push_back(p);
    return rep;
}

// ---------------- export ----------------

namespace {

std::string shorthand(const Monomial &w, bool latex) {
    std::vector<std::pair<int, int>> as, zs;
    int h = 0;
    for (auto &[v, d] : w.terms()) {
        if (v.kind == VarKind::A) as.push_back({v.i, d});
        else if (v.kind == VarKind::Z) zs.push_back({v.i, d});
        else if (v.kind == VarKind::Hbar) h = d;
    }
    std::string out;
    auto block = [&](const std::vector<std::pair<int, int>> &xs, const char *name) {
        if (xs.size() == 2 && xs[0].second == -xs[1].second && std::abs(xs[0].second) == 2) {
            int num = xs[0].second > 0 ? xs[0].first : xs[1].first;
            int den = xs[0].second > 0 ? xs[1].first : xs[0].first;
            out += std::string(name) + "_{" + std::to_string(num) + std::to_string(den) + "}";
            return;
        }
        for (auto &[i, d] : xs) {
            out += std::string(name) + "_" + std::to_string(i);
            if (d != 2) out += "^{" + (d % 2 ? std::to_string(d) + "/2" : std::to_string(d / 2)) + "}";
        }
    };
    block(as, "a");
    block(zs, "z");
    if (h != 0) {
        out += latex ? "\\hbar" : "hbar";
        if (h != 2) out += "^{" + (h % 2 ? std::to_string(h) + "/2" : std::to_string(h / 2)) + "}";
    }
    return out.empty() ? "1" : out;
}

std::string render(const IdentityRecord &rec, bool latex) {
    if (rec.trivial || rec.expanded.terms.empty()) return "0 = 0";
    std::ostringstream os;
    for (std::size_t i = 0; i < rec.expanded.terms.size(); ++i) {
        auto &t = rec.expanded.terms[i];
        mpq_class a = abs(t.coeff);
        os << (t.coeff < 0 ? (i ? " - " : "-") : (i ? " + " : ""));
        if (a != 1) os << a.get_str() << (latex ? "\\," : "*");
        for (auto &f : t.factors) {
            os << "(" << shorthand(f.atom.mono, latex) << ")";
            if (f.power != 1) os << "^" << (latex ? "{" + std::to_string(f.power) + "}" : std::to_string(f.power));
        }
    }
    os << " = 0";
    return os.str();
}

} // namespace

std::string to_latex(const IdentityRecord &rec) { return render(rec, true); }
std::string to_text(const IdentityRecord &rec) { return render(rec, false); }

} // namespace bowcalc
