#include "support.hpp"

#include <doctest.h>

using namespace testing;

static FlavorClass rename_t(const FlavorClass &c, std::map<Var, Var> m) { return rename(c, m); }

TEST_CASE("kernel for one variable on each side") {
    // d' = d'' = (d_0, d_-1) = (1, 1)
    auto K = kernel({1, 1}, {1, 1}, Flavor::E);
    auto named = rename_t(K, {{tvar(-1, 1, 1), tvar(-1, 1)},
                              {tvar(-1, 1, 2), tvar(-1, 2)},
                              {tvar(0, 1, 1), tvar(0, 1)},
                              {tvar(0, 1, 2), tvar(0, 2)}});
    std::mt19937_64 rng(5);
    for (int i = 0; i < 10; ++i) {
        auto vals = random_values({tvar(-1, 1), tvar(-1, 2), tvar(0, 1), tvar(0, 2), hbar()}, rng);
        cplx q(0.1, 0.05);
        auto th = [&](const Monomial &w) {
            // whole-power monomials only; evaluate through one square root of the product of values
            return theta_eval(monomial_log(w, to_point(vals, q)), q);
        };
        cplx expect = th(t(-1, 2) / t(-1, 1) * h()) * th(t(-1, 1) / t(0, 2) * h()) * th(t(0, 1) / t(-1, 2)) /
                      th(t(-1, 1) / t(-1, 2));
        CHECK(rel(evaluate(named, to_point(vals, q)), expect) < 1e-12);
    }
    auto trivial = kernel({0}, {0}, Flavor::E);
    REQUIRE(trivial.terms.size() == 1);
    CHECK(trivial.terms[0].factors.empty());
}

TEST_CASE("cohomological kernel is the additive version") {
    auto K = kernel({1, 1}, {1, 1}, Flavor::H);
    auto named = rename_t(K, {{tvar(-1, 1, 1), tvar(-1, 1)},
                              {tvar(-1, 1, 2), tvar(-1, 2)},
                              {tvar(0, 1, 1), tvar(0, 1)},
                              {tvar(0, 1, 2), tvar(0, 2)}});
    std::map<Var, mpq_class> v{{tvar(-1, 1), 3}, {tvar(-1, 2), mpq_class(1, 2)}, {tvar(0, 1), -7}, {tvar(0, 2), 11},
                               {hbar(), mpq_class(2, 3)}};
    mpq_class h = v[hbar()], t1 = v[tvar(-1, 1)], t2 = v[tvar(-1, 2)], s1 = v[tvar(0, 1)], s2 = v[tvar(0, 2)];
    CHECK(evaluate_exact(named, v) == (t2 - t1 + h) * (t1 - s2 + h) * (s1 - t2) / (t1 - t2));
}

TEST_CASE("two-term shuffle product of one-tie functions") {
    auto f1 = one_tie(2, 1, Flavor::E), f2 = one_tie(2, 2, Flavor::E);
    auto prod = star(f1, f2);
    CHECK(prod.d == std::vector<int>{2, 2});
    CHECK(prod.cls.terms.size() == 2);
    Monomial z21 = z(2) / z(1);
    auto term = [&](int i, int j) {
        // f'(t_{-1,i}, t_{0,1}) Z[f''(t_{-1,j}, t_{0,2})] times the kernel
        return product(Flavor::E, {{t(-1, i) / t(0, 1) * z21, 1},
                                   {h(), 1},
                                   {z21 * h(-1), -1},
                                   {t(-1, j) / t(0, 2) * z21 * h(-1), 1},
                                   {h(), 1},
                                   {z21 * h(-2), -1},
                                   {t(-1, j) / t(-1, i) * h(), 1},
                                   {t(-1, i) / t(0, 2) * h(), 1},
                                   {t(0, 1) / t(-1, j), 1},
                                   {t(-1, i) / t(-1, j), -1}});
    };
    auto expect = term(1, 2) + term(2, 1);
    auto cmp = compare_numeric(prod.cls, expect, 10, 3, {0.1, 0.05});
    CHECK(cmp.max_residual < 1e-11);
}

TEST_CASE("unit") {
    auto f = one_tie(3, 1, Flavor::E);
    auto left = star(unit(Flavor::E), f);
    CHECK(compare_numeric(left.cls, f.cls, 5, 1, {0.1, 0.05}).max_residual < 1e-13);
    auto right = star(f, unit(Flavor::E));
    CHECK(compare_numeric(right.cls, f.cls, 5, 1, {0.1, 0.05}).max_residual < 1e-13);
}

TEST_CASE("shuffle product is associative") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<GradedFunction> fs;
        for (int i = 0; i < 3; ++i) fs.push_back(one_tie(1 + rng() % 3, 1 + rng() % 3, Flavor::E));
        auto lhs = star(star(fs[0], fs[1]), fs[2]);
        auto rhs = star(fs[0], star(fs[1], fs[2]));
        CHECK(lhs.d == rhs.d);
        CHECK(compare_numeric(lhs.cls, rhs.cls, 10, trial + 1, {0.1, 0.05}).max_residual < 1e-9);
    }
}

TEST_CASE("shuffle products have the expected number of terms") {
    // each level j contributes binomial(d_j, d'_j) shuffles
    auto a1 = one_tie(3, 1, Flavor::H), a2 = one_tie(2, 1, Flavor::H);
    auto p = star(a1, a2);
    CHECK(p.cls.terms.size() == static_cast<std::size_t>(binomial(2, 1) * binomial(1, 1)));
    CHECK(binomial(5, 2) == 10);
    CHECK(binomial(3, 4) == 0);
}

static std::vector<GradedFunction> sample_wtildes() {
    std::vector<GradedFunction> out;
    for (auto D : {tpn_diagram(3), tpn_diagram(4), make_diagram({1, 1, 2, 1}, {2, 2, 1}), make_diagram({0, 1, 0, 1}, {2})})
        for (auto &f : enumerate_fixed_points(D.r, D.c))
            for (Flavor fl : {Flavor::E, Flavor::H}) out.push_back(wtilde(f, Chamber::identity(D.n()), fl));
    return out;
}

TEST_CASE("W-tilde is symmetric in each level below zero") {
    std::mt19937_64 rng(8);
    for (auto &w : sample_wtildes()) {
        auto vars = variables(w.cls);
        for (int attempt = 0; attempt < 2; ++attempt) {
            auto vals = random_values(vars, rng);
            auto perm = vals;
            for (int j = 1; j <= w.depth(); ++j) {
                std::vector<int> idx(w.d[j]);
                std::iota(idx.begin(), idx.end(), 1);
                std::shuffle(idx.begin(), idx.end(), rng);
                for (int i = 1; i <= w.d[j]; ++i)
                    if (vals.count(tvar(-j, i))) perm[tvar(-j, i)] = vals[tvar(-j, idx[i - 1])];
            }
            cplx q = w.cls.flavor == Flavor::E ? cplx(0.1, 0.05) : cplx(0);
            CHECK(rel(evaluate(w.cls, to_point(vals, q)), evaluate(w.cls, to_point(perm, q))) < 1e-10);
        }
    }
}

TEST_CASE("wheel conditions") {
    auto single = one_tie(3, 1, Flavor::E);
    CHECK(wheel_check(single, 2, 1).vacuous);

    auto D = make_diagram({0, 1, 0, 1}, {2});
    auto f = enumerate_fixed_points(D.r, D.c).at(0);
    for (Flavor fl : {Flavor::E, Flavor::K, Flavor::H}) {
        auto w = wtilde(f, Chamber::identity(1), fl, SlopeConfig::parse("2/7,3/11,5/13"));
        REQUIRE(w.d.at(1) == 2);
        auto rep = wheel_check(w, 3, 11);
        CHECK(!rep.vacuous);
        CHECK(rep.conditions > 0);
        CHECK(rep.max_residual < 1e-9);
    }
    auto X = make_diagram({1, 1, 2, 1}, {2, 2, 1});
    for (auto &g : enumerate_fixed_points(X.r, X.c)) CHECK(wheel_check(wtilde(g, Chamber::identity(3), Flavor::E), 1, 2).max_residual < 1e-9);

    // a function off the wheel subspace
    GradedFunction bad{product(Flavor::E, {{t(-1, 1) / t(-2, 1), 1}, {t(-1, 2) / t(-2, 1), 1}}), {1, 2, 1}};
    auto rep = wheel_check(bad, 3, 11);
    CHECK(!rep.vacuous);
    CHECK(rep.max_residual > 1e-3);
}
