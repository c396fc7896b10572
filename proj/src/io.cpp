#include "bowcalc/io.hpp"

namespace bowcalc {

std::string var_key(const Var &v) {
    switch (v.kind) {
    case VarKind::T:
        return "t:" + std::to_string(v.k) + ":" + std::to_string(v.i) + ":" + std::to_string(v.tag);
    case VarKind::A: return "a:" + std::to_string(v.i);
    case VarKind::Z: return "z:" + std::to_string(v.i);
    case VarKind::Hbar: return "h";
    }
    return "h";
}

Var var_from_key(const std::string &s) {
    if (s == "h") return hbar();
    std::vector<int> parts;
    std::size_t pos = 2;
    if (s.size() < 3 || s[1] != ':') throw std::invalid_argument("bad variable key '" + s + "'");
    while (pos <= s.size()) {
        std::size_t next = s.find(':', pos);
        if (next == std::string::npos) next = s.size();
        parts.push_back(std::stoi(s.substr(pos, next - pos)));
        pos = next + 1;
    }
    if (s[0] == 'a' && parts.size() == 1) return avar(parts[0]);
    if (s[0] == 'z' && parts.size() == 1) return zvar(parts[0]);
    if (s[0] == 't' && parts.size() == 3) return tvar(parts[0], parts[1], parts[2]);
    throw std::invalid_argument("bad variable key '" + s + "'");
}

json to_json(const Monomial &m) {
    json j = json::array();
    for (auto &[v, d] : m.terms()) j.push_back({var_key(v), d});
    return j;
}

json to_json(const LinearForm &l) {
    json j = json::array();
    for (auto &[v, c] : l.terms()) j.push_back({var_key(v), c.get_str()});
    return j;
}

Monomial monomial_from_json(const json &j) {
    Monomial m;
    for (auto &e : j) m *= Monomial::of_doubled(var_from_key(e.at(0).get<std::string>()), e.at(1).get<int>());
    return m;
}

LinearForm linear_from_json(const json &j) {
    LinearForm l;
    for (auto &e : j) l = l + LinearForm::of(var_from_key(e.at(0).get<std::string>()), mpq_class(e.at(1).get<std::string>()));
    return l;
}

static const char *kind_name(AtomKind k) {
    switch (k) {
    case AtomKind::Theta: return "theta";
    case AtomKind::Ahat: return "ahat";
    case AtomKind::Linear: return "linear";
    }
    return "theta";
}

json to_json(const FlavorClass &c) {
    json terms = json::array();
    for (auto &t : c.terms) {
        json fs = json::array();
        for (auto &f : t.factors) {
            json a{{"kind", kind_name(f.atom.kind)}, {"power", f.power}};
            if (f.atom.kind == AtomKind::Linear) a["arg"] = to_json(f.atom.lin);
            else a["arg"] = to_json(f.atom.mono);
            fs.push_back(a);
        }
        terms.push_back({{"coeff", t.coeff.get_str()}, {"pre", to_json(t.pre)}, {"factors", fs}});
    }
    return {{"flavor", to_string(c.flavor)}, {"terms", terms}};
}

FlavorClass class_from_json(const json &j) {
    FlavorClass c{flavor_from_string(j.at("flavor").get<std::string>()), {}};
    for (auto &jt : j.at("terms")) {
        Term t;
        t.coeff = mpq_class(jt.at("coeff").get<std::string>());
        t.coeff.canonicalize();
        t.pre = monomial_from_json(jt.at("pre"));
        for (auto &jf : jt.at("factors")) {
            Factor f;
            const std::string kind = jf.at("kind").get<std::string>();
            if (kind == "linear") {
                f.atom.kind = AtomKind::Linear;
                f.atom.lin = linear_from_json(jf.at("arg"));
            } else if (kind == "theta" || kind == "ahat") {
                f.atom.kind = kind == "theta" ? AtomKind::Theta : AtomKind::Ahat;
                f.atom.mono = monomial_from_json(jf.at("arg"));
            } else {
                throw std::invalid_argument("unknown atom kind '" + kind + "'");
            }
            f.power = jf.at("power").get<int>();
            t.factors.push_back(std::move(f));
        }
        c.terms.push_back(std::move(t));
    }
    return c;
}

json to_json(const FixedPoint &f) { return f.T; }

FixedPoint fixed_point_from_json(const json &j) {
    return fixed_point_from_rows(j.get<std::vector<std::vector<int>>>());
}

json to_json(const StabResult &w) {
    return {{"r", w.D.r},
            {"c", w.D.c},
            {"f", to_json(w.f)},
            {"sigma", w.sigma.sigma},
            {"flavor", to_string(w.flavor)},
            {"slopes", w.slopes.text()},
            {"epsilon", to_json(w.epsilon)},
            {"tau", to_json(w.tau)},
            {"eu", to_json(w.eu)},
            {"wtilde_restricted", to_json(w.wtilde_restricted)},
            {"W", to_json(w.cls)}};
}

StabResult stab_from_json(const json &j) {
    StabResult w;
    w.D = make_diagram(j.at("r").get<std::vector<int>>(), j.at("c").get<std::vector<int>>());
    w.f = fixed_point_from_json(j.at("f"));
    w.sigma.sigma = j.at("sigma").get<std::vector<int>>();
    w.flavor = flavor_from_string(j.at("flavor").get<std::string>());
    const std::string sl = j.at("slopes").get<std::string>();
    if (!sl.empty()) w.slopes = SlopeConfig::parse(sl);
    w.epsilon = class_from_json(j.at("epsilon"));
    w.tau = class_from_json(j.at("tau"));
    w.eu = class_from_json(j.at("eu"));
    w.wtilde_restricted = class_from_json(j.at("wtilde_restricted"));
    w.cls = class_from_json(j.at("W"));
    return w;
}

static json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const IdentityRecord &r) {
    json qs = json::array();
    for (auto q : r.cert.q) qs.push_back(cplx_json(q));
    return {{"r", r.r},
            {"c", r.c},
            {"f", to_json(r.f)},
            {"g", to_json(r.g)},
            {"sign", r.sign},
            {"trivial", r.trivial},
            {"hbar_inverted", r.hbar_inverted},
            {"lhs", to_json(r.lhs)},
            {"rhs", to_json(r.rhs)},
            {"expanded", to_json(r.expanded)},
            {"terms", r.term_count()},
            {"factors", r.factors_per_term()},
            {"certificate",
             {{"points", r.cert.points}, {"max_residual", r.cert.max_residual}, {"q", qs}, {"certified", r.cert.certified}}}};
}

IdentityRecord identity_from_json(const json &j) {
    IdentityRecord r;
    r.r = j.at("r").get<std::vector<int>>();
    r.c = j.at("c").get<std::vector<int>>();
    r.f = fixed_point_from_json(j.at("f"));
    r.g = fixed_point_from_json(j.at("g"));
    r.sign = j.at("sign").get<int>();
    r.trivial = j.at("trivial").get<bool>();
    r.hbar_inverted = j.at("hbar_inverted").get<bool>();
    r.lhs = class_from_json(j.at("lhs"));
    r.rhs = class_from_json(j.at("rhs"));
    r.expanded = class_from_json(j.at("expanded"));
    const json &c = j.at("certificate");
    r.cert.points = c.at("points").get<int>();
    r.cert.max_residual = c.at("max_residual").get<double>();
    r.cert.certified = c.at("certified").get<bool>();
    for (auto &q : c.at("q")) r.cert.q.push_back({q.at(0).get<double>(), q.at(1).get<double>()});
    return r;
}

json to_json(const AxiomReport &r) {
    json pts = json::array();
    for (auto &p : r.points) pts.push_back(to_json(p));
    json edges = json::array();
    for (auto &[a, b] : r.hasse()) edges.push_back({a, b});
    json nz = json::array();
    for (auto &row : r.nonzero) {
        json jr = json::array();
        for (bool b : row) jr.push_back(b ? 1 : 0);
        nz.push_back(jr);
    }
    return {{"size", r.size},         {"points", pts},
            {"nonzero", nz},          {"hasse", edges},
            {"diagonal_residual", r.diagonal_residual},
            {"antisymmetric", r.antisymmetric},
            {"acyclic", r.acyclic},   {"failures", r.failures}};
}

json to_json(const LimitReport &r) {
    json rows = json::array();
    for (auto &row : r.rows)
        rows.push_back({{"f", to_json(row.f)},
                        {"sigma", row.sigma.sigma},
                        {"ek_residual", row.ek_residual},
                        {"monotone", row.monotone},
                        {"kh_mismatches", row.kh_mismatches}});
    return {{"q", r.q},
            {"rows", rows},
            {"worst_final", r.worst_final},
            {"all_monotone", r.all_monotone},
            {"kh_mismatches", r.kh_mismatches}};
}

json to_json(const SweepReport &r) {
    json pts = json::array();
    for (auto &p : r.points)
        pts.push_back({{"terms", p.terms}, {"factors", p.factors}, {"r", p.r}, {"c", p.c},
                       {"f", to_json(p.f)}, {"g", to_json(p.g)}});
    return {{"points", pts},          {"varieties", r.varieties}, {"skipped", r.skipped},
            {"pairs", r.pairs},       {"certified", r.certified}, {"trivial", r.trivial},
            {"failed", r.failed},     {"reducible", r.reducible}, {"failures", r.failures}};
}

json to_json(const WheelReport &r) {
    return {{"vacuous", r.vacuous}, {"conditions", r.conditions}, {"trials", r.trials}, {"max_residual", r.max_residual}};
}

} // namespace bowcalc
