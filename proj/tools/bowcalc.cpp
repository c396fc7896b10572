// bowcalc: stable envelopes and mirror identities on type-A bow varieties
#include "bowcalc/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace bowcalc;

namespace {

constexpr int kExitFail = 2;
constexpr int kExitInput = 3;

struct RunConfig {
    std::string flavor = "E";
    std::string chamber;
    std::string slopes;
    std::string q;
    int points = 0;
    double tol = 1e-8;
    std::uint64_t seed = 0;
    std::string format = "text";
    std::string out;
};

struct DiagramArgs {
    std::string text;
    std::string r, c;
};

std::vector<int> int_list(const std::string &s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception &) {
            throw InputError("bad integer list '" + s + "'");
        }
    }
    return out;
}

BraneDiagram diagram(const DiagramArgs &a) {
    if (!a.text.empty()) {
        if (!a.r.empty() || !a.c.empty()) throw InputError("give either a diagram string or --r/--c, not both");
        return parse_brane_diagram(a.text);
    }
    if (a.r.empty() || a.c.empty()) throw InputError("a diagram string or both --r and --c are required");
    return make_diagram(int_list(a.r), int_list(a.c));
}

// "0.1", "0.1+0.1i", "-0.2i"
cplx parse_complex(std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), ::isspace), s.end());
    if (s.empty()) throw InputError("empty q value");
    double re = 0, im = 0;
    if (s.back() == 'i') {
        std::string body = s.substr(0, s.size() - 1);
        std::size_t split = std::string::npos;
        for (std::size_t i = 1; i < body.size(); ++i)
            if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') split = i;
        try {
            if (split == std::string::npos) {
                im = body.empty() || body == "+" ? 1.0 : body == "-" ? -1.0 : std::stod(body);
            } else {
                re = std::stod(body.substr(0, split));
                std::string ip = body.substr(split);
                im = ip == "+" ? 1.0 : ip == "-" ? -1.0 : std::stod(ip);
            }
        } catch (const std::exception &) {
            throw InputError("bad q value '" + s + "'");
        }
    } else {
        try {
            std::size_t used = 0;
            re = std::stod(s, &used);
            if (used != s.size()) throw InputError("bad q value '" + s + "'");
        } catch (const std::invalid_argument &) {
            throw InputError("bad q value '" + s + "'");
        }
    }
    cplx q{re, im};
    if (std::abs(q) >= 1) throw InputError("|q| must be < 1");
    return q;
}

std::vector<cplx> q_list(const RunConfig &cfg, std::vector<cplx> fallback) {
    if (cfg.q.empty()) return fallback;
    std::vector<cplx> out;
    std::stringstream ss(cfg.q);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_complex(item));
    if (out.empty()) throw InputError("empty --q list");
    return out;
}

Chamber chamber(const RunConfig &cfg, int n) {
    return cfg.chamber.empty() ? Chamber::identity(n) : parse_chamber(cfg.chamber, n);
}

SlopeConfig slopes(const RunConfig &cfg, int m) {
    if (cfg.slopes.empty()) return SlopeConfig::default_for(m, cfg.seed);
    SlopeConfig s = SlopeConfig::parse(cfg.slopes);
    if (static_cast<int>(s.s.size()) != m - 1)
        throw InputError("expected " + std::to_string(m - 1) + " slopes, got " + std::to_string(s.s.size()));
    return s;
}

std::uint64_t seed_or(const RunConfig &cfg, std::uint64_t dflt) { return cfg.seed ? cfg.seed : dflt; }
int points_or(const RunConfig &cfg, int dflt) { return cfg.points > 0 ? cfg.points : dflt; }

// 1-based id in the deterministic enumeration
FixedPoint fixed_point(const BraneDiagram &D, int id) {
    auto fps = enumerate_fixed_points(D.r, D.c);
    if (id < 1 || id > static_cast<int>(fps.size()))
        throw InputError("fixed point id " + std::to_string(id) + " outside 1.." + std::to_string(fps.size()));
    return fps[id - 1];
}

int id_of(const std::vector<FixedPoint> &fps, const FixedPoint &f) {
    auto it = std::find(fps.begin(), fps.end(), f);
    return it == fps.end() ? 0 : static_cast<int>(it - fps.begin()) + 1;
}

std::string latex_class(const FlavorClass &c) {
    std::string s = to_string(c), out;
    for (std::size_t i = 0; i < s.size();) {
        if (s.compare(i, 6, "theta(") == 0) {
            out += "\\vartheta(";
            i += 6;
        } else if (s.compare(i, 5, "ahat(") == 0) {
            out += "\\hat{a}(";
            i += 5;
        } else if (s.compare(i, 4, "hbar") == 0) {
            out += "\\hbar";
            i += 4;
        } else if (s[i] == '*') {
            out += "\\,";
            ++i;
        } else {
            out += s[i++];
        }
    }
    return out;
}

std::string class_text(const FlavorClass &c, const std::string &fmt) {
    return fmt == "latex" ? latex_class(c) : to_string(c);
}

void emit(const RunConfig &cfg, const std::string &text) {
    if (cfg.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream os(cfg.out);
    if (!os) throw InputError("cannot write " + cfg.out);
    os << text;
    if (!text.empty() && text.back() != '\n') os << '\n';
}

std::string matrix_text(const FixedPoint &f) {
    std::string s;
    for (std::size_t i = 0; i < f.T.size(); ++i) {
        s += i ? ";" : "";
        for (int x : f.T[i]) s += std::to_string(x);
    }
    return s;
}

std::string join(const std::vector<int> &v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

// ---------------- commands ----------------

int cmd_parse(const DiagramArgs &da, const RunConfig &cfg) {
    BraneDiagram D = diagram(da);
    if (cfg.format == "json") {
        emit(cfg, json{{"diagram", D.text()}, {"r", D.r}, {"c", D.c}, {"d_neg", D.dneg}, {"d_pos", D.dpos},
                       {"dimension", D.dimension()}}
                      .dump(2));
        return 0;
    }
    std::ostringstream os;
    os << "diagram " << D.text() << "\nr = (" << join(D.r) << ")\nc = (" << join(D.c) << ")\n"
       << "d_-m..d_0 = (";
    for (int i = D.m(); i >= 0; --i) os << D.dneg[i] << (i ? "," : "");
    os << ")\nd_0..d_n = (" << join(D.dpos) << ")\ndimension " << D.dimension() << "\n";
    emit(cfg, os.str());
    return 0;
}

int cmd_fixed_points(const DiagramArgs &da, const RunConfig &cfg) {
    BraneDiagram D = diagram(da);
    auto fps = enumerate_fixed_points(D.r, D.c);
    if (fps.empty()) {
        std::cerr << "no tie diagram exists for these charges (the variety is empty)\n";
        return kExitInput;
    }
    auto [rm, cm] = mirror_charges(D.r, D.c);
    std::vector<FixedPoint> mfps;
    bool has_mirror = std::none_of(cm.begin(), cm.end(), [](int x) { return x <= 0; }) &&
                      std::none_of(rm.begin(), rm.end(), [](int x) { return x < 0; });
    if (has_mirror) mfps = enumerate_fixed_points(rm, cm);
    json rows = json::array();
    std::ostringstream os;
    os << fps.size() << " fixed points on " << D.text() << "\n";
    for (std::size_t i = 0; i < fps.size(); ++i) {
        int mid = has_mirror ? id_of(mfps, mirror(fps[i])) : 0;
        rows.push_back({{"id", i + 1},
                        {"bct", to_json(fps[i])},
                        {"row_sums", fps[i].row_sums()},
                        {"col_sums", fps[i].col_sums()},
                        {"crossings", crossings(fps[i])},
                        {"mirror_id", mid}});
        os << "f" << i + 1 << "  " << matrix_text(fps[i]) << "  crossings " << crossings(fps[i]);
        if (has_mirror) os << "  mirror f" << mid;
        os << "\n";
    }
    emit(cfg, cfg.format == "json" ? json{{"diagram", D.text()}, {"fixed_points", rows}}.dump(2) : os.str());
    return 0;
}

int cmd_stab(const DiagramArgs &da, int id, int restrict_at, const RunConfig &cfg) {
    BraneDiagram D = diagram(da);
    const Flavor fl = flavor_from_string(cfg.flavor);
    StabResult w = w_function(D, fixed_point(D, id), chamber(cfg, D.n()), fl, slopes(cfg, D.m()));
    if (restrict_at > 0) {
        RestrictionOptions ro;
        ro.seed = seed_or(cfg, ro.seed);
        Restriction r = restrict_class(w, fixed_point(D, restrict_at), ro);
        if (cfg.format == "json")
            emit(cfg, json{{"W", to_json(w)}, {"restricted_to", restrict_at}, {"value", to_json(r.value)}}.dump(2));
        else
            emit(cfg, class_text(r.value, cfg.format));
        return 0;
    }
    // on T*P^{n-1} with the identity chamber there is a closed form to compare against
    const int n = D.n();
    const bool projective = fl != Flavor::H && D.r == std::vector<int>{n - 1, 1} && D.c == std::vector<int>(n, 1) &&
                            w.sigma.sigma == Chamber::identity(n).sigma;
    json report;
    if (projective) {
        int k = 1;
        while (k < n && !(tpn_fixed_point(n, k) == w.f)) ++k;
        auto cmp = compare_numeric(w.cls, tpn_closed_form(n, k, fl, w.slopes), points_or(cfg, 20),
                                   seed_or(cfg, 5), cfg.q.empty() ? cplx(0.1, 0.05) : q_list(cfg, {}).front());
        report = {{"k", k}, {"points", cmp.points}, {"max_residual", cmp.max_residual},
                  {"match", cmp.max_residual < cfg.tol}};
    }
    if (cfg.format == "json") {
        json j = to_json(w);
        if (projective) j["closed_form"] = report;
        emit(cfg, j.dump(2));
    } else {
        std::string text = class_text(w.cls, cfg.format);
        if (projective) {
            std::ostringstream os;
            os << "\nclosed form for f_" << report["k"].get<int>() << ": "
               << (report["match"].get<bool>() ? "match" : "MISMATCH") << ", max residual "
               << report["max_residual"].get<double>() << " at " << report["points"].get<int>() << " points";
            text += os.str();
        }
        emit(cfg, text);
    }
    return projective && !report["match"].get<bool>() ? kExitFail : 0;
}

int cmd_verify(const DiagramArgs &da, const RunConfig &cfg) {
    BraneDiagram D = diagram(da);
    AxiomOptions ao;
    ao.points = points_or(cfg, ao.points);
    ao.seed = seed_or(cfg, ao.seed);
    ao.tol = cfg.tol;
    if (!cfg.q.empty()) ao.q = q_list(cfg, {}).front();
    AxiomReport rep = check_axioms(D, chamber(cfg, D.n()), flavor_from_string(cfg.flavor), ao);
    const bool ok = rep.pass(cfg.tol);
    if (cfg.format == "json") {
        json j = to_json(rep);
        j["pass"] = ok;
        emit(cfg, j.dump(2));
    } else {
        std::ostringstream os;
        os << D.text() << ": " << rep.size << " fixed points\n";
        double worst = 0;
        for (double r : rep.diagonal_residual) worst = std::max(worst, r);
        os << "diagonal: worst residual " << worst << "\n";
        os << "support: " << (rep.antisymmetric && rep.acyclic ? "partial order" : "NOT a partial order") << "\n";
        os << "hasse:";
        for (auto &[a, b] : rep.hasse()) os << " f" << a + 1 << "<f" << b + 1;
        os << "\n";
        for (auto &f : rep.failures) os << "failure: " << f << "\n";
        os << (ok ? "PASS" : "FAIL") << "\n";
        emit(cfg, os.str());
    }
    return ok ? 0 : kExitFail;
}

MirrorOptions mirror_options(const RunConfig &cfg) {
    MirrorOptions mo;
    mo.points = points_or(cfg, mo.points);
    mo.tol = cfg.tol;
    mo.seed = seed_or(cfg, mo.seed);
    mo.q = q_list(cfg, mo.q);
    return mo;
}

int cmd_mirror(const DiagramArgs &da, int f, int g, const RunConfig &cfg) {
    BraneDiagram D = diagram(da);
    IdentityRecord rec = mirror_identity(D, fixed_point(D, f), fixed_point(D, g), mirror_options(cfg));
    if (cfg.format == "json") {
        emit(cfg, to_json(rec).dump(2));
    } else {
        std::ostringstream os;
        os << (cfg.format == "latex" ? to_latex(rec) : to_text(rec)) << "\n";
        if (cfg.format == "text") {
            os << "terms " << rec.term_count() << ", theta factors per term " << rec.factors_per_term() << "\n";
            os << "certificate: " << rec.cert.points << " points, max residual " << rec.cert.max_residual
               << (rec.cert.certified ? " (certified)" : " (NOT certified)") << "\n";
            for (auto &m : fay_normal_form(rec)) {
                os << "Fay form:";
                for (int i = 0; i < 3; ++i) os << " x" << i + 1 << "=" << to_string(m.x[i]);
                for (int i = 0; i < 3; ++i) os << " y" << i + 1 << "=" << to_string(m.y[i]);
                os << "\n";
                break;
            }
        }
        emit(cfg, os.str());
    }
    return rec.cert.certified ? 0 : kExitFail;
}

int cmd_limits(const DiagramArgs &da, const RunConfig &cfg) {
    BraneDiagram D = diagram(da);
    LimitOptions lo;
    lo.points = points_or(cfg, lo.points);
    lo.seed = seed_or(cfg, lo.seed);
    if (!cfg.q.empty()) {
        lo.q.clear();
        for (auto q : q_list(cfg, {})) {
            if (q.imag() != 0 || q.real() <= 0) throw InputError("limit q values must be positive reals");
            lo.q.push_back(q.real());
        }
    }
    LimitReport rep = limit_suite(D, slopes(cfg, D.m()), lo);
    const bool ok = rep.pass(cfg.tol);
    if (cfg.format == "json") {
        json j = to_json(rep);
        j["pass"] = ok;
        emit(cfg, j.dump(2));
    } else {
        std::ostringstream os;
        os << "E->K residual at q =";
        for (double q : rep.q) os << " " << q;
        os << "\n";
        for (auto &row : rep.rows) {
            os << matrix_text(row.f) << " sigma " << join(row.sigma.sigma) << ":";
            for (double r : row.ek_residual) os << " " << r;
            os << (row.monotone ? "" : " (not monotone)") << "  K->H mismatches " << row.kh_mismatches << "\n";
        }
        os << (ok ? "PASS" : "FAIL") << "\n";
        emit(cfg, os.str());
    }
    return ok ? 0 : kExitFail;
}

int cmd_wheel(const DiagramArgs &da, int id, const RunConfig &cfg) {
    BraneDiagram D = diagram(da);
    const Flavor fl = flavor_from_string(cfg.flavor);
    GradedFunction w = wtilde(fixed_point(D, id), chamber(cfg, D.n()), fl, slopes(cfg, D.m()));
    WheelReport rep = wheel_check(w, points_or(cfg, 3), seed_or(cfg, 5), q_list(cfg, {{0.1, 0.05}}).front());
    const bool ok = rep.pass(cfg.tol);
    if (cfg.format == "json") {
        json j = to_json(rep);
        j["pass"] = ok;
        emit(cfg, j.dump(2));
    } else {
        std::ostringstream os;
        if (rep.vacuous)
            os << "no level carries two variables; nothing to check\n";
        else
            os << rep.conditions << " wheel loci, " << rep.trials << " trials, max residual " << rep.max_residual
               << "\n";
        os << (ok ? "PASS" : "FAIL") << "\n";
        emit(cfg, os.str());
    }
    return ok ? 0 : kExitFail;
}

int cmd_sweep(int max_m, int max_n, int max_boxes, const RunConfig &cfg) {
    SweepOptions so;
    so.max_m = max_m;
    so.max_n = max_n;
    so.max_boxes = max_boxes;
    so.mirror.points = points_or(cfg, so.mirror.points);
    so.mirror.tol = cfg.tol;
    so.mirror.seed = seed_or(cfg, so.mirror.seed);
    so.mirror.q = q_list(cfg, so.mirror.q);
    SweepReport rep = sweep(so);
    if (cfg.format == "json") {
        emit(cfg, to_json(rep).dump(2));
    } else {
        std::ostringstream os;
        os << rep.varieties << " varieties (" << rep.skipped << " skipped), " << rep.pairs << " pairs: "
           << rep.certified << " certified, " << rep.trivial << " trivially zero, " << rep.failed << " failed, "
           << rep.reducible << " reducible\n";
        os << "terms  factors  example\n";
        for (auto &p : rep.points)
            os << p.terms << "  " << p.factors << "  r=(" << join(p.r) << ") c=(" << join(p.c) << ") f=" << matrix_text(p.f)
               << " g=" << matrix_text(p.g) << "\n";
        for (auto &f : rep.failures) os << "failure: " << f << "\n";
        emit(cfg, os.str());
    }
    return rep.failed == 0 ? 0 : kExitFail;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"bowcalc: stable envelopes and 3d mirror identities on type-A bow varieties"};
    app.require_subcommand(1);
    RunConfig cfg;
    DiagramArgs da;

    auto common = [&](CLI::App *sub) {
        sub->add_option("--flavor", cfg.flavor, "H, K or E")->check(CLI::IsMember({"H", "K", "E", "h", "k", "e"}));
        sub->add_option("--chamber", cfg.chamber, "permutation \"i,j,k\"");
        sub->add_option("--slopes", cfg.slopes, "K-theory slopes \"p/q,...\"");
        sub->add_option("--q", cfg.q, "nome values \"re+imi,...\"");
        sub->add_option("--points", cfg.points, "evaluation points")->check(CLI::PositiveNumber);
        sub->add_option("--tol", cfg.tol, "tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--seed", cfg.seed, "random seed (0 keeps the command default)");
        sub->add_option("--format", cfg.format, "json, latex or text")->check(CLI::IsMember({"json", "latex", "text"}));
        sub->add_option("--out", cfg.out, "write to a file instead of stdout");
    };
    auto with_diagram = [&](CLI::App *sub) {
        sub->add_option("diagram", da.text, "brane diagram such as \"/1/2\\1\\\"");
        sub->add_option("--r", da.r, "NS5 charges \"r1,r2,...\"");
        sub->add_option("--c", da.c, "D5 charges \"c1,c2,...\"");
        common(sub);
    };

    auto *p_parse = app.add_subcommand("parse", "parse a brane diagram");
    with_diagram(p_parse);
    auto *p_fp = app.add_subcommand("fixed-points", "list the torus fixed points");
    with_diagram(p_fp);

    int f_id = 0, g_id = 0, restrict_at = 0;
    auto *p_stab = app.add_subcommand("stab", "compute the W function of a fixed point");
    p_stab->add_option("--f", f_id, "fixed point id (1-based)")->required();
    p_stab->add_option("--restrict-at", restrict_at, "restrict to this fixed point");
    with_diagram(p_stab);

    auto *p_res = app.add_subcommand("restrict", "restrict W(f) to the fixed point g");
    p_res->add_option("--f", f_id, "fixed point id")->required();
    p_res->add_option("--g", g_id, "fixed point id")->required();
    with_diagram(p_res);

    auto *p_ver = app.add_subcommand("verify-axioms", "check the diagonal and support axioms");
    with_diagram(p_ver);

    auto *p_mir = app.add_subcommand("mirror-identity", "build and certify the mirror identity for (f, g)");
    p_mir->add_option("--f", f_id, "fixed point id")->required();
    p_mir->add_option("--g", g_id, "fixed point id")->required();
    with_diagram(p_mir);

    auto *p_lim = app.add_subcommand("limits", "elliptic to K-theoretic to cohomological limits");
    with_diagram(p_lim);

    auto *p_wh = app.add_subcommand("wheel-check", "wheel conditions of W-tilde(f)");
    p_wh->add_option("--f", f_id, "fixed point id")->required();
    with_diagram(p_wh);

    int max_m = 4, max_n = 4, max_boxes = 6;
    auto *p_sw = app.add_subcommand("sweep", "tabulate identity sizes over small varieties");
    p_sw->add_option("--max-m", max_m)->check(CLI::PositiveNumber);
    p_sw->add_option("--max-n", max_n)->check(CLI::PositiveNumber);
    p_sw->add_option("--max-boxes", max_boxes)->check(CLI::PositiveNumber);
    common(p_sw);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInput;
    }

    try {
        set_precision_from_env();
        if (*p_parse) return cmd_parse(da, cfg);
        if (*p_fp) return cmd_fixed_points(da, cfg);
        if (*p_stab) return cmd_stab(da, f_id, restrict_at, cfg);
        if (*p_res) return cmd_stab(da, f_id, g_id, cfg);
        if (*p_ver) return cmd_verify(da, cfg);
        if (*p_mir) return cmd_mirror(da, f_id, g_id, cfg);
        if (*p_lim) return cmd_limits(da, cfg);
        if (*p_wh) return cmd_wheel(da, f_id, cfg);
        if (*p_sw) return cmd_sweep(max_m, max_n, max_boxes, cfg);
    } catch (const std::invalid_argument &e) { // InputError and malformed values
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const PoleError &e) {
        std::cerr << "pole: " << e.what() << "\n";
        return kExitFail;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return 0;
}
