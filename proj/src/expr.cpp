#include "bowcalc/expr.hpp"

#include <numbers>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

namespace bowcalc {

Var tvar(int k, int i, int tag) { return Var{VarKind::T, tag, k, i}; }
Var avar(int j) { return Var{VarKind::A, 0, 0, j}; }
Var zvar(int j) { return Var{VarKind::Z, 0, 0, j}; }
Var hbar() { return Var{VarKind::Hbar, 0, 0, 0}; }

std::string to_string(const Var &v) {
    switch (v.kind) {
    case VarKind::T: {
        std::string p = v.tag == 1 ? "'" : v.tag == 2 ? "''" : "";
        return "t" + p + "_{" + std::to_string(v.k) + "," + std::to_string(v.i) + "}";
    }
    case VarKind::A: return "a_" + std::to_string(v.i);
    case VarKind::Z: return "z_" + std::to_string(v.i);
    case VarKind::Hbar: return "hbar";
    }
    return "?";
}

// ---------------- Monomial ----------------

Monomial Monomial::of(Var v, int power) { return of_doubled(v, 2 * power); }

Monomial Monomial::of_doubled(Var v, int doubled) {
    Monomial m;
    m.add(v, doubled);
    return m;
}

void Monomial::add(Var v, int d) {
    if (d == 0) return;
    auto it = std::lower_bound(e_.begin(), e_.end(), v,
                               [](const auto &p, const Var &x) { return p.first < x; });
    if (it != e_.end() && it->first == v) {
        it->second += d;
        if (it->second == 0) e_.erase(it);
    } else {
        e_.insert(it, {v, d});
    }
}

int Monomial::doubled(Var v) const {
    for (auto &[w, d] : e_)
        if (w == v) return d;
    return 0;
}

bool Monomial::is_integral() const {
    return std::all_of(e_.begin(), e_.end(), [](auto &p) { return p.second % 2 == 0; });
}

Monomial Monomial::operator*(const Monomial &o) const {
    Monomial r;
    r.e_.reserve(e_.size() + o.e_.size());
    std::size_t i = 0, j = 0;
    while (i < e_.size() || j < o.e_.size()) {
        if (j == o.e_.size() || (i < e_.size() && e_[i].first < o.e_[j].first)) {
            r.e_.push_back(e_[i++]);
        } else if (i == e_.size() || o.e_[j].first < e_[i].first) {
            r.e_.push_back(o.e_[j++]);
        } else {
            int d = e_[i].second + o.e_[j].second;
            if (d != 0) r.e_.push_back({e_[i].first, d});
            ++i, ++j;
        }
    }
    return r;
}

Monomial Monomial::inverse() const {
    Monomial r = *this;
    for (auto &p : r.e_) p.second = -p.second;
    return r;
}

Monomial Monomial::operator/(const Monomial &o) const { return *this * o.inverse(); }

Monomial Monomial::pow(int p) const {
    if (p == 0) return {};
    Monomial r = *this;
    for (auto &q : r.e_) q.second *= p;
    return r;
}

// ---------------- LinearForm ----------------

LinearForm LinearForm::of(Var v, const mpq_class &c) {
    LinearForm l;
    l.add(v, c);
    return l;
}

LinearForm LinearForm::from_monomial(const Monomial &m) {
    LinearForm l;
    for (auto &[v, d] : m.terms()) l.add(v, mpq_class(d, 2));
    return l;
}

void LinearForm::add(Var v, const mpq_class &c) {
    if (c == 0) return;
    auto it = std::lower_bound(c_.begin(), c_.end(), v,
                               [](const auto &p, const Var &x) { return p.first < x; });
    if (it != c_.end() && it->first == v) {
        it->second += c;
        if (it->second == 0) c_.erase(it);
    } else {
        mpq_class cc = c;
        cc.canonicalize();
        c_.insert(it, {v, cc});
    }
}

mpq_class LinearForm::coeff(Var v) const {
    for (auto &[w, c] : c_)
        if (w == v) return c;
    return 0;
}

LinearForm LinearForm::operator+(const LinearForm &o) const {
    LinearForm r = *this;
    for (auto &[v, c] : o.c_) r.add(v, c);
    return r;
}

LinearForm LinearForm::operator-() const { return scaled(-1); }
LinearForm LinearForm::operator-(const LinearForm &o) const { return *this + (-o); }

LinearForm LinearForm::scaled(const mpq_class &s) const {
    if (s == 0) return {};
    LinearForm r = *this;
    for (auto &p : r.c_) p.second *= s;
    return r;
}

bool LinearForm::operator==(const LinearForm &o) const {
    if (c_.size() != o.c_.size()) return false;
    for (std::size_t i = 0; i < c_.size(); ++i)
        if (c_[i].first != o.c_[i].first || c_[i].second != o.c_[i].second) return false;
    return true;
}

bool LinearForm::operator<(const LinearForm &o) const {
    std::size_t n = std::min(c_.size(), o.c_.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (c_[i].first != o.c_[i].first) return c_[i].first < o.c_[i].first;
        int s = cmp(c_[i].second, o.c_[i].second);
        if (s != 0) return s < 0;
    }
    return c_.size() < o.c_.size();
}

// ---------------- atoms, terms, classes ----------------

std::string to_string(Flavor f) {
    switch (f) {
    case Flavor::H: return "H";
    case Flavor::K: return "K";
    case Flavor::E: return "E";
    }
    return "?";
}

Flavor flavor_from_string(const std::string &s) {
    if (s == "H" || s == "h") return Flavor::H;
    if (s == "K" || s == "k") return Flavor::K;
    if (s == "E" || s == "e" || s == "Ell" || s == "ell") return Flavor::E;
    throw std::invalid_argument("unknown flavor '" + s + "'");
}

bool Atom::operator==(const Atom &o) const {
    if (kind != o.kind) return false;
    return kind == AtomKind::Linear ? lin == o.lin : mono == o.mono;
}

bool Atom::operator<(const Atom &o) const {
    if (kind != o.kind) return kind < o.kind;
    return kind == AtomKind::Linear ? lin < o.lin : mono < o.mono;
}

Atom euler_atom(Flavor fl, const Monomial &w) {
    Atom a;
    switch (fl) {
    case Flavor::E: a.kind = AtomKind::Theta; a.mono = w; break;
    case Flavor::K: a.kind = AtomKind::Ahat; a.mono = w; break;
    case Flavor::H: a.kind = AtomKind::Linear; a.lin = LinearForm::from_monomial(w); break;
    }
    return a;
}

FlavorClass FlavorClass::one(Flavor fl) { return FlavorClass{fl, {Term{}}}; }

FlavorClass FlavorClass::atom(Flavor fl, const Atom &a, int power) {
    Term t;
    if (power != 0) t.factors.push_back(Factor{a, power, false, {}});
    canonicalize(t);
    return FlavorClass{fl, {t}};
}

FlavorClass FlavorClass::monomial(Flavor fl, const Monomial &m) {
    Term t;
    t.pre = m;
    return FlavorClass{fl, {t}};
}

Term operator*(const Term &a, const Term &b) {
    Term r;
    r.coeff = a.coeff * b.coeff;
    r.pre = a.pre * b.pre;
    r.factors.reserve(a.factors.size() + b.factors.size());
    r.factors.insert(r.factors.end(), a.factors.begin(), a.factors.end());
    r.factors.insert(r.factors.end(), b.factors.begin(), b.factors.end());
    canonicalize(r);
    return r;
}

FlavorClass operator*(const FlavorClass &a, const FlavorClass &b) {
    if (a.flavor != b.flavor) throw std::invalid_argument("flavor mismatch in product");
    FlavorClass r{a.flavor, {}};
    r.terms.reserve(a.terms.size() * b.terms.size());
    for (auto &x : a.terms)
        for (auto &y : b.terms) r.terms.push_back(x * y);
    return r;
}

FlavorClass operator+(const FlavorClass &a, const FlavorClass &b) {
    if (a.flavor != b.flavor) throw std::invalid_argument("flavor mismatch in sum");
    FlavorClass r = a;
    r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
    return r;
}

FlavorClass negate(const FlavorClass &a) {
    FlavorClass r = a;
    for (auto &t : r.terms) t.coeff = -t.coeff;
    return r;
}

static mpq_class qpow(const mpq_class &c, int p) {
    mpq_class r = 1;
    mpq_class b = p >= 0 ? c : mpq_class(1) / c;
    for (int i = 0; i < std::abs(p); ++i) r *= b;
    return r;
}

void canonicalize(Term &t) {
    std::vector<Factor> zeros, live;
    for (auto &f : t.factors) {
        if (f.power == 0) continue;
        if (f.zero) {
            zeros.push_back(f);
            continue;
        }
        Factor g = f;
        if (g.atom.kind == AtomKind::Linear) {
            if (!g.atom.lin.is_zero()) {
                mpq_class lead = g.atom.lin.terms().front().second;
                if (lead != 1) {
                    g.atom.lin = g.atom.lin.scaled(mpq_class(1) / lead);
                    t.coeff *= qpow(lead, g.power);
                }
            }
        } else if (!g.atom.mono.is_oriented()) {
            g.atom.mono = g.atom.mono.inverse();
            if (g.power % 2 != 0) t.coeff = -t.coeff;
        }
        live.push_back(std::move(g));
    }
    std::sort(live.begin(), live.end(),
              [](const Factor &a, const Factor &b) { return a.atom < b.atom; });
    std::vector<Factor> merged;
    for (auto &f : live) {
        if (!merged.empty() && merged.back().atom == f.atom)
            merged.back().power += f.power;
        else
            merged.push_back(f);
    }
    t.factors.clear();
    for (auto &f : merged)
        if (f.power != 0) t.factors.push_back(std::move(f));
    for (auto &f : zeros) t.factors.push_back(std::move(f));
}

void canonicalize(FlavorClass &c) {
    for (auto &t : c.terms) canonicalize(t);
}

std::vector<Var> variables(const FlavorClass &c) {
    std::set<Var> s;
    for (auto &t : c.terms) {
        for (auto &[v, d] : t.pre.terms()) s.insert(v);
        for (auto &f : t.factors) {
            if (f.atom.kind == AtomKind::Linear)
                for (auto &[v, x] : f.atom.lin.terms()) s.insert(v);
            else
                for (auto &[v, d] : f.atom.mono.terms()) s.insert(v);
        }
    }
    return {s.begin(), s.end()};
}

static Monomial rename_mono(const Monomial &m, const std::map<Var, Var> &r) {
    Monomial out;
    for (auto &[v, d] : m.terms()) {
        auto it = r.find(v);
        out *= Monomial::of_doubled(it == r.end() ? v : it->second, d);
    }
    return out;
}

static LinearForm rename_lin(const LinearForm &l, const std::map<Var, Var> &r) {
    LinearForm out;
    for (auto &[v, c] : l.terms()) {
        auto it = r.find(v);
        out = out + LinearForm::of(it == r.end() ? v : it->second, c);
    }
    return out;
}

FlavorClass rename(const FlavorClass &c, const std::map<Var, Var> &m) {
    FlavorClass r = c;
    for (auto &t : r.terms) {
        t.pre = rename_mono(t.pre, m);
        for (auto &f : t.factors) {
            if (f.atom.kind == AtomKind::Linear)
                f.atom.lin = rename_lin(f.atom.lin, m);
            else
                f.atom.mono = rename_mono(f.atom.mono, m);
            f.dir = rename_lin(f.dir, m);
        }
        canonicalize(t);
    }
    return r;
}

static Monomial subst_mono(const Monomial &m, const Substitution &s, LinearForm *dir) {
    Monomial out;
    for (auto &[v, d] : m.terms()) {
        auto it = s.image.find(v);
        if (it == s.image.end()) {
            out *= Monomial::of_doubled(v, d);
            continue;
        }
        if (dir) *dir = *dir + LinearForm::of(v, mpq_class(d, 2));
        // image^(d/2) with image exponents doubled
        for (auto &[w, e] : it->second.terms()) {
            long prod = static_cast<long>(e) * d;
            if (prod % 2 != 0)
                throw std::invalid_argument("substitution produces a quarter power of " +
                                            to_string(w));
            out *= Monomial::of_doubled(w, static_cast<int>(prod / 2));
        }
    }
    return out;
}

FlavorClass apply_substitution(const FlavorClass &c, const Substitution &s) {
    FlavorClass r{c.flavor, {}};
    r.terms.reserve(c.terms.size());
    for (auto &t : c.terms) {
        Term u;
        u.coeff = t.coeff;
        u.pre = subst_mono(t.pre, s, nullptr);
        for (auto &f : t.factors) {
            Factor g;
            g.power = f.power;
            g.atom.kind = f.atom.kind;
            LinearForm dir;
            if (f.atom.kind == AtomKind::Linear) {
                LinearForm out;
                for (auto &[v, cf] : f.atom.lin.terms()) {
                    auto it = s.image.find(v);
                    if (it == s.image.end()) {
                        out = out + LinearForm::of(v, cf);
                    } else {
                        out = out + LinearForm::from_monomial(it->second).scaled(cf);
                        dir = dir + LinearForm::of(v, cf);
                    }
                }
                g.atom.lin = out;
                g.zero = f.zero || out.is_zero();
            } else {
                g.atom.mono = subst_mono(f.atom.mono, s, &dir);
                g.zero = f.zero || g.atom.mono.is_one();
            }
            g.dir = f.zero ? f.dir : dir;
            u.factors.push_back(std::move(g));
        }
        canonicalize(u);
        r.terms.push_back(std::move(u));
    }
    return r;
}

FlavorClass z_shift(const FlavorClass &c, const std::vector<int> &charges) {
    if (c.flavor != Flavor::E) return c;
    auto shift = [&](const Monomial &m) {
        Monomial out = m;
        for (auto &[v, d] : m.terms()) {
            if (v.kind != VarKind::Z) continue;
            int k = v.i;
            int ck = (k >= 1 && k <= static_cast<int>(charges.size())) ? charges[k - 1] : 0;
            out *= Monomial::of_doubled(hbar(), -ck * d);
        }
        return out;
    };
    FlavorClass r = c;
    for (auto &t : r.terms) {
        t.pre = shift(t.pre);
        for (auto &f : t.factors)
            if (f.atom.kind != AtomKind::Linear) f.atom.mono = shift(f.atom.mono);
        canonicalize(t);
    }
    return r;
}

// ---------------- numerics ----------------

static std::atomic<int> g_precision{0};

Precision precision() { return g_precision.load() == 0 ? Precision::Double : Precision::Extended; }
void set_precision(Precision p) { g_precision.store(p == Precision::Double ? 0 : 1); }

void set_precision_from_env() {
    const char *e = std::getenv("BOWCALC_PRECISION");
    if (!e) return;
    std::string s(e);
    if (s == "extended")
        set_precision(Precision::Extended);
    else if (s == "double")
        set_precision(Precision::Double);
    else
        throw std::invalid_argument("BOWCALC_PRECISION must be 'double' or 'extended'");
}

namespace {

template <class R> std::complex<R> theta_t(std::complex<R> lx, std::complex<R> q, R tol) {
    std::complex<R> x = std::exp(lx);
    std::complex<R> xh = std::exp(lx / R(2));
    std::complex<R> val = xh - R(1) / xh;
    if (q == std::complex<R>(0)) return val;
    if (std::abs(q) >= R(1)) throw std::domain_error("nome outside the unit disk");
    std::complex<R> xi = R(1) / x;
    R big = std::max(std::abs(x), std::abs(xi));
    std::complex<R> qn = q;
    for (int n = 1; n <= 512; ++n) {
        val *= (R(1) - qn * x) * (R(1) - qn * xi);
        if (std::abs(qn) * big < tol) break;
        qn *= q;
    }
    return val;
}

template <class R> struct Evaluator {
    const EvalPoint &pt;
    const EvalOptions &opt;
    std::complex<R> q;

    std::complex<R> logv(Var v) const {
        auto it = pt.logs.find(v);
        if (it == pt.logs.end()) throw std::invalid_argument("no value for " + to_string(v));
        return std::complex<R>(it->second.real(), it->second.imag());
    }
    std::complex<R> mono_log(const Monomial &m) const {
        std::complex<R> s = 0;
        for (auto &[v, d] : m.terms()) s += logv(v) * (R(d) / R(2));
        return s;
    }
    std::complex<R> lin(const LinearForm &l) const {
        std::complex<R> s = 0;
        for (auto &[v, c] : l.terms()) s += std::exp(logv(v)) * R(c.get_d());
        return s;
    }
    std::complex<R> atom(const Atom &a) const {
        switch (a.kind) {
        case AtomKind::Theta: {
            R tol = std::is_same_v<R, double> ? R(1e-18) : R(1e-21);
            return theta_t<R>(mono_log(a.mono), q, tol);
        }
        case AtomKind::Ahat: {
            auto h = std::exp(mono_log(a.mono) / R(2));
            return h - R(1) / h;
        }
        case AtomKind::Linear: return lin(a.lin);
        }
        return 0;
    }
    std::complex<R> term(const Term &t) const {
        std::complex<R> v = R(t.coeff.get_d());
        if (!t.pre.is_one()) v *= std::exp(mono_log(t.pre));
        for (auto &f : t.factors) {
            if (f.zero) {
                if (f.power > 0) return 0;
                throw StructuralPole("structural zero in a denominator");
            }
            std::complex<R> a = atom(f.atom);
            if (f.power < 0 && std::abs(a) < R(opt.guard))
                throw ResampleRequired("denominator factor " + to_string(f.atom) + " near zero");
            if (f.power > 0)
                for (int i = 0; i < f.power; ++i) v *= a;
            else
                for (int i = 0; i < -f.power; ++i) v /= a;
        }
        return v;
    }
};

template <class R> cplx eval_term_t(const Term &t, const EvalPoint &pt, const EvalOptions &opt) {
    Evaluator<R> ev{pt, opt, std::complex<R>(pt.q.real(), pt.q.imag())};
    auto v = ev.term(t);
    return cplx(static_cast<double>(v.real()), static_cast<double>(v.imag()));
}

} // namespace

cplx theta_eval(cplx logx, cplx q, double tol) { return theta_t<double>(logx, q, tol); }

cplx ahat_eval(cplx logx) {
    cplx h = std::exp(logx / 2.0);
    return h - 1.0 / h;
}

cplx monomial_log(const Monomial &m, const EvalPoint &pt) {
    EvalOptions o;
    return Evaluator<double>{pt, o, pt.q}.mono_log(m);
}

cplx linear_eval(const LinearForm &l, const EvalPoint &pt) {
    EvalOptions o;
    return Evaluator<double>{pt, o, pt.q}.lin(l);
}

cplx atom_eval(const Atom &a, const EvalPoint &pt) {
    EvalOptions o;
    if (precision() == Precision::Extended) {
        auto v = Evaluator<long double>{pt, o, std::complex<long double>(pt.q.real(), pt.q.imag())}
                     .atom(a);
        return cplx(double(v.real()), double(v.imag()));
    }
    return Evaluator<double>{pt, o, pt.q}.atom(a);
}

cplx evaluate_term(const Term &t, const EvalPoint &pt, const EvalOptions &opt) {
    if (precision() == Precision::Extended) return eval_term_t<long double>(t, pt, opt);
    return eval_term_t<double>(t, pt, opt);
}

std::pair<cplx, double> evaluate_with_scale(const FlavorClass &c, const EvalPoint &pt,
                                            const EvalOptions &opt) {
    cplx s = 0;
    double scale = 0;
    for (auto &t : c.terms) {
        cplx v = evaluate_term(t, pt, opt);
        s += v;
        scale = std::max(scale, std::abs(v));
    }
    return {s, scale};
}

cplx evaluate(const FlavorClass &c, const EvalPoint &pt, const EvalOptions &opt) {
    return evaluate_with_scale(c, pt, opt).first;
}

cplx evaluate(const FlavorClass &c, const Substitution &s, const EvalPoint &pt,
              const EvalOptions &opt) {
    return evaluate(apply_substitution(c, s), pt, opt);
}

mpq_class evaluate_exact(const FlavorClass &c, const std::map<Var, mpq_class> &vals) {
    if (c.flavor != Flavor::H) throw std::invalid_argument("exact evaluation needs H flavor");
    mpq_class total = 0;
    for (auto &t : c.terms) {
        if (!t.pre.is_one()) throw std::invalid_argument("monomial prefactor in H class");
        mpq_class v = t.coeff;
        bool vanished = false;
        for (auto &f : t.factors) {
            if (f.zero) {
                if (f.power > 0) {
                    vanished = true;
                    break;
                }
                throw StructuralPole("structural zero in a denominator");
            }
            mpq_class a = 0;
            for (auto &[w, cf] : f.atom.lin.terms()) {
                auto it = vals.find(w);
                if (it == vals.end()) throw std::invalid_argument("no value for " + to_string(w));
                a += cf * it->second;
            }
            if (f.power < 0 && a == 0) throw StructuralPole("denominator vanishes");
            v *= qpow(a, f.power);
        }
        if (!vanished) total += v;
    }
    return total;
}

// ---------------- printing ----------------

static std::string exp_str(int d) {
    if (d % 2 == 0) return std::to_string(d / 2);
    return "(" + std::to_string(d) + "/2)";
}

std::string to_string(const Monomial &m) {
    if (m.is_one()) return "1";
    std::ostringstream os;
    bool first = true;
    for (auto &[v, d] : m.terms()) {
        if (!first) os << "*";
        first = false;
        os << to_string(v);
        if (d != 2) os << "^" << exp_str(d);
    }
    return os.str();
}

std::string to_string(const LinearForm &l) {
    if (l.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto &[v, c] : l.terms()) {
        mpq_class a = abs(c);
        if (first)
            os << (c < 0 ? "-" : "");
        else
            os << (c < 0 ? " - " : " + ");
        first = false;
        if (a != 1) os << a.get_str() << "*";
        os << to_string(v);
    }
    return os.str();
}

std::string to_string(const Atom &a) {
    switch (a.kind) {
    case AtomKind::Theta: return "theta(" + to_string(a.mono) + ")";
    case AtomKind::Ahat: return "ahat(" + to_string(a.mono) + ")";
    case AtomKind::Linear: return "(" + to_string(a.lin) + ")";
    }
    return "?";
}

std::string to_string(const Term &t) {
    std::ostringstream os;
    std::vector<std::string> parts;
    for (auto &f : t.factors) {
        if (f.power < 0) continue;
        std::string s = to_string(f.atom);
        if (f.power != 1) s += "^" + std::to_string(f.power);
        parts.push_back(s);
    }
    std::vector<std::string> den;
    for (auto &f : t.factors) {
        if (f.power > 0) continue;
        std::string s = to_string(f.atom);
        if (f.power != -1) s += "^" + std::to_string(-f.power);
        den.push_back(s);
    }
    bool unit = t.pre.is_one() && parts.empty();
    if (t.coeff != 1 || unit) {
        if (t.coeff == -1 && !unit)
            os << "-";
        else
            os << t.coeff.get_str() << (unit ? "" : "*");
    }
    bool first = true;
    if (!t.pre.is_one()) {
        os << to_string(t.pre);
        first = false;
    }
    for (auto &p : parts) {
        if (!first) os << "*";
        first = false;
        os << p;
    }
    if (!den.empty()) {
        os << "/";
        if (den.size() > 1) os << "(";
        for (std::size_t i = 0; i < den.size(); ++i) os << (i ? "*" : "") << den[i];
        if (den.size() > 1) os << ")";
    }
    return os.str();
}

std::string to_string(const FlavorClass &c) {
    if (c.terms.empty()) return "0";
    if (c.terms.size() == 1 && c.terms[0].coeff == 1 && c.terms[0].pre.is_one() &&
        c.terms[0].factors.size() == 1 && c.terms[0].factors[0].power == 1 &&
        c.terms[0].factors[0].atom.kind == AtomKind::Linear)
        return to_string(c.terms[0].factors[0].atom.lin);
    std::ostringstream os;
    for (std::size_t i = 0; i < c.terms.size(); ++i) {
        std::string s = to_string(c.terms[i]);
        if (i > 0) {
            if (!s.empty() && s[0] == '-')
                os << " - " << s.substr(1);
            else
                os << " + " << s;
        } else {
            os << s;
        }
    }
    return os.str();
}

} // namespace bowcalc

namespace bowcalc {

FlavorClass leading_limit(const FlavorClass &c, const std::map<Var, mpq_class> &u, LimitStats *stats) {
    FlavorClass out{c.flavor, {}};
    LimitStats st;
    for (auto &t : c.terms) {
        int ord = 0;
        bool hard_zero_up = false;
        for (auto &f : t.factors) {
            if (!f.zero) continue;
            ord += f.power;
            if (f.dir.is_zero()) {
                if (f.power < 0) throw PoleError("factor vanishing identically in a denominator");
                hard_zero_up = true;
            }
        }
        if (ord > 0 || hard_zero_up) {
            ++st.dropped;
            continue;
        }
        if (ord < 0) throw PoleError("term with more vanishing factors in the denominator (" +
                                     to_string(t) + ")");
        Term r;
        r.coeff = t.coeff;
        r.pre = t.pre;
        bool balanced = false;
        for (auto &f : t.factors) {
            if (!f.zero) {
                r.factors.push_back(f);
                continue;
            }
            balanced = true;
            mpq_class lu = 0;
            for (auto &[v, cf] : f.dir.terms()) {
                auto it = u.find(v);
                if (it != u.end()) lu += cf * it->second;
            }
            if (lu == 0) throw DegenerateDirection("perturbation direction annihilates a factor");
            // theta(e^y) ~ y * prod(1-q^n)^2, ahat(e^y) ~ y, L ~ eps L_u; the constants
            // cancel because the orders balance
            for (int i = 0; i < std::abs(f.power); ++i) {
                if (f.power > 0) r.coeff *= lu;
                else r.coeff /= lu;
            }
        }
        canonicalize(r);
        if (balanced)
            ++st.balanced;
        else
            ++st.regular;
        out.terms.push_back(std::move(r));
    }
    if (stats) *stats = st;
    return out;
}

EvalPoint random_point(const std::vector<Var> &vars, std::mt19937_64 &rng, cplx q) {
    std::uniform_real_distribution<double> mod(0.6, 1.6), ph(-std::numbers::pi, std::numbers::pi);
    EvalPoint pt;
    pt.q = q;
    for (auto &v : vars) pt.set_log(v, cplx(std::log(mod(rng)), ph(rng)));
    return pt;
}

} // namespace bowcalc
