#pragma once

#include <gmpxx.h>

#include <complex>
#include <compare>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bowcalc {

enum class VarKind : std::uint8_t { T = 0, A = 1, Z = 2, Hbar = 3 };

// t_{k,i} carries a tag so that the kernel can be written in primed (1) and
// double-primed (2) alphabets before renaming.
struct Var {
    VarKind kind = VarKind::Hbar;
    int tag = 0;
    int k = 0;
    int i = 0;
    auto operator<=>(const Var &) const = default;
};

Var tvar(int k, int i, int tag = 0);
Var avar(int j);
Var zvar(int j);
Var hbar();
std::string to_string(const Var &v);

// Laurent monomial; exponents are stored doubled so that half powers are exact.
class Monomial {
  public:
    Monomial() = default;
    static Monomial of(Var v, int power = 1);
    static Monomial of_doubled(Var v, int doubled);

    const std::vector<std::pair<Var, int>> &terms() const { return e_; }
    int doubled(Var v) const;
    bool is_one() const { return e_.empty(); }
    bool is_integral() const;

    Monomial operator*(const Monomial &o) const;
    Monomial operator/(const Monomial &o) const;
    Monomial inverse() const;
    Monomial pow(int p) const;
    Monomial &operator*=(const Monomial &o) { return *this = *this * o; }

    // first nonzero exponent positive
    bool is_oriented() const { return e_.empty() || e_.front().second > 0; }

    auto operator<=>(const Monomial &) const = default;

  private:
    void add(Var v, int d);
    std::vector<std::pair<Var, int>> e_;
};

class LinearForm {
  public:
    LinearForm() = default;
    static LinearForm of(Var v, const mpq_class &c = 1);
    // exp/log dictionary: prod v^{e_v}  ->  sum e_v v
    static LinearForm from_monomial(const Monomial &m);

    const std::vector<std::pair<Var, mpq_class>> &terms() const { return c_; }
    mpq_class coeff(Var v) const;
    bool is_zero() const { return c_.empty(); }

    LinearForm operator+(const LinearForm &o) const;
    LinearForm operator-(const LinearForm &o) const;
    LinearForm operator-() const;
    LinearForm scaled(const mpq_class &s) const;

    bool operator==(const LinearForm &o) const;
    bool operator<(const LinearForm &o) const;

  private:
    void add(Var v, const mpq_class &c);
    std::vector<std::pair<Var, mpq_class>> c_;
};

enum class Flavor : std::uint8_t { H, K, E };
enum class AtomKind : std::uint8_t { Theta, Ahat, Linear };

std::string to_string(Flavor f);
Flavor flavor_from_string(const std::string &s);

struct Atom {
    AtomKind kind = AtomKind::Theta;
    Monomial mono;  // Theta / Ahat
    LinearForm lin; // Linear
    bool operator==(const Atom &o) const;
    bool operator<(const Atom &o) const;
};

// e(w) for a weight w, in the given flavor: theta(w), ahat(w) or the linear form log w
Atom euler_atom(Flavor fl, const Monomial &w);

struct Factor {
    Atom atom;
    int power = 1;
    // set by apply_substitution when the argument collapses to 1 (E/K) or 0 (H);
    // dir is the first-order variation of the argument in the substituted variables
    bool zero = false;
    LinearForm dir;
};

struct Term {
    mpq_class coeff = 1;
    Monomial pre;
    std::vector<Factor> factors;
};

struct FlavorClass {
    Flavor flavor = Flavor::E;
    std::vector<Term> terms;

    static FlavorClass one(Flavor fl);
    static FlavorClass zero(Flavor fl) { return FlavorClass{fl, {}}; }
    static FlavorClass atom(Flavor fl, const Atom &a, int power = 1);
    static FlavorClass euler(Flavor fl, const Monomial &w, int power = 1) {
        return atom(fl, euler_atom(fl, w), power);
    }
    static FlavorClass monomial(Flavor fl, const Monomial &m);
};

Term operator*(const Term &a, const Term &b);
FlavorClass operator*(const FlavorClass &a, const FlavorClass &b);
FlavorClass operator+(const FlavorClass &a, const FlavorClass &b);
FlavorClass negate(const FlavorClass &a);

// Orient theta/ahat arguments (x ~ 1/x up to sign), make linear forms monic,
// merge equal atoms and drop zero powers. Factors tagged as zeros are left alone.
void canonicalize(Term &t);
void canonicalize(FlavorClass &c);

std::vector<Var> variables(const FlavorClass &c);
FlavorClass rename(const FlavorClass &c, const std::map<Var, Var> &m);

struct Substitution {
    std::map<Var, Monomial> image;
    LinearForm additive(Var v) const { return LinearForm::from_monomial(image.at(v)); }
};

FlavorClass apply_substitution(const FlavorClass &c, const Substitution &s);

// z_k -> hbar^{-c_k} z_k (elliptic only); charges[k-1] = c_k
FlavorClass z_shift(const FlavorClass &c, const std::vector<int> &charges);

// ---- numerics ----

using cplx = std::complex<double>;

enum class Precision { Double, Extended };
Precision precision();
void set_precision(Precision p);
void set_precision_from_env();

struct EvalPoint {
    std::map<Var, cplx> logs; // fixed branch of log for every variable
    cplx q = 0.0;
    void set(Var v, cplx value) { logs[v] = std::log(value); }
    void set_log(Var v, cplx l) { logs[v] = l; }
};

struct ResampleRequired : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StructuralPole : std::runtime_error {
    using std::runtime_error::runtime_error;
};

cplx theta_eval(cplx logx, cplx q, double tol = 1e-18);
cplx ahat_eval(cplx logx);
cplx monomial_log(const Monomial &m, const EvalPoint &pt);
cplx linear_eval(const LinearForm &l, const EvalPoint &pt);
cplx atom_eval(const Atom &a, const EvalPoint &pt);

struct EvalOptions {
    double guard = 1e-6;
};

cplx evaluate_term(const Term &t, const EvalPoint &pt, const EvalOptions &opt = {});
cplx evaluate(const FlavorClass &c, const EvalPoint &pt, const EvalOptions &opt = {});
cplx evaluate(const FlavorClass &c, const Substitution &s, const EvalPoint &pt,
              const EvalOptions &opt = {});
// sum of terms together with the largest single-term magnitude
std::pair<cplx, double> evaluate_with_scale(const FlavorClass &c, const EvalPoint &pt,
                                            const EvalOptions &opt = {});

// Limit of an already substituted class along t -> value * exp(eps u) (additively
// t -> value + eps u): per term, more vanishing factors upstairs than downstairs gives 0,
// fewer is a pole, and equal orders contribute the product of leading coefficients.
struct LimitStats {
    int dropped = 0;
    int balanced = 0;
    int regular = 0;
};
struct PoleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateDirection : std::runtime_error {
    using std::runtime_error::runtime_error;
};
FlavorClass leading_limit(const FlavorClass &substituted, const std::map<Var, mpq_class> &u,
                          LimitStats *stats = nullptr);

// random point: moduli in [0.6, 1.6], uniform phases
EvalPoint random_point(const std::vector<Var> &vars, std::mt19937_64 &rng, cplx q);

// exact evaluation of a cohomological class at rational values of its variables
mpq_class evaluate_exact(const FlavorClass &c, const std::map<Var, mpq_class> &vals);

std::string to_string(const Monomial &m);
std::string to_string(const LinearForm &l);
std::string to_string(const Atom &a);
std::string to_string(const Term &t);
std::string to_string(const FlavorClass &c);

} // namespace bowcalc
