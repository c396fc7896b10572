#pragma once

#include "bowcalc/verify.hpp"

#include <json.hpp>

namespace bowcalc {

using json = nlohmann::json;

// Variables are written as "t:k:i:tag", "a:j", "z:j" and "h"; exponents stay doubled
// and rationals are "p/q" strings, so every class round-trips exactly.
std::string var_key(const Var &v);
Var var_from_key(const std::string &s);

json to_json(const Monomial &m);
json to_json(const LinearForm &l);
json to_json(const FlavorClass &c);
json to_json(const FixedPoint &f);
json to_json(const StabResult &w);
json to_json(const IdentityRecord &r);
json to_json(const AxiomReport &r);
json to_json(const LimitReport &r);
json to_json(const SweepReport &r);
json to_json(const WheelReport &r);

Monomial monomial_from_json(const json &j);
LinearForm linear_from_json(const json &j);
FlavorClass class_from_json(const json &j);
FixedPoint fixed_point_from_json(const json &j);
StabResult stab_from_json(const json &j);
IdentityRecord identity_from_json(const json &j);

} // namespace bowcalc
