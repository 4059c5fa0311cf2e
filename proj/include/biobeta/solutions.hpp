// Wide protein solutions, connectedness, the growing relation and
// reaction-rule validation (monotone / anti-monotone).
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "biobeta/ast.hpp"

namespace biobeta {

// A protein pattern occurring in a rule or mobility configuration.
// Bound site names are rule names, not state names.
struct PatProtein {
  std::string name;
  Interface iface;

  bool operator==(const PatProtein&) const = default;
};

using PatGroup = std::vector<PatProtein>;  // one group; may be empty (unit)

// nu x1..xk. < P1, ..., Pn | S1, ..., Sm >
struct WideSolution {
  std::vector<std::string> restricted;
  std::vector<PatGroup> system_groups;
  std::vector<PatGroup> membrane_groups;

  std::set<std::string> free_names_of() const;  // fn minus restricted
  size_t protein_count() const;
};

// True when the name-sharing graph over all proteins is connected.
// Empty groups are units; a solution with no proteins is not connected.
bool connected(const WideSolution& ws);

enum class SiteChange : uint8_t { Unchanged, Reveal, Hide, BindFresh };

struct GrowthFailure {
  std::string message;
  int group = -1;      // offending group (system zone first, then membranes)
  int protein = -1;
  int site = -1;       // 1-based, -1 when not site-specific
};

// Sitewise growth decision for a single interface pair.
std::variant<std::vector<SiteChange>, GrowthFailure> interface_grows(
    const std::set<std::string>& xvec, const Interface& rho, const Interface& sigma);

// How each big-side group extends the aligned small-side group.
struct GroupGrowth {
  // aligned[j] = index into the big group that small protein j grows into
  std::vector<int> aligned;
  std::vector<std::vector<SiteChange>> changes;  // per aligned protein
  std::vector<int> created;                      // big-side indices of new proteins
};

struct GrowthWitness {
  std::vector<GroupGrowth> system_groups;
  std::vector<GroupGrowth> membrane_groups;
};

// Decides xvec |- small |> big, including the freshness conditions
// xvec ∩ fn(small) = ∅ and fn(big) = fn(small) ∪ xvec.
std::variant<GrowthWitness, GrowthFailure> solution_grows(
    const std::vector<std::string>& xvec, const WideSolution& small, const WideSolution& big);

struct ProteinRule {
  std::string id;
  bool monotone = true;
  WideSolution small;  // unrestricted side
  WideSolution big;    // side carrying the restriction
};

struct RuleError {
  std::string rule_id;
  std::string message;
};

struct ValidatedRule {
  ProteinRule rule;
  GrowthWitness witness;
  bool creation = false;       // some small group is empty (pure creation)
  bool self_bond = false;      // a rule interface ties one name twice
};

// Monotone: small |> big and big connected. Anti-monotone is the reversal.
std::variant<ValidatedRule, RuleError> validate_rule(const ProteinRule& rule);

}  // namespace biobeta
