// Two independent well-formedness deciders: a direct checker of the four
// defining conditions and the syntax-directed type system.
#pragma once

#include <string>
#include <variant>

#include "biobeta/ast.hpp"

namespace biobeta {

struct Env {
  std::set<std::string> rank1;  // names occurring once
  std::set<std::string> rank2;  // names occurring twice

  bool operator==(const Env&) const = default;
};

struct TypeTau {
  std::set<Action> actions;
  bool operator==(const TypeTau&) const = default;
};

struct Judgement {
  Env env;
  TypeTau tau;
  bool operator==(const Judgement&) const = default;

  std::string str() const;
};

struct TypeError {
  std::string rule;      // name of the typing rule that failed
  std::string position;  // path of the offending subterm
  std::string message;
};

using TypeResult = std::variant<Judgement, TypeError>;

inline bool typed(const TypeResult& r) { return std::holds_alternative<Judgement>(r); }
inline const Judgement& judgement(const TypeResult& r) { return std::get<Judgement>(r); }
inline const TypeError& type_error(const TypeResult& r) { return std::get<TypeError>(r); }

TypeResult typecheck(const Signature& sig, const SystemPtr& term);
TypeResult typecheck(const Signature& sig, const MembranePtr& term);

// Direct decision of the four well-formedness conditions.
struct WfReport {
  struct Item {
    bool ok = true;
    std::string position;
    std::string detail;
  };
  Item graph_likeness;
  Item impermeability;
  Item action_pairing;
  Item action_prefix;

  bool ok() const {
    return graph_likeness.ok && impermeability.ok && action_pairing.ok && action_prefix.ok;
  }
  std::string str() const;
};

WfReport wf_check(const SystemPtr& term);

}  // namespace biobeta
