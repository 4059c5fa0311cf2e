// Term language for protein/membrane systems: signatures, interfaces,
// system and membrane terms, mobility actions, free names and name pools.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace biobeta {

enum class Polarity : uint8_t { Polar, Apolar };

// Protein signature: name -> (polarity, number of domain sites).
struct Signature {
  struct Entry {
    Polarity polarity = Polarity::Polar;
    int arity = 1;
  };
  std::map<std::string, Entry> entries;

  const Entry* find(const std::string& name) const {
    auto it = entries.find(name);
    return it == entries.end() ? nullptr : &it->second;
  }
  bool has(const std::string& name) const { return entries.count(name) != 0; }
};

// One domain site: visible, hidden, or tied to an edge name.
enum class SiteKind : uint8_t { Visible, Hidden, Bound };

struct Site {
  SiteKind kind = SiteKind::Visible;
  std::string bond;  // meaningful only when kind == Bound

  bool operator==(const Site&) const = default;
};

// Interfaces are total over 1..arity; sites[i] is site i+1.
using Interface = std::vector<Site>;

// Number of sites of `rho` tied to `x`.
int occurrence_count(const Interface& rho, const std::string& x);

enum class ActionKind : uint8_t { Pinch, CoPinch, Fuse, CoFuse };

ActionKind coaction(ActionKind k);
const char* action_kind_name(ActionKind k);

struct Action {
  ActionKind kind;
  std::string name;

  auto operator<=>(const Action&) const = default;
};

Action coaction(const Action& a);

struct SystemTerm;
struct MembraneTerm;
using SystemPtr = std::shared_ptr<const SystemTerm>;
using MembranePtr = std::shared_ptr<const MembraneTerm>;

// Systems: <> | A(rho) | [S](P) | P * Q | new n. P | p(n): P | f(n): [S](P)
struct SystemTerm {
  enum class Kind : uint8_t { Empty, Protein, Cell, Par, Nu, PinchPrefix, FusePrefix };
  Kind kind = Kind::Empty;
  std::string name;    // protein name, bound name (Nu) or action name (prefixes)
  Interface iface;     // Protein
  MembranePtr mem;     // Cell, FusePrefix
  SystemPtr left;      // Par lhs; body of Cell/Nu/PinchPrefix/FusePrefix
  SystemPtr right;     // Par rhs
};

// Membranes: 0 | A(rho) | S , T | p'(n): S | f'(n)
struct MembraneTerm {
  enum class Kind : uint8_t { Zero, Protein, Star, CoPinchPrefix, CoFuse };
  Kind kind = Kind::Zero;
  std::string name;
  Interface iface;
  MembranePtr left;    // Star lhs; body of CoPinchPrefix
  MembranePtr right;   // Star rhs
};

SystemPtr sys_empty();
SystemPtr sys_protein(std::string name, Interface iface);
SystemPtr sys_cell(MembranePtr mem, SystemPtr content);
SystemPtr sys_par(SystemPtr a, SystemPtr b);
SystemPtr sys_nu(std::string name, SystemPtr body);
SystemPtr sys_pinch(std::string name, SystemPtr body);
SystemPtr sys_fuse(std::string name, MembranePtr mem, SystemPtr content);

MembranePtr mem_zero();
MembranePtr mem_protein(std::string name, Interface iface);
MembranePtr mem_star(MembranePtr a, MembranePtr b);
MembranePtr mem_copinch(std::string name, MembranePtr body);
MembranePtr mem_cofuse(std::string name);

// Occurring actions act(P) / act(S). Restriction does not remove actions.
std::set<Action> occurring_actions(const SystemPtr& p);
std::set<Action> occurring_actions(const MembranePtr& s);

// Free names; `new` is the only binder, action subscripts count as occurrences.
std::set<std::string> free_names(const SystemPtr& p);
std::set<std::string> free_names(const MembranePtr& s);
std::set<std::string> free_names(const Interface& rho);

// Structural equality of trees (not structural congruence).
bool same_term(const SystemPtr& a, const SystemPtr& b);
bool same_term(const MembranePtr& a, const MembranePtr& b);

// Signature conformance: every protein known, right polarity, right arity.
// Returns an error message, or nullopt when the term is signature-closed.
std::optional<std::string> signature_check(const Signature& sig, const SystemPtr& p);
std::optional<std::string> signature_check(const Signature& sig, const MembranePtr& s);

// Deterministic source of names not yet used in the session.
class NamePool {
 public:
  NamePool() = default;
  explicit NamePool(std::set<std::string> used) : used_(std::move(used)) {}

  void reserve(const std::string& name) { used_.insert(name); }
  void reserve(const std::set<std::string>& names) { used_.insert(names.begin(), names.end()); }

  // Next unused name of the form n0, n1, ...
  std::string fresh();

 private:
  std::set<std::string> used_;
  unsigned counter_ = 0;
};

}  // namespace biobeta
