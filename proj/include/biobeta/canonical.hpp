// Canonical representatives of structural-equivalence classes.
//
// Restriction nodes are erased: a name bound by `new` becomes a global BondId
// shared by its (at most two) occurrences, free names stay literal. Units are
// dropped and compositions flattened into multisets, so equality modulo the
// structural axioms reduces to tree equality up to a bijection of BondIds.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "biobeta/ast.hpp"

namespace biobeta {

using BondId = int32_t;

// A site/tag value carrying a link: either a global bond or a free name.
struct Link {
  enum class Kind : uint8_t { None, Bond, Name };
  Kind kind = Kind::None;
  BondId bond = -1;
  std::string name;

  static Link none() { return {}; }
  static Link of_bond(BondId b) { return Link{Kind::Bond, b, {}}; }
  static Link of_name(std::string n) { return Link{Kind::Name, -1, std::move(n)}; }
  bool is_bond() const { return kind == Kind::Bond; }
  bool is_name() const { return kind == Kind::Name; }
  bool operator==(const Link&) const = default;
  bool operator<(const Link& o) const {
    if (kind != o.kind) return kind < o.kind;
    if (kind == Kind::Bond) return bond < o.bond;
    return name < o.name;
  }
  std::string str() const;
};

struct CSite {
  SiteKind kind = SiteKind::Visible;
  Link link;  // set when kind == Bound
  bool operator==(const CSite&) const = default;
};

struct CProtein {
  std::string name;
  std::vector<CSite> sites;
  bool operator==(const CProtein&) const = default;
};

struct CFrozenCoPinch;

struct CMembrane {
  std::vector<CProtein> proteins;
  std::vector<CFrozenCoPinch> copinch;  // p'(n): S residues
  std::vector<Link> cofuse;             // f'(n) residues

  bool empty() const;
};

struct CFrozenCoPinch {
  Link tag;
  CMembrane content;
};

struct CCompartment;
struct CFrozenPinch;
struct CFrozenFuse;

struct CLocation {
  std::vector<CProtein> proteins;
  std::vector<CCompartment> cells;
  std::vector<CFrozenPinch> fpinch;  // p(n): P residues
  std::vector<CFrozenFuse> ffuse;    // f(n): [S](P) residues

  bool empty() const;
};

struct CCompartment {
  CMembrane mem;
  CLocation content;
};

struct CFrozenPinch {
  Link tag;
  CLocation content;
};

struct CFrozenFuse {
  Link tag;
  CMembrane mem;
  CLocation content;
};

struct CanonicalState {
  CLocation root;
  BondId bond_count = 0;  // bonds are numbered 0..bond_count-1
};

// Turn a term into its canonical state. On well-formed terms two inputs
// canonicalize to equal states (up to bond bijection) iff they are
// structurally equivalent; ill-formed input is accepted for diagnostics.
CanonicalState canonicalize(const SystemPtr& term);

// Re-establish deterministic child ordering and bond numbering after surgery.
void renormalize(CanonicalState& st);

// Hash invariant under bond renaming and sibling reordering.
uint64_t state_hash(const CanonicalState& st);

// Equality up to a bijection of BondIds (free names literal).
bool state_equal(const CanonicalState& a, const CanonicalState& b);

// Structural equivalence of two terms.
bool struct_equiv(const SystemPtr& a, const SystemPtr& b);

// Rebuild a term: each bond's binder is placed at the least common ancestor
// of its occurrences; canonicalize(render(s)) equals s.
SystemPtr render(const CanonicalState& st);

// Occurrence counting over links (sites and action tags alike).
struct LinkCounts {
  std::map<Link, int> counts;
  int of(const Link& l) const {
    auto it = counts.find(l);
    return it == counts.end() ? 0 : it->second;
  }
  void add(const Link& l) { ++counts[l]; }
};

LinkCounts link_counts(const CanonicalState& st);

// Visit every link occurrence (bound sites and action tags).
void for_each_link(const CLocation& loc,
                   const std::function<void(const Link&, bool is_tag, ActionKind)>& f);
void for_each_link(const CMembrane& mem,
                   const std::function<void(const Link&, bool is_tag, ActionKind)>& f);
void for_each_link_mut(CLocation& loc, const std::function<void(Link&)>& f);

// Visit every compartment occurrence (cells and frozen fuse cells),
// including those inside frozen continuations.
void for_each_compartment(const CLocation& loc,
                          const std::function<void(const CMembrane&, const CLocation&)>& f);

// The four well-formedness conditions decided directly on the canonical
// form; the engines use this to filter rewrite candidates.
bool canonical_wellformed(const CanonicalState& st, std::string* why = nullptr);

// Environment and type read off a well-formed canonical state:
// rank-1/rank-2 free names and the free-named occurring action tags.
struct CanonicalJudgement {
  std::set<std::string> rank1, rank2;
  std::set<Action> tau;
  bool operator==(const CanonicalJudgement&) const = default;
};
CanonicalJudgement canonical_judgement(const CanonicalState& st);

}  // namespace biobeta
