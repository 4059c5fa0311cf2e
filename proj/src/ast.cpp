#include "biobeta/ast.hpp"

#include <stdexcept>

namespace biobeta {

int occurrence_count(const Interface& rho, const std::string& x) {
  int n = 0;
  for (const Site& s : rho)
    if (s.kind == SiteKind::Bound && s.bond == x) ++n;
  return n;
}

ActionKind coaction(ActionKind k) {
  switch (k) {
    case ActionKind::Pinch: return ActionKind::CoPinch;
    case ActionKind::CoPinch: return ActionKind::Pinch;
    case ActionKind::Fuse: return ActionKind::CoFuse;
    case ActionKind::CoFuse: return ActionKind::Fuse;
  }
  throw std::logic_error("bad action kind");
}

const char* action_kind_name(ActionKind k) {
  switch (k) {
    case ActionKind::Pinch: return "p";
    case ActionKind::CoPinch: return "p'";
    case ActionKind::Fuse: return "f";
    case ActionKind::CoFuse: return "f'";
  }
  return "?";
}

Action coaction(const Action& a) { return Action{coaction(a.kind), a.name}; }

SystemPtr sys_empty() {
  static const SystemPtr e = std::make_shared<SystemTerm>();
  return e;
}

SystemPtr sys_protein(std::string name, Interface iface) {
  auto t = std::make_shared<SystemTerm>();
  t->kind = SystemTerm::Kind::Protein;
  t->name = std::move(name);
  t->iface = std::move(iface);
  return t;
}

SystemPtr sys_cell(MembranePtr mem, SystemPtr content) {
  auto t = std::make_shared<SystemTerm>();
  t->kind = SystemTerm::Kind::Cell;
  t->mem = std::move(mem);
  t->left = std::move(content);
  return t;
}

SystemPtr sys_par(SystemPtr a, SystemPtr b) {
  auto t = std::make_shared<SystemTerm>();
  t->kind = SystemTerm::Kind::Par;
  t->left = std::move(a);
  t->right = std::move(b);
  return t;
}

SystemPtr sys_nu(std::string name, SystemPtr body) {
  auto t = std::make_shared<SystemTerm>();
  t->kind = SystemTerm::Kind::Nu;
  t->name = std::move(name);
  t->left = std::move(body);
  return t;
}

SystemPtr sys_pinch(std::string name, SystemPtr body) {
  auto t = std::make_shared<SystemTerm>();
  t->kind = SystemTerm::Kind::PinchPrefix;
  t->name = std::move(name);
  t->left = std::move(body);
  return t;
}

SystemPtr sys_fuse(std::string name, MembranePtr mem, SystemPtr content) {
  auto t = std::make_shared<SystemTerm>();
  t->kind = SystemTerm::Kind::FusePrefix;
  t->name = std::move(name);
  t->mem = std::move(mem);
  t->left = std::move(content);
  return t;
}

MembranePtr mem_zero() {
  static const MembranePtr z = std::make_shared<MembraneTerm>();
  return z;
}

MembranePtr mem_protein(std::string name, Interface iface) {
  auto t = std::make_shared<MembraneTerm>();
  t->kind = MembraneTerm::Kind::Protein;
  t->name = std::move(name);
  t->iface = std::move(iface);
  return t;
}

MembranePtr mem_star(MembranePtr a, MembranePtr b) {
  auto t = std::make_shared<MembraneTerm>();
  t->kind = MembraneTerm::Kind::Star;
  t->left = std::move(a);
  t->right = std::move(b);
  return t;
}

MembranePtr mem_copinch(std::string name, MembranePtr body) {
  auto t = std::make_shared<MembraneTerm>();
  t->kind = MembraneTerm::Kind::CoPinchPrefix;
  t->name = std::move(name);
  t->left = std::move(body);
  return t;
}

MembranePtr mem_cofuse(std::string name) {
  auto t = std::make_shared<MembraneTerm>();
  t->kind = MembraneTerm::Kind::CoFuse;
  t->name = std::move(name);
  return t;
}

namespace {

void collect_actions(const SystemPtr& p, std::set<Action>& out);
void collect_actions(const MembranePtr& s, std::set<Action>& out);

void collect_actions(const SystemPtr& p, std::set<Action>& out) {
  switch (p->kind) {
    case SystemTerm::Kind::Empty:
    case SystemTerm::Kind::Protein:
      return;
    case SystemTerm::Kind::Cell:
      collect_actions(p->mem, out);
      collect_actions(p->left, out);
      return;
    case SystemTerm::Kind::Par:
      collect_actions(p->left, out);
      collect_actions(p->right, out);
      return;
    case SystemTerm::Kind::Nu:
      collect_actions(p->left, out);
      return;
    case SystemTerm::Kind::PinchPrefix:
      out.insert(Action{ActionKind::Pinch, p->name});
      collect_actions(p->left, out);
      return;
    case SystemTerm::Kind::FusePrefix:
      out.insert(Action{ActionKind::Fuse, p->name});
      collect_actions(p->mem, out);
      collect_actions(p->left, out);
      return;
  }
}

void collect_actions(const MembranePtr& s, std::set<Action>& out) {
  switch (s->kind) {
    case MembraneTerm::Kind::Zero:
    case MembraneTerm::Kind::Protein:
      return;
    case MembraneTerm::Kind::Star:
      collect_actions(s->left, out);
      collect_actions(s->right, out);
      return;
    case MembraneTerm::Kind::CoPinchPrefix:
      out.insert(Action{ActionKind::CoPinch, s->name});
      collect_actions(s->left, out);
      return;
    case MembraneTerm::Kind::CoFuse:
      out.insert(Action{ActionKind::CoFuse, s->name});
      return;
  }
}

void collect_free(const SystemPtr& p, std::set<std::string> bound, std::set<std::string>& out);
void collect_free(const MembranePtr& s, const std::set<std::string>& bound, std::set<std::string>& out);

void add_name(const std::string& n, const std::set<std::string>& bound, std::set<std::string>& out) {
  if (!bound.count(n)) out.insert(n);
}

void collect_free(const Interface& rho, const std::set<std::string>& bound, std::set<std::string>& out) {
  for (const Site& s : rho)
    if (s.kind == SiteKind::Bound) add_name(s.bond, bound, out);
}

void collect_free(const SystemPtr& p, std::set<std::string> bound, std::set<std::string>& out) {
  switch (p->kind) {
    case SystemTerm::Kind::Empty:
      return;
    case SystemTerm::Kind::Protein:
      collect_free(p->iface, bound, out);
      return;
    case SystemTerm::Kind::Cell:
      collect_free(p->mem, bound, out);
      collect_free(p->left, bound, out);
      return;
    case SystemTerm::Kind::Par:
      collect_free(p->left, bound, out);
      collect_free(p->right, bound, out);
      return;
    case SystemTerm::Kind::Nu:
      bound.insert(p->name);
      collect_free(p->left, std::move(bound), out);
      return;
    case SystemTerm::Kind::PinchPrefix:
      add_name(p->name, bound, out);
      collect_free(p->left, std::move(bound), out);
      return;
    case SystemTerm::Kind::FusePrefix:
      add_name(p->name, bound, out);
      collect_free(p->mem, bound, out);
      collect_free(p->left, std::move(bound), out);
      return;
  }
}

void collect_free(const MembranePtr& s, const std::set<std::string>& bound, std::set<std::string>& out) {
  switch (s->kind) {
    case MembraneTerm::Kind::Zero:
      return;
    case MembraneTerm::Kind::Protein:
      collect_free(s->iface, bound, out);
      return;
    case MembraneTerm::Kind::Star:
      collect_free(s->left, bound, out);
      collect_free(s->right, bound, out);
      return;
    case MembraneTerm::Kind::CoPinchPrefix:
      add_name(s->name, bound, out);
      collect_free(s->left, bound, out);
      return;
    case MembraneTerm::Kind::CoFuse:
      add_name(s->name, bound, out);
      return;
  }
}

}  // namespace

std::set<Action> occurring_actions(const SystemPtr& p) {
  std::set<Action> out;
  collect_actions(p, out);
  return out;
}

std::set<Action> occurring_actions(const MembranePtr& s) {
  std::set<Action> out;
  collect_actions(s, out);
  return out;
}

std::set<std::string> free_names(const SystemPtr& p) {
  std::set<std::string> out;
  collect_free(p, {}, out);
  return out;
}

std::set<std::string> free_names(const MembranePtr& s) {
  std::set<std::string> out;
  collect_free(s, {}, out);
  return out;
}

std::set<std::string> free_names(const Interface& rho) {
  std::set<std::string> out;
  collect_free(rho, {}, out);
  return out;
}

bool same_term(const SystemPtr& a, const SystemPtr& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->name != b->name || a->iface != b->iface) return false;
  if ((a->mem != nullptr) != (b->mem != nullptr)) return false;
  if (a->mem && !same_term(a->mem, b->mem)) return false;
  if ((a->left != nullptr) != (b->left != nullptr)) return false;
  if (a->left && !same_term(a->left, b->left)) return false;
  if ((a->right != nullptr) != (b->right != nullptr)) return false;
  if (a->right && !same_term(a->right, b->right)) return false;
  return true;
}

bool same_term(const MembranePtr& a, const MembranePtr& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->name != b->name || a->iface != b->iface) return false;
  if ((a->left != nullptr) != (b->left != nullptr)) return false;
  if (a->left && !same_term(a->left, b->left)) return false;
  if ((a->right != nullptr) != (b->right != nullptr)) return false;
  if (a->right && !same_term(a->right, b->right)) return false;
  return true;
}

namespace {

std::optional<std::string> check_protein(const Signature& sig, const std::string& name,
                                         const Interface& iface, Polarity expected) {
  const Signature::Entry* e = sig.find(name);
  if (!e) return "unknown protein '" + name + "'";
  if (e->polarity != expected)
    return std::string("protein '") + name + "' used in " +
           (expected == Polarity::Polar ? "system" : "membrane") + " position but declared " +
           (e->polarity == Polarity::Polar ? "polar" : "apolar");
  if ((int)iface.size() != e->arity)
    return "protein '" + name + "' has " + std::to_string(iface.size()) + " sites, signature says " +
           std::to_string(e->arity);
  return std::nullopt;
}

}  // namespace

std::optional<std::string> signature_check(const Signature& sig, const SystemPtr& p) {
  switch (p->kind) {
    case SystemTerm::Kind::Empty:
      return std::nullopt;
    case SystemTerm::Kind::Protein:
      return check_protein(sig, p->name, p->iface, Polarity::Polar);
    case SystemTerm::Kind::Cell:
      if (auto e = signature_check(sig, p->mem)) return e;
      return signature_check(sig, p->left);
    case SystemTerm::Kind::Par:
      if (auto e = signature_check(sig, p->left)) return e;
      return signature_check(sig, p->right);
    case SystemTerm::Kind::Nu:
    case SystemTerm::Kind::PinchPrefix:
      return signature_check(sig, p->left);
    case SystemTerm::Kind::FusePrefix:
      if (auto e = signature_check(sig, p->mem)) return e;
      return signature_check(sig, p->left);
  }
  return std::nullopt;
}

std::optional<std::string> signature_check(const Signature& sig, const MembranePtr& s) {
  switch (s->kind) {
    case MembraneTerm::Kind::Zero:
    case MembraneTerm::Kind::CoFuse:
      return std::nullopt;
    case MembraneTerm::Kind::Protein:
      return check_protein(sig, s->name, s->iface, Polarity::Apolar);
    case MembraneTerm::Kind::Star:
      if (auto e = signature_check(sig, s->left)) return e;
      return signature_check(sig, s->right);
    case MembraneTerm::Kind::CoPinchPrefix:
      return signature_check(sig, s->left);
  }
  return std::nullopt;
}

std::string NamePool::fresh() {
  for (;;) {
    std::string candidate = "n" + std::to_string(counter_++);
    if (used_.insert(candidate).second) return candidate;
  }
}

}  // namespace biobeta
