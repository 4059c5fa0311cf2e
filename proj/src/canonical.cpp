#include "biobeta/canonical.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace biobeta {

bool CMembrane::empty() const { return proteins.empty() && copinch.empty() && cofuse.empty(); }

bool CLocation::empty() const {
  return proteins.empty() && cells.empty() && fpinch.empty() && ffuse.empty();
}

std::string Link::str() const {
  switch (kind) {
    case Kind::None: return "-";
    case Kind::Bond: return "#" + std::to_string(bond);
    case Kind::Name: return name;
  }
  return "-";
}

// ---------------------------------------------------------------------------
// Construction from terms

namespace {

struct Scope {
  std::vector<std::pair<std::string, BondId>> bound;

  Link resolve(const std::string& n) const {
    for (auto it = bound.rbegin(); it != bound.rend(); ++it)
      if (it->first == n) return Link::of_bond(it->second);
    return Link::of_name(n);
  }
};

struct TermLowering {
  BondId next_bond = 0;

  CSite lower_site(const Site& s, const Scope& sc) {
    CSite out;
    out.kind = s.kind;
    if (s.kind == SiteKind::Bound) out.link = sc.resolve(s.bond);
    return out;
  }

  CProtein lower_protein(const std::string& name, const Interface& iface, const Scope& sc) {
    CProtein p;
    p.name = name;
    for (const Site& s : iface) p.sites.push_back(lower_site(s, sc));
    return p;
  }

  void lower_mem(const MembranePtr& m, const Scope& sc, CMembrane& out) {
    switch (m->kind) {
      case MembraneTerm::Kind::Zero:
        return;
      case MembraneTerm::Kind::Protein:
        out.proteins.push_back(lower_protein(m->name, m->iface, sc));
        return;
      case MembraneTerm::Kind::Star:
        lower_mem(m->left, sc, out);
        lower_mem(m->right, sc, out);
        return;
      case MembraneTerm::Kind::CoPinchPrefix: {
        CFrozenCoPinch fz;
        fz.tag = sc.resolve(m->name);
        lower_mem(m->left, sc, fz.content);
        out.copinch.push_back(std::move(fz));
        return;
      }
      case MembraneTerm::Kind::CoFuse:
        out.cofuse.push_back(sc.resolve(m->name));
        return;
    }
  }

  void lower_sys(const SystemPtr& p, Scope sc, CLocation& out) {
    switch (p->kind) {
      case SystemTerm::Kind::Empty:
        return;
      case SystemTerm::Kind::Protein:
        out.proteins.push_back(lower_protein(p->name, p->iface, sc));
        return;
      case SystemTerm::Kind::Cell: {
        CCompartment c;
        lower_mem(p->mem, sc, c.mem);
        lower_sys(p->left, sc, c.content);
        out.cells.push_back(std::move(c));
        return;
      }
      case SystemTerm::Kind::Par:
        lower_sys(p->left, sc, out);
        lower_sys(p->right, sc, out);
        return;
      case SystemTerm::Kind::Nu: {
        sc.bound.emplace_back(p->name, next_bond++);
        lower_sys(p->left, std::move(sc), out);
        return;
      }
      case SystemTerm::Kind::PinchPrefix: {
        CFrozenPinch fz;
        fz.tag = sc.resolve(p->name);
        lower_sys(p->left, sc, fz.content);
        out.fpinch.push_back(std::move(fz));
        return;
      }
      case SystemTerm::Kind::FusePrefix: {
        CFrozenFuse fz;
        fz.tag = sc.resolve(p->name);
        lower_mem(p->mem, sc, fz.mem);
        lower_sys(p->left, sc, fz.content);
        out.ffuse.push_back(std::move(fz));
        return;
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Masked canonical strings: bond identity erased, siblings sorted.

std::string ms_tag(const Link& l) { return l.is_name() ? l.name : std::string("?"); }

std::string ms_protein(const CProtein& p) {
  std::string out = p.name + "(";
  for (const CSite& s : p.sites) {
    switch (s.kind) {
      case SiteKind::Visible: out += "v"; break;
      case SiteKind::Hidden: out += "h"; break;
      case SiteKind::Bound: out += "!" + ms_tag(s.link); break;
    }
    out += ",";
  }
  out += ")";
  return out;
}

std::string ms_loc(const CLocation& loc);

std::string ms_mem(const CMembrane& m) {
  std::vector<std::string> parts;
  for (const auto& p : m.proteins) parts.push_back(ms_protein(p));
  for (const auto& fz : m.copinch) parts.push_back("p'" + ms_tag(fz.tag) + ":" + ms_mem(fz.content));
  for (const auto& t : m.cofuse) parts.push_back("f'" + ms_tag(t));
  std::sort(parts.begin(), parts.end());
  std::string out = "{";
  for (auto& s : parts) out += s + ";";
  return out + "}";
}

std::string ms_cell(const CCompartment& c) { return "[" + ms_mem(c.mem) + "]" + ms_loc(c.content); }

std::string ms_fpinch(const CFrozenPinch& fz) { return "p" + ms_tag(fz.tag) + ":" + ms_loc(fz.content); }

std::string ms_ffuse(const CFrozenFuse& fz) {
  return "f" + ms_tag(fz.tag) + ":[" + ms_mem(fz.mem) + "]" + ms_loc(fz.content);
}

std::string ms_loc(const CLocation& loc) {
  std::vector<std::string> parts;
  for (const auto& p : loc.proteins) parts.push_back(ms_protein(p));
  for (const auto& c : loc.cells) parts.push_back(ms_cell(c));
  for (const auto& fz : loc.fpinch) parts.push_back(ms_fpinch(fz));
  for (const auto& fz : loc.ffuse) parts.push_back(ms_ffuse(fz));
  std::sort(parts.begin(), parts.end());
  std::string out = "(";
  for (auto& s : parts) out += s + ";";
  return out + ")";
}

template <class T, class KeyFn>
void sort_by_key(std::vector<T>& v, KeyFn key) {
  std::vector<std::pair<std::string, size_t>> order;
  order.reserve(v.size());
  for (size_t i = 0; i < v.size(); ++i) order.emplace_back(key(v[i]), i);
  std::stable_sort(order.begin(), order.end());
  std::vector<T> out;
  out.reserve(v.size());
  for (auto& [k, i] : order) out.push_back(std::move(v[i]));
  v = std::move(out);
}

void sort_mem(CMembrane& m) {
  for (auto& fz : m.copinch) sort_mem(fz.content);
  sort_by_key(m.proteins, [](const CProtein& p) { return ms_protein(p); });
  sort_by_key(m.copinch, [](const CFrozenCoPinch& f) { return "p'" + ms_tag(f.tag) + ":" + ms_mem(f.content); });
  std::sort(m.cofuse.begin(), m.cofuse.end(),
            [](const Link& a, const Link& b) { return ms_tag(a) < ms_tag(b); });
}

void sort_loc(CLocation& loc) {
  for (auto& c : loc.cells) {
    sort_mem(c.mem);
    sort_loc(c.content);
  }
  for (auto& fz : loc.fpinch) sort_loc(fz.content);
  for (auto& fz : loc.ffuse) {
    sort_mem(fz.mem);
    sort_loc(fz.content);
  }
  sort_by_key(loc.proteins, [](const CProtein& p) { return ms_protein(p); });
  sort_by_key(loc.cells, [](const CCompartment& c) { return ms_cell(c); });
  sort_by_key(loc.fpinch, [](const CFrozenPinch& f) { return ms_fpinch(f); });
  sort_by_key(loc.ffuse, [](const CFrozenFuse& f) { return ms_ffuse(f); });
}

void visit_links_mem(const CMembrane& m,
                     const std::function<void(const Link&, bool, ActionKind)>& f) {
  for (const auto& p : m.proteins)
    for (const auto& s : p.sites)
      if (s.kind == SiteKind::Bound) f(s.link, false, ActionKind::Pinch);
  for (const auto& fz : m.copinch) {
    f(fz.tag, true, ActionKind::CoPinch);
    visit_links_mem(fz.content, f);
  }
  for (const auto& t : m.cofuse) f(t, true, ActionKind::CoFuse);
}

void visit_links_loc(const CLocation& loc,
                     const std::function<void(const Link&, bool, ActionKind)>& f) {
  for (const auto& p : loc.proteins)
    for (const auto& s : p.sites)
      if (s.kind == SiteKind::Bound) f(s.link, false, ActionKind::Pinch);
  for (const auto& c : loc.cells) {
    visit_links_mem(c.mem, f);
    visit_links_loc(c.content, f);
  }
  for (const auto& fz : loc.fpinch) {
    f(fz.tag, true, ActionKind::Pinch);
    visit_links_loc(fz.content, f);
  }
  for (const auto& fz : loc.ffuse) {
    f(fz.tag, true, ActionKind::Fuse);
    visit_links_mem(fz.mem, f);
    visit_links_loc(fz.content, f);
  }
}

void visit_links_mem_mut(CMembrane& m, const std::function<void(Link&)>& f) {
  for (auto& p : m.proteins)
    for (auto& s : p.sites)
      if (s.kind == SiteKind::Bound) f(s.link);
  for (auto& fz : m.copinch) {
    f(fz.tag);
    visit_links_mem_mut(fz.content, f);
  }
  for (auto& t : m.cofuse) f(t);
}

void visit_links_loc_mut(CLocation& loc, const std::function<void(Link&)>& f) {
  for (auto& p : loc.proteins)
    for (auto& s : p.sites)
      if (s.kind == SiteKind::Bound) f(s.link);
  for (auto& c : loc.cells) {
    visit_links_mem_mut(c.mem, f);
    visit_links_loc_mut(c.content, f);
  }
  for (auto& fz : loc.fpinch) {
    f(fz.tag);
    visit_links_loc_mut(fz.content, f);
  }
  for (auto& fz : loc.ffuse) {
    f(fz.tag);
    visit_links_mem_mut(fz.mem, f);
    visit_links_loc_mut(fz.content, f);
  }
}

uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t str_hash(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

void for_each_link(const CLocation& loc,
                   const std::function<void(const Link&, bool, ActionKind)>& f) {
  visit_links_loc(loc, f);
}

void for_each_link(const CMembrane& mem,
                   const std::function<void(const Link&, bool, ActionKind)>& f) {
  visit_links_mem(mem, f);
}

void for_each_link_mut(CLocation& loc, const std::function<void(Link&)>& f) {
  visit_links_loc_mut(loc, f);
}

namespace {

void visit_compartments(const CLocation& loc,
                        const std::function<void(const CMembrane&, const CLocation&)>& f) {
  for (const auto& c : loc.cells) {
    f(c.mem, c.content);
    visit_compartments(c.content, f);
  }
  for (const auto& fz : loc.fpinch) visit_compartments(fz.content, f);
  for (const auto& fz : loc.ffuse) {
    f(fz.mem, fz.content);
    visit_compartments(fz.content, f);
  }
}

}  // namespace

void for_each_compartment(const CLocation& loc,
                          const std::function<void(const CMembrane&, const CLocation&)>& f) {
  visit_compartments(loc, f);
}

void renormalize(CanonicalState& st) {
  sort_loc(st.root);
  std::map<BondId, BondId> renum;
  BondId next = 0;
  visit_links_loc_mut(st.root, [&](Link& l) {
    if (!l.is_bond()) return;
    auto it = renum.find(l.bond);
    if (it == renum.end()) it = renum.emplace(l.bond, next++).first;
    l.bond = it->second;
  });
  st.bond_count = next;
}

CanonicalState canonicalize(const SystemPtr& term) {
  CanonicalState st;
  TermLowering lowering;
  lowering.lower_sys(term, Scope{}, st.root);
  renormalize(st);
  return st;
}

uint64_t state_hash(const CanonicalState& st) {
  uint64_t h = str_hash(ms_loc(st.root));
  // one refinement pass: fold in bond endpoint descriptors
  struct Occ {
    uint64_t owner;
    int pos;
  };
  std::map<BondId, std::vector<Occ>> occs;
  // owner hashes: protein masked string; tags use kind marker only
  std::function<void(const CMembrane&)> walk_mem = [&](const CMembrane& m) {
    for (const auto& p : m.proteins) {
      uint64_t oh = str_hash(ms_protein(p));
      for (size_t i = 0; i < p.sites.size(); ++i)
        if (p.sites[i].kind == SiteKind::Bound && p.sites[i].link.is_bond())
          occs[p.sites[i].link.bond].push_back({oh, (int)i});
    }
    for (const auto& fz : m.copinch) {
      if (fz.tag.is_bond()) occs[fz.tag.bond].push_back({str_hash("p'"), -1});
      walk_mem(fz.content);
    }
    for (const auto& t : m.cofuse)
      if (t.is_bond()) occs[t.bond].push_back({str_hash("f'"), -1});
  };
  std::function<void(const CLocation&)> walk_loc = [&](const CLocation& loc) {
    for (const auto& p : loc.proteins) {
      uint64_t oh = str_hash(ms_protein(p));
      for (size_t i = 0; i < p.sites.size(); ++i)
        if (p.sites[i].kind == SiteKind::Bound && p.sites[i].link.is_bond())
          occs[p.sites[i].link.bond].push_back({oh, (int)i});
    }
    for (const auto& c : loc.cells) {
      walk_mem(c.mem);
      walk_loc(c.content);
    }
    for (const auto& fz : loc.fpinch) {
      if (fz.tag.is_bond()) occs[fz.tag.bond].push_back({str_hash("p"), -1});
      walk_loc(fz.content);
    }
    for (const auto& fz : loc.ffuse) {
      if (fz.tag.is_bond()) occs[fz.tag.bond].push_back({str_hash("f"), -1});
      walk_mem(fz.mem);
      walk_loc(fz.content);
    }
  };
  walk_loc(st.root);
  for (auto& [bond, v] : occs) {
    uint64_t a = 0, b = 0;
    for (const Occ& o : v) {
      uint64_t d = mix64(o.owner ^ mix64((uint64_t)(o.pos + 7)));
      a += d;          // order-insensitive
      b ^= mix64(d);
    }
    h += mix64(a ^ b);
  }
  return h;
}

// ---------------------------------------------------------------------------
// Equality up to bond bijection

namespace {

struct Bijection {
  std::map<BondId, BondId> a2b, b2a;
  std::vector<BondId> trail;

  size_t mark() const { return trail.size(); }
  void rollback(size_t m) {
    while (trail.size() > m) {
      BondId x = trail.back();
      trail.pop_back();
      auto it = a2b.find(x);
      b2a.erase(it->second);
      a2b.erase(it);
    }
  }
  bool map(BondId x, BondId y) {
    auto it = a2b.find(x);
    if (it != a2b.end()) return it->second == y;
    if (b2a.count(y)) return false;
    a2b[x] = y;
    b2a[y] = x;
    trail.push_back(x);
    return true;
  }
};

using Cont = std::function<bool()>;

bool match_link(const Link& a, const Link& b, Bijection& bij) {
  if (a.kind != b.kind) return false;
  if (a.is_name()) return a.name == b.name;
  if (a.is_bond()) return bij.map(a.bond, b.bond);
  return true;
}

bool match_protein(const CProtein& a, const CProtein& b, Bijection& bij) {
  if (a.name != b.name || a.sites.size() != b.sites.size()) return false;
  for (size_t i = 0; i < a.sites.size(); ++i) {
    if (a.sites[i].kind != b.sites[i].kind) return false;
    if (a.sites[i].kind == SiteKind::Bound && !match_link(a.sites[i].link, b.sites[i].link, bij))
      return false;
  }
  return true;
}

// Matches multiset A against B with backtracking; elem matches one pair and
// calls its continuation, keys prune candidates.
template <class T>
bool match_multiset(const std::vector<T>& A, const std::vector<T>& B, Bijection& bij,
                    const std::function<std::string(const T&)>& key,
                    const std::function<bool(const T&, const T&, Bijection&, const Cont&)>& elem,
                    const Cont& k) {
  if (A.size() != B.size()) return false;
  size_t n = A.size();
  std::vector<std::string> ka(n), kb(n);
  for (size_t i = 0; i < n; ++i) {
    ka[i] = key(A[i]);
    kb[i] = key(B[i]);
  }
  {
    auto sa = ka, sb = kb;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return false;
  }
  std::vector<bool> used(n, false);
  std::function<bool(size_t)> rec = [&](size_t i) -> bool {
    if (i == n) return k();
    for (size_t j = 0; j < n; ++j) {
      if (used[j] || ka[i] != kb[j]) continue;
      size_t m = bij.mark();
      used[j] = true;
      if (elem(A[i], B[j], bij, [&] { return rec(i + 1); })) return true;
      used[j] = false;
      bij.rollback(m);
    }
    return false;
  };
  return rec(0);
}

bool match_mem(const CMembrane& a, const CMembrane& b, Bijection& bij, const Cont& k);
bool match_loc(const CLocation& a, const CLocation& b, Bijection& bij, const Cont& k);

bool match_mem(const CMembrane& a, const CMembrane& b, Bijection& bij, const Cont& k) {
  return match_multiset<CProtein>(
      a.proteins, b.proteins, bij, [](const CProtein& p) { return ms_protein(p); },
      [](const CProtein& x, const CProtein& y, Bijection& bj, const Cont& kk) {
        return match_protein(x, y, bj) && kk();
      },
      [&] {
        return match_multiset<CFrozenCoPinch>(
            a.copinch, b.copinch, bij,
            [](const CFrozenCoPinch& f) { return "p'" + ms_tag(f.tag) + ":" + ms_mem(f.content); },
            [](const CFrozenCoPinch& x, const CFrozenCoPinch& y, Bijection& bj, const Cont& kk) {
              return match_link(x.tag, y.tag, bj) && match_mem(x.content, y.content, bj, kk);
            },
            [&] {
              return match_multiset<Link>(
                  a.cofuse, b.cofuse, bij, [](const Link& l) { return ms_tag(l); },
                  [](const Link& x, const Link& y, Bijection& bj, const Cont& kk) {
                    return match_link(x, y, bj) && kk();
                  },
                  k);
            });
      });
}

bool match_loc(const CLocation& a, const CLocation& b, Bijection& bij, const Cont& k) {
  return match_multiset<CProtein>(
      a.proteins, b.proteins, bij, [](const CProtein& p) { return ms_protein(p); },
      [](const CProtein& x, const CProtein& y, Bijection& bj, const Cont& kk) {
        return match_protein(x, y, bj) && kk();
      },
      [&] {
        return match_multiset<CCompartment>(
            a.cells, b.cells, bij, [](const CCompartment& c) { return ms_cell(c); },
            [](const CCompartment& x, const CCompartment& y, Bijection& bj, const Cont& kk) {
              return match_mem(x.mem, y.mem, bj,
                               [&] { return match_loc(x.content, y.content, bj, kk); });
            },
            [&] {
              return match_multiset<CFrozenPinch>(
                  a.fpinch, b.fpinch, bij, [](const CFrozenPinch& f) { return ms_fpinch(f); },
                  [](const CFrozenPinch& x, const CFrozenPinch& y, Bijection& bj, const Cont& kk) {
                    return match_link(x.tag, y.tag, bj) && match_loc(x.content, y.content, bj, kk);
                  },
                  [&] {
                    return match_multiset<CFrozenFuse>(
                        a.ffuse, b.ffuse, bij, [](const CFrozenFuse& f) { return ms_ffuse(f); },
                        [](const CFrozenFuse& x, const CFrozenFuse& y, Bijection& bj,
                           const Cont& kk) {
                          return match_link(x.tag, y.tag, bj) &&
                                 match_mem(x.mem, y.mem, bj, [&] {
                                   return match_loc(x.content, y.content, bj, kk);
                                 });
                        },
                        k);
                  });
            });
      });
}

}  // namespace

bool state_equal(const CanonicalState& a, const CanonicalState& b) {
  if (a.bond_count != b.bond_count) return false;
  Bijection bij;
  return match_loc(a.root, b.root, bij, [] { return true; });
}

bool struct_equiv(const SystemPtr& a, const SystemPtr& b) {
  return state_equal(canonicalize(a), canonicalize(b));
}

// ---------------------------------------------------------------------------
// Link counting, well-formedness, judgement

LinkCounts link_counts(const CanonicalState& st) {
  LinkCounts lc;
  visit_links_loc(st.root, [&](const Link& l, bool, ActionKind) { lc.add(l); });
  return lc;
}

namespace {

// act() of a canonical fragment is empty iff it contains no residues at all.
bool mem_action_free(const CMembrane& m) {
  if (!m.copinch.empty() || !m.cofuse.empty()) return false;
  return true;
}

bool loc_action_free(const CLocation& loc) {
  if (!loc.fpinch.empty() || !loc.ffuse.empty()) return false;
  for (const auto& c : loc.cells)
    if (!mem_action_free(c.mem) || !loc_action_free(c.content)) return false;
  return true;
}

bool frozen_continuations_action_free(const CLocation& loc, std::string* why) {
  bool ok = true;
  std::function<void(const CLocation&)> walk = [&](const CLocation& l) {
    for (const auto& fz : l.fpinch) {
      if (!loc_action_free(fz.content)) {
        ok = false;
        if (why) *why = "action under pinch prefix " + fz.tag.str();
      }
      walk(fz.content);
    }
    for (const auto& fz : l.ffuse) {
      if (!mem_action_free(fz.mem) || !loc_action_free(fz.content)) {
        ok = false;
        if (why) *why = "action under fuse prefix " + fz.tag.str();
      }
      walk(fz.content);
    }
    for (const auto& c : l.cells) {
      for (const auto& cp : c.mem.copinch) {
        if (!mem_action_free(cp.content)) {
          ok = false;
          if (why) *why = "action under co-pinch prefix " + cp.tag.str();
        }
      }
      walk(c.content);
    }
  };
  walk(loc);
  return ok;
}

void count_links_mem(const CMembrane& m, LinkCounts& lc) {
  visit_links_mem(m, [&](const Link& l, bool, ActionKind) { lc.add(l); });
}

void count_links_loc(const CLocation& loc, LinkCounts& lc) {
  visit_links_loc(loc, [&](const Link& l, bool, ActionKind) { lc.add(l); });
}

}  // namespace

bool canonical_wellformed(const CanonicalState& st, std::string* why) {
  // graph-likeness + action pairing from global occurrence classification
  struct Uses {
    int sites = 0;
    std::vector<ActionKind> tags;
  };
  std::map<Link, Uses> uses;
  visit_links_loc(st.root, [&](const Link& l, bool is_tag, ActionKind k) {
    Uses& u = uses[l];
    if (is_tag)
      u.tags.push_back(k);
    else
      ++u.sites;
  });
  for (auto& [link, u] : uses) {
    int total = u.sites + (int)u.tags.size();
    if (total > 2) {
      if (why) *why = "link " + link.str() + " occurs " + std::to_string(total) + " times";
      return false;
    }
    if (link.is_bond() && total == 1) {
      if (why) *why = "restriction ties a single occurrence of " + link.str();
      return false;
    }
    if (!u.tags.empty()) {
      if (u.sites > 0) {
        if (why) *why = "name " + link.str() + " shared between an action and an interface";
        return false;
      }
      if (u.tags.size() == 2 && u.tags[1] != coaction(u.tags[0])) {
        if (why) *why = "actions on " + link.str() + " are not a dual pair";
        return false;
      }
    }
  }
  // impermeability, on every compartment occurrence
  bool ok = true;
  visit_compartments(st.root, [&](const CMembrane& mem, const CLocation& content) {
    if (!ok) return;
    LinkCounts in_content, in_mem;
    count_links_loc(content, in_content);
    count_links_mem(mem, in_mem);
    for (auto& [l, n] : in_content.counts) {
      if (n == 1 && in_mem.of(l) == 0) {
        ok = false;
        if (why) *why = "content link " + l.str() + " not anchored in the membrane";
        return;
      }
    }
  });
  if (!ok) return false;
  // action prefix: frozen continuations are action-free
  if (!frozen_continuations_action_free(st.root, why)) return false;
  return true;
}

CanonicalJudgement canonical_judgement(const CanonicalState& st) {
  CanonicalJudgement j;
  std::map<std::string, int> name_count;
  visit_links_loc(st.root, [&](const Link& l, bool is_tag, ActionKind k) {
    if (!l.is_name()) return;
    ++name_count[l.name];
    if (is_tag) j.tau.insert(Action{k, l.name});
  });
  for (auto& [n, c] : name_count) {
    if (c == 1)
      j.rank1.insert(n);
    else
      j.rank2.insert(n);
  }
  return j;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

// Scope-tree node ids for binder placement. Every location, cell and frozen
// fuse gets an id; membranes attribute occurrences to their owner.
struct ScopeTree {
  struct Node {
    int parent = -1;
    enum class Kind : uint8_t { Location, Cell, Fuse } kind = Kind::Location;
    const void* ptr = nullptr;
  };
  std::vector<Node> nodes;
  std::map<const void*, int> by_ptr;
  std::map<BondId, std::vector<int>> bond_nodes;

  int add(int parent, Node::Kind k, const void* p) {
    nodes.push_back({parent, k, p});
    by_ptr[p] = (int)nodes.size() - 1;
    return (int)nodes.size() - 1;
  }
  int depth(int n) const {
    int d = 0;
    while (n >= 0) {
      n = nodes[n].parent;
      ++d;
    }
    return d;
  }
  int lca(int x, int y) const {
    int dx = depth(x), dy = depth(y);
    while (dx > dy) {
      x = nodes[x].parent;
      --dx;
    }
    while (dy > dx) {
      y = nodes[y].parent;
      --dy;
    }
    while (x != y) {
      x = nodes[x].parent;
      y = nodes[y].parent;
    }
    return x;
  }
};

struct Renderer {
  const CanonicalState& st;
  ScopeTree tree;
  std::map<BondId, std::string> bond_name;
  std::map<int, std::vector<BondId>> binders;  // scope node -> bonds bound there

  explicit Renderer(const CanonicalState& s) : st(s) {}

  void note_bond(const Link& l, int node) {
    if (l.is_bond()) tree.bond_nodes[l.bond].push_back(node);
  }

  void index_mem(const CMembrane& m, int owner) {
    for (const auto& p : m.proteins)
      for (const auto& s : p.sites)
        if (s.kind == SiteKind::Bound) note_bond(s.link, owner);
    for (const auto& fz : m.copinch) {
      note_bond(fz.tag, owner);
      index_mem(fz.content, owner);
    }
    for (const auto& t : m.cofuse) note_bond(t, owner);
  }

  void index_loc(const CLocation& loc, int node) {
    for (const auto& p : loc.proteins)
      for (const auto& s : p.sites)
        if (s.kind == SiteKind::Bound) note_bond(s.link, node);
    for (const auto& c : loc.cells) {
      int cn = tree.add(node, ScopeTree::Node::Kind::Cell, &c);
      index_mem(c.mem, cn);
      int inner = tree.add(cn, ScopeTree::Node::Kind::Location, &c.content);
      index_loc(c.content, inner);
    }
    for (const auto& fz : loc.fpinch) {
      note_bond(fz.tag, node);
      int inner = tree.add(node, ScopeTree::Node::Kind::Location, &fz.content);
      index_loc(fz.content, inner);
    }
    for (const auto& fz : loc.ffuse) {
      note_bond(fz.tag, node);
      int fn = tree.add(node, ScopeTree::Node::Kind::Fuse, &fz);
      index_mem(fz.mem, fn);
      int inner = tree.add(fn, ScopeTree::Node::Kind::Location, &fz.content);
      index_loc(fz.content, inner);
    }
  }

  void place_binders() {
    for (auto& [bond, where] : tree.bond_nodes) {
      int at = where[0];
      for (size_t i = 1; i < where.size(); ++i) at = tree.lca(at, where[i]);
      // binders live on locations, cells or fuse prefixes; all are valid hooks
      binders[at].push_back(bond);
    }
    for (auto& [node, v] : binders) std::sort(v.begin(), v.end());
  }

  std::string link_name(const Link& l) const {
    if (l.is_name()) return l.name;
    return bond_name.at(l.bond);
  }

  Interface iface_of(const CProtein& p) const {
    Interface out;
    for (const auto& s : p.sites) {
      Site site;
      site.kind = s.kind;
      if (s.kind == SiteKind::Bound) site.bond = link_name(s.link);
      out.push_back(site);
    }
    return out;
  }

  SystemPtr wrap_binders(const void* ptr, SystemPtr t) const {
    auto it = tree.by_ptr.find(ptr);
    if (it == tree.by_ptr.end()) return t;
    auto bs = binders.find(it->second);
    if (bs == binders.end()) return t;
    for (auto b = bs->second.rbegin(); b != bs->second.rend(); ++b)
      t = sys_nu(bond_name.at(*b), std::move(t));
    return t;
  }

  MembranePtr render_mem(const CMembrane& m) const {
    std::vector<MembranePtr> parts;
    for (const auto& p : m.proteins) parts.push_back(mem_protein(p.name, iface_of(p)));
    for (const auto& fz : m.copinch)
      parts.push_back(mem_copinch(link_name(fz.tag), render_mem(fz.content)));
    for (const auto& t : m.cofuse) parts.push_back(mem_cofuse(link_name(t)));
    if (parts.empty()) return mem_zero();
    MembranePtr out = parts[0];
    for (size_t i = 1; i < parts.size(); ++i) out = mem_star(std::move(out), parts[i]);
    return out;
  }

  SystemPtr render_loc(const CLocation& loc) const {
    std::vector<SystemPtr> parts;
    for (const auto& p : loc.proteins) parts.push_back(sys_protein(p.name, iface_of(p)));
    for (const auto& c : loc.cells) {
      SystemPtr cell = sys_cell(render_mem(c.mem), render_loc(c.content));
      parts.push_back(wrap_binders(&c, std::move(cell)));
    }
    for (const auto& fz : loc.fpinch)
      parts.push_back(sys_pinch(link_name(fz.tag), render_loc(fz.content)));
    for (const auto& fz : loc.ffuse) {
      SystemPtr f = sys_fuse(link_name(fz.tag), render_mem(fz.mem), render_loc(fz.content));
      parts.push_back(wrap_binders(&fz, std::move(f)));
    }
    SystemPtr out;
    if (parts.empty())
      out = sys_empty();
    else {
      out = parts[0];
      for (size_t i = 1; i < parts.size(); ++i) out = sys_par(std::move(out), parts[i]);
    }
    return wrap_binders(&loc, std::move(out));
  }
};

}  // namespace

SystemPtr render(const CanonicalState& st) {
  Renderer r(st);
  int root = r.tree.add(-1, ScopeTree::Node::Kind::Location, &st.root);
  r.index_loc(st.root, root);
  r.place_binders();
  NamePool pool;
  visit_links_loc(st.root, [&](const Link& l, bool, ActionKind) {
    if (l.is_name()) pool.reserve(l.name);
  });
  for (BondId b = 0; b < st.bond_count; ++b) r.bond_name[b] = pool.fresh();
  return r.render_loc(st.root);
}

}  // namespace biobeta
