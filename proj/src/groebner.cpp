#include "summands/groebner.hpp"

#include <algorithm>
#include <numeric>

namespace summands {

Vec VecOps::normalize(std::vector<VTerm> terms) const {
  std::sort(terms.begin(), terms.end(), [&](const VTerm& a, const VTerm& b) { return cmp(a, b) > 0; });
  Vec r;
  for (auto& t : terms) {
    if (!r.t.empty() && r.t.back().pos == t.pos && r.t.back().m == t.m) {
      r.t.back().c = F.add(r.t.back().c, t.c);
      if (r.t.back().c.is_zero()) r.t.pop_back();
    } else if (!t.c.is_zero()) {
      r.t.push_back(t);
    }
  }
  return r;
}

Vec VecOps::sub_mul(const Vec& a, size_t a0, const Scalar& c, const Monomial& m, const Vec& b) const {
  Vec r;
  r.t.reserve(a.t.size() - a0 + b.t.size());
  Scalar nc = F.neg(c);
  size_t i = a0, j = 0;
  while (i < a.t.size() && j < b.t.size()) {
    VTerm tb{b.t[j].pos, b.t[j].m * m, {}};
    int s = ord.compare(a.t[i].pos, a.t[i].m, tb.pos, tb.m);
    if (s > 0) {
      r.t.push_back(a.t[i++]);
    } else if (s < 0) {
      tb.c = F.mul(b.t[j++].c, nc);
      r.t.push_back(tb);
    } else {
      Scalar v = F.add(a.t[i].c, F.mul(b.t[j].c, nc));
      if (!v.is_zero()) r.t.push_back({tb.pos, tb.m, v});
      ++i;
      ++j;
    }
  }
  for (; i < a.t.size(); ++i) r.t.push_back(a.t[i]);
  for (; j < b.t.size(); ++j) r.t.push_back({b.t[j].pos, b.t[j].m * m, F.mul(b.t[j].c, nc)});
  return r;
}

Vec VecOps::add(const Vec& a, const Vec& b) const {
  return sub_mul(a, 0, F.neg(F.one()), Monomial{}, b);
}

Vec VecOps::scale(const Vec& a, const Scalar& c) const {
  if (c.is_zero()) return {};
  Vec r = a;
  for (auto& t : r.t) t.c = F.mul(t.c, c);
  return r;
}

Vec VecOps::mul_poly(const Vec& a, const Poly& f) const {
  std::vector<VTerm> all;
  all.reserve(a.t.size() * f.t.size());
  for (auto& x : a.t)
    for (auto& y : f.t) all.push_back({x.pos, x.m * y.m, F.mul(x.c, y.c)});
  return normalize(std::move(all));
}

void VecOps::make_monic(Vec& v) const {
  if (v.is_zero() || F.is_one(v.lead().c)) return;
  Scalar inv = F.inv(v.lead().c);
  for (auto& t : v.t) t.c = F.mul(t.c, inv);
}

Vec VecOps::from_column(const Column& c, uint32_t offset) const {
  std::vector<VTerm> all;
  for (size_t i = 0; i < c.size(); ++i)
    for (auto& t : c[i].t) all.push_back({uint32_t(i + offset), t.m, t.c});
  return normalize(std::move(all));
}

Column VecOps::to_column(const Vec& v, size_t rank, uint32_t offset) const {
  std::vector<std::vector<Term>> parts(rank);
  for (auto& t : v.t)
    if (t.pos >= offset && t.pos < offset + rank) parts[t.pos - offset].push_back({t.m, t.c});
  Column c(rank);
  for (size_t i = 0; i < rank; ++i)
    if (!parts[i].empty()) c[i] = R.reduce(R.normalize(std::move(parts[i])));
  return c;
}

int64_t VecOps::max_weight(const Vec& v) const {
  int64_t w = INT64_MIN;
  for (auto& t : v.t) w = std::max(w, ord.weight(t.pos, t.m));
  return w;
}

bool VecOps::homogeneous(const Vec& v) const {
  for (auto& t : v.t)
    if (ord.weight(t.pos, t.m) != ord.weight(v.t[0].pos, v.t[0].m)) return false;
  return true;
}

std::optional<int64_t> column_weight(const Ring& R, const Column& c, const std::vector<int64_t>& row_shift) {
  std::optional<int64_t> w;
  for (size_t i = 0; i < c.size(); ++i)
    for (auto& t : c[i].t) {
      int64_t x = t.m.w + (row_shift.empty() ? 0 : row_shift[i]);
      if (w && *w != x) return std::nullopt;
      w = x;
    }
  (void)R;
  return w;
}


namespace {

int find_reducer(const std::vector<Vec>& basis, const std::vector<std::vector<uint32_t>>& by_pos, const VTerm& lt,
                 int skip) {
  int best = -1;
  size_t best_len = SIZE_MAX;
  for (auto gi : by_pos[lt.pos]) {
    if (int(gi) == skip) continue;
    const Vec& g = basis[gi];
    if (g.lead().m.divides(lt.m) && g.t.size() < best_len) {
      best = int(gi);
      best_len = g.t.size();
    }
  }
  return best;
}

// Division by the basis; with `tail` every term is reduced, otherwise only
// the leading one. The first `keep` terms are passed through untouched.
Vec reduce_by(const VecOps& ops, const std::vector<Vec>& basis, const std::vector<std::vector<uint32_t>>& by_pos, Vec f,
              bool tail, int skip = -1, size_t keep = 0) {
  Vec rem;
  rem.t.assign(f.t.begin(), f.t.begin() + keep);
  f.t.erase(f.t.begin(), f.t.begin() + keep);
  size_t s = 0;
  while (s < f.t.size()) {
    const VTerm& lt = f.t[s];
    int g = find_reducer(basis, by_pos, lt, skip);
    if (g < 0) {
      if (!tail) {
        rem.t.insert(rem.t.end(), f.t.begin() + s, f.t.end());
        return rem;
      }
      rem.t.push_back(lt);
      ++s;
      continue;
    }
    const Vec& gv = basis[g];
    f = ops.sub_mul(f, s, ops.F.div(lt.c, gv.lead().c), lt.m / gv.lead().m, gv);
    s = 0;
  }
  return rem;
}

int64_t ecart_of(const VecOps& ops, const Vec& v) {
  if (v.is_zero()) return 0;
  return ops.max_weight(v) - ops.ord.weight(v.lead().pos, v.lead().m);
}

// Mora's normal form with ecart-minimal reducers.
Vec mora_by(const VecOps& ops, const std::vector<Vec>& basis, const std::vector<std::vector<uint32_t>>& by_pos,
            const std::vector<int64_t>& ecarts, Vec h) {
  std::vector<Vec> extra;
  std::vector<int64_t> extra_ecart;
  while (!h.is_zero()) {
    const VTerm& lt = h.lead();
    const Vec* best = nullptr;
    int64_t best_ecart = INT64_MAX;
    for (auto gi : by_pos[lt.pos]) {
      const Vec& g = basis[gi];
      if (g.lead().m.divides(lt.m) && ecarts[gi] < best_ecart) {
        best = &g;
        best_ecart = ecarts[gi];
      }
    }
    for (size_t k = 0; k < extra.size(); ++k) {
      const Vec& g = extra[k];
      if (g.lead().pos == lt.pos && g.lead().m.divides(lt.m) && extra_ecart[k] < best_ecart) {
        best = &g;
        best_ecart = extra_ecart[k];
      }
    }
    if (!best) return h;
    int64_t eh = ecart_of(ops, h);
    Vec reducer = *best;
    if (best_ecart > eh) {
      extra.push_back(h);
      extra_ecart.push_back(eh);
    }
    h = ops.sub_mul(h, 0, ops.F.div(lt.c, reducer.lead().c), lt.m / reducer.lead().m, reducer);
  }
  return h;
}

struct Pair {
  uint32_t i, j;
  uint32_t pos;
  Monomial lcm;
  int64_t sugar;
};

class Engine {
 public:
  Engine(const Ring& R, const ModuleOrder& ord, const GBOptions& opt)
      : R_(R), ops_(R, ord), ord_(ord), opt_(opt), by_pos_(ord.rank()) {}

  void run(std::vector<Vec> gens) {
    // Process generators in order of weight, interleaved with pairs.
    std::vector<std::pair<int64_t, Vec>> pending;
    for (auto& g : gens) {
      if (g.is_zero()) continue;
      int64_t s = sugar_of(g);
      pending.push_back({s, std::move(g)});
    }
    std::stable_sort(pending.begin(), pending.end(), [](auto& a, auto& b) { return a.first < b.first; });
    size_t next = 0;
    while (next < pending.size() || !pairs_.empty()) {
      int64_t gs = next < pending.size() ? pending[next].first : INT64_MAX;
      size_t best = select_pair();
      int64_t ps = best < pairs_.size() ? pairs_[best].sugar : INT64_MAX;
      Vec h;
      int64_t sugar;
      if (gs <= ps) {
        sugar = gs;
        h = std::move(pending[next++].second);
        if (opt_.bound && sugar > *opt_.bound) {
          partial_ = true;
          continue;
        }
      } else {
        Pair p = pairs_[best];
        pairs_.erase(pairs_.begin() + best);
        if (opt_.bound && p.sugar > *opt_.bound) {
          partial_ = true;
          continue;
        }
        sugar = p.sugar;
        h = spoly(p);
      }
      h = ord_.local ? mora_nf(std::move(h)) : reduce(std::move(h), opt_.tail_reduce);
      if (h.is_zero()) continue;
      ops_.make_monic(h);
      add(std::move(h), sugar);
    }
  }

  std::vector<Vec> result() {
    // Keep a minimal set of leads, then tail-reduce against it.
    std::vector<size_t> keep;
    for (size_t i = 0; i < basis_.size(); ++i) {
      const VTerm& li = basis_[i].lead();
      bool redundant = false;
      for (size_t j = 0; j < basis_.size() && !redundant; ++j) {
        if (i == j) continue;
        const VTerm& lj = basis_[j].lead();
        if (lj.pos != li.pos || !lj.m.divides(li.m)) continue;
        if (lj.m != li.m || j < i) redundant = true;
      }
      if (!redundant) keep.push_back(i);
    }
    std::vector<Vec> out;
    for (auto i : keep) out.push_back(basis_[i]);
    std::sort(out.begin(), out.end(), [&](const Vec& a, const Vec& b) { return ops_.cmp(a.lead(), b.lead()) < 0; });
    if (!ord_.local && opt_.tail_reduce) {
      basis_ = out;
      rebuild_index();
      for (size_t i = 0; i < out.size(); ++i) out[i] = reduce_tail(out[i], i);
    }
    return out;
  }

  bool partial() const { return partial_; }

  Vec reduce(Vec f, bool tail) const { return reduce_by(ops_, basis_, by_pos_, std::move(f), tail); }
  Vec mora_nf(Vec h) const { return mora_by(ops_, basis_, by_pos_, ecart_, std::move(h)); }

 private:
  const Field& F() const { return ops_.F; }

  int64_t sugar_of(const Vec& v) const {
    return ord_.local ? ord_.weight(v.lead().pos, v.lead().m) : ops_.max_weight(v);
  }

  int64_t ecart(const Vec& v) const { return ecart_of(ops_, v); }

  Vec reduce_tail(const Vec& v, size_t self) const {
    return reduce_by(ops_, basis_, by_pos_, v, true, int(self), 1);
  }

  void rebuild_index() {
    for (auto& b : by_pos_) b.clear();
    ecart_.clear();
    for (size_t i = 0; i < basis_.size(); ++i) {
      by_pos_[basis_[i].lead().pos].push_back(uint32_t(i));
      ecart_.push_back(ecart(basis_[i]));
    }
  }

  size_t select_pair() const {
    size_t best = SIZE_MAX;
    for (size_t k = 0; k < pairs_.size(); ++k) {
      if (best == SIZE_MAX) {
        best = k;
        continue;
      }
      const Pair& a = pairs_[k];
      const Pair& b = pairs_[best];
      if (a.sugar != b.sugar ? a.sugar < b.sugar : (a.i != b.i ? a.i < b.i : a.j < b.j)) best = k;
    }
    return best;
  }

  Vec spoly(const Pair& p) const {
    const Vec& a = basis_[p.i];
    const Vec& b = basis_[p.j];
    Monomial ma = p.lcm / a.lead().m, mb = p.lcm / b.lead().m;
    Vec sa;
    sa.t.reserve(a.t.size());
    Scalar ca = F().inv(a.lead().c);
    for (auto& t : a.t) sa.t.push_back({t.pos, t.m * ma, F().mul(t.c, ca)});
    Vec r = ops_.sub_mul(sa, 0, F().inv(b.lead().c), mb, b);
    return r;
  }

  bool coprime(const Monomial& a, const Monomial& b) const {
    for (int i = 0; i < kMaxVars; ++i)
      if (a.e[i] && b.e[i]) return false;
    return true;
  }

  void add(Vec h, int64_t sugar) {
    uint32_t hi = uint32_t(basis_.size());
    const VTerm hl = h.lead();
    basis_.push_back(std::move(h));
    sugar_.push_back(sugar);
    active_.push_back(true);
    ecart_.push_back(ecart(basis_.back()));
    by_pos_[hl.pos].push_back(hi);
    bool rank_one = ord_.rank() == 1;

    // Gebauer-Möller update.
    std::vector<Pair> cand;
    for (uint32_t i = 0; i < hi; ++i) {
      if (!active_[i] || basis_[i].lead().pos != hl.pos) continue;
      const VTerm& li = basis_[i].lead();
      Monomial l = R_.lcm(li.m, hl.m);
      int64_t s = std::max(sugar_[i] + (l.w - li.m.w), sugar + (l.w - hl.m.w));
      if (ord_.local) s = l.w + ord_.shift[hl.pos];
      cand.push_back({i, hi, hl.pos, l, s});
    }
    std::vector<bool> keep(cand.size(), true);
    // M criterion: drop (i,h) if some (k,h) has a strictly dividing lcm, and
    // one of equal lcms.
    for (size_t a = 0; a < cand.size(); ++a) {
      for (size_t b = 0; b < cand.size() && keep[a]; ++b) {
        if (a == b || !keep[b]) continue;
        if (!cand[b].lcm.divides(cand[a].lcm)) continue;
        if (cand[b].lcm != cand[a].lcm) {
          keep[a] = false;
        } else if (b < a) {
          // Equal lcms: keep one, preferring a coprime pair so the product
          // criterion can discard the whole class.
          bool cb = rank_one && coprime(basis_[cand[b].i].lead().m, hl.m);
          bool ca = rank_one && coprime(basis_[cand[a].i].lead().m, hl.m);
          if (!ca || cb) keep[a] = false;
        }
      }
    }
    // B criterion on old pairs.
    std::vector<Pair> next;
    next.reserve(pairs_.size() + cand.size());
    for (auto& p : pairs_) {
      if (p.pos == hl.pos && hl.m.divides(p.lcm)) {
        Monomial li = R_.lcm(basis_[p.i].lead().m, hl.m);
        Monomial lj = R_.lcm(basis_[p.j].lead().m, hl.m);
        if (li != p.lcm && lj != p.lcm) continue;
      }
      next.push_back(p);
    }
    for (size_t a = 0; a < cand.size(); ++a) {
      if (!keep[a]) continue;
      if (rank_one && coprime(basis_[cand[a].i].lead().m, hl.m)) continue;
      next.push_back(cand[a]);
    }
    pairs_ = std::move(next);
    for (uint32_t i = 0; i < hi; ++i)
      if (active_[i] && basis_[i].lead().pos == hl.pos && hl.m.divides(basis_[i].lead().m)) active_[i] = false;
  }

  const Ring& R_;
  VecOps ops_;
  const ModuleOrder& ord_;
  const GBOptions& opt_;
  std::vector<Vec> basis_;
  std::vector<int64_t> sugar_;
  std::vector<int64_t> ecart_;
  std::vector<bool> active_;
  std::vector<std::vector<uint32_t>> by_pos_;
  std::vector<Pair> pairs_;
  bool partial_ = false;
};

std::vector<Vec> ideal_multiples(const Ring& R, const ModuleOrder& ord, const std::vector<bool>& positions) {
  std::vector<Vec> out;
  VecOps ops(R, ord);
  for (uint32_t j = 0; j < ord.rank(); ++j) {
    if (!positions.empty() && !positions[j]) continue;
    for (auto& g : R.ideal_basis()) {
      std::vector<VTerm> ts;
      for (auto& t : g.t) ts.push_back({j, t.m, t.c});
      out.push_back(ops.normalize(std::move(ts)));
    }
  }
  return out;
}

}  // namespace

GroebnerBasis groebner_basis(const RingPtr& R, const ModuleOrder& ord, std::vector<Vec> gens, const GBOptions& opt) {
  VecOps ops(*R, ord);
  if (R->mode() == RingMode::Graded && !ord.local)
    for (auto& g : gens)
      if (!g.is_zero() && !ops.homogeneous(g))
        fail(ErrorCode::MixedHomogeneity, "inhomogeneous generator in a graded Gröbner basis computation");
  for (auto& g : gens)
    for (auto& t : g.t)
      if (t.pos >= ord.rank()) fail(ErrorCode::ShapeMismatch, "vector position exceeds the module rank");
  auto extra = ideal_multiples(*R, ord, opt.ideal_positions);
  gens.insert(gens.end(), extra.begin(), extra.end());
  Engine e(*R, ord, opt);
  e.run(std::move(gens));
  GroebnerBasis G;
  G.ring = R;
  G.order = ord;
  G.basis = e.result();
  G.bound = opt.bound;
  G.partial = e.partial();
  G.index();
  return G;
}

void GroebnerBasis::index() {
  VecOps ops(*ring, order);
  by_pos.assign(order.rank(), {});
  ecarts.clear();
  for (size_t i = 0; i < basis.size(); ++i) {
    by_pos[basis[i].lead().pos].push_back(uint32_t(i));
    ecarts.push_back(ecart_of(ops, basis[i]));
  }
}

Vec GroebnerBasis::normal_form(const Vec& v) const {
  VecOps ops(*ring, order);
  if (partial && bound && !v.is_zero() && ops.max_weight(v) > *bound)
    fail(ErrorCode::BoundExceeded, "vector lies above the bound of a partial Gröbner basis");
  return order.local ? mora_by(ops, basis, by_pos, ecarts, v) : reduce_by(ops, basis, by_pos, v, true);
}

bool GroebnerBasis::lead_divides(uint32_t pos, const Monomial& m) const {
  for (auto& b : basis)
    if (b.lead().pos == pos && b.lead().m.divides(m)) return true;
  return false;
}

std::vector<Poly> reduced_ideal_basis(const Ring& S, const std::vector<Poly>& gens) {
  ModuleOrder ord = ModuleOrder::graded({0});
  VecOps ops(S, ord);
  std::vector<Vec> vs;
  for (auto& g : gens) vs.push_back(ops.from_column({g}));
  GBOptions opt;
  // S has no ideal of its own, and inhomogeneous input is fine here.
  Engine e(S, ord, opt);
  e.run(std::move(vs));
  std::vector<Poly> out;
  for (auto& v : e.result()) {
    Poly p;
    for (auto& t : v.t) p.t.push_back({t.m, t.c});
    out.push_back(std::move(p));
  }
  return out;
}

bool verify_groebner(const GroebnerBasis& G) {
  VecOps ops(*G.ring, G.order);
  const Field& F = *G.ring->field();
  for (size_t i = 0; i < G.basis.size(); ++i)
    for (size_t j = i + 1; j < G.basis.size(); ++j) {
      const Vec& a = G.basis[i];
      const Vec& b = G.basis[j];
      if (a.lead().pos != b.lead().pos) continue;
      Monomial l = G.ring->lcm(a.lead().m, b.lead().m);
      if (G.bound && G.order.weight(a.lead().pos, l) > *G.bound) continue;
      Vec sa = ops.sub_mul(Vec{}, 0, F.neg(F.inv(a.lead().c)), l / a.lead().m, a);
      Vec s = ops.sub_mul(sa, 0, F.inv(b.lead().c), l / b.lead().m, b);
      if (!G.normal_form(s).is_zero()) return false;
    }
  return true;
}

std::vector<Column> syzygies(const RingPtr& R, const std::vector<Column>& gens, size_t rank,
                             const std::vector<int64_t>& row_shift, std::optional<int64_t> bound) {
  size_t k = gens.size();
  if (k == 0) return {};
  ModuleOrder ord;
  ord.shift.assign(rank + k, 0);
  ord.block.assign(rank + k, 0);
  for (size_t i = 0; i < rank; ++i) ord.shift[i] = row_shift.empty() ? 0 : row_shift[i];
  for (size_t j = 0; j < k; ++j) {
    ord.block[rank + j] = 1;
    auto w = column_weight(*R, gens[j], row_shift);
    if (!w) {
      // Zero or inhomogeneous columns: any shift gives a valid order.
      int64_t m = 0;
      bool any = false;
      for (size_t i = 0; i < gens[j].size(); ++i)
        for (auto& t : gens[j][i].t) {
          int64_t x = t.m.w + ord.shift[i];
          m = any ? std::max(m, x) : x;
          any = true;
        }
      w = m;
    }
    ord.shift[rank + j] = *w;
  }
  VecOps ops(*R, ord);
  std::vector<Vec> vs;
  for (size_t j = 0; j < k; ++j) {
    if (gens[j].size() != rank) fail(ErrorCode::ShapeMismatch, "generator has the wrong length");
    Vec v = ops.from_column(gens[j]);
    Vec e = ops.from_column({R->one()}, uint32_t(rank + j));
    vs.push_back(ops.add(v, e));
  }
  GBOptions opt;
  opt.bound = bound;
  opt.ideal_positions.assign(rank + k, false);
  for (size_t i = 0; i < rank; ++i) opt.ideal_positions[i] = true;
  // The mixed vectors are homogeneous only in graded mode with consistent
  // columns; let the engine check that.
  GroebnerBasis G = groebner_basis(R, ord, std::move(vs), opt);
  std::vector<Column> out;
  for (auto& b : G.basis) {
    if (b.lead().pos < rank) continue;
    Column c = ops.to_column(b, k, uint32_t(rank));
    bool zero = true;
    for (auto& p : c) zero = zero && p.is_zero();
    if (!zero) out.push_back(std::move(c));
  }
  return out;
}

std::vector<Column> kernel_of_map(const RingPtr& R, const std::vector<Column>& phi, const std::vector<Column>& rels,
                                  size_t rank, const std::vector<int64_t>& row_shift, std::optional<int64_t> bound) {
  for (auto& c : phi)
    if (c.size() != rank) fail(ErrorCode::ShapeMismatch, "map column has the wrong length");
  for (auto& c : rels)
    if (c.size() != rank) fail(ErrorCode::ShapeMismatch, "relation column has the wrong length");
  size_t n = phi.size();
  if (n == 0) return {};
  std::vector<Column> all = phi;
  all.insert(all.end(), rels.begin(), rels.end());
  std::vector<Column> out;
  for (auto& s : syzygies(R, all, rank, row_shift, bound)) {
    Column c(s.begin(), s.begin() + n);
    bool zero = true;
    for (auto& p : c) zero = zero && p.is_zero();
    if (!zero) out.push_back(std::move(c));
  }
  return out;
}

}  // namespace summands
