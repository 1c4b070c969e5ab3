#include "summands/modules.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace summands {

namespace {

bool zero_column(const Column& c) {
  for (auto& p : c)
    if (!p.is_zero()) return false;
  return true;
}

Column zero_col(size_t n) { return Column(n); }

Column unit_col(const Ring& R, size_t n, size_t i) {
  Column c(n);
  c[i] = R.one();
  return c;
}

// a - f*b entrywise.
Column sub_mul_col(const Ring& R, const Column& a, const Poly& f, const Column& b) {
  Column out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = b[i].is_zero() ? a[i] : R.sub(a[i], R.mul(f, b[i]));
  return out;
}

Column add_col(const Ring& R, const Column& a, const Column& b) {
  Column out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = R.add(a[i], b[i]);
  return out;
}

Column scale_col(const Ring& R, const Column& a, const Poly& f) {
  Column out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = R.mul(f, a[i]);
  return out;
}

void check_same_ring(const ModulePtr& a, const ModulePtr& b) {
  if (a->ring() != b->ring()) fail(ErrorCode::RingMismatch, "modules live over different rings");
}

struct CoordKey {
  uint32_t pos;
  Monomial m;
  bool operator==(const CoordKey& o) const { return pos == o.pos && m == o.m; }
};
struct CoordHash {
  size_t operator()(const CoordKey& k) const { return k.m.hash() * 31 + k.pos; }
};

}  // namespace

// ---------------------------------------------------------------------------
// Presentation

Presentation::Presentation(RingPtr ring, std::vector<Degree> degrees, std::vector<Column> relations)
    : ring_(std::move(ring)), degrees_(std::move(degrees)) {
  const Ring& R = *ring_;
  for (auto& d : degrees_) {
    if (d.empty() && R.grading_rank() > 0) d = R.zero_degree();
    if (d.size() != R.grading_rank()) fail(ErrorCode::ShapeMismatch, "generator degree has the wrong length");
  }
  for (auto& c : relations) {
    if (c.size() != degrees_.size()) fail(ErrorCode::ShapeMismatch, "relation column has the wrong length");
    for (auto& p : c) p = R.reduce(p);
    if (zero_column(c)) continue;
    rels_.push_back(std::move(c));
  }
  if (!graded()) return;
  for (size_t j = 0; j < rels_.size(); ++j)
    if (!relation_degree(j)) fail(ErrorCode::NotGraded, "relation column " + std::to_string(j + 1) + " is not homogeneous");
}

Presentation Presentation::free(RingPtr ring, std::vector<Degree> degrees) {
  return Presentation(std::move(ring), std::move(degrees), {});
}

std::vector<int64_t> Presentation::row_weights() const {
  std::vector<int64_t> w;
  for (auto& d : degrees_) w.push_back(graded() ? ring_->weight_of(d) : 0);
  return w;
}

std::optional<Degree> Presentation::relation_degree(size_t j) const {
  std::optional<Degree> out;
  const Column& c = rels_[j];
  for (size_t i = 0; i < c.size(); ++i) {
    if (c[i].is_zero()) continue;
    auto d = ring_->degree_of(c[i]);
    if (!d) return std::nullopt;
    Degree total = *d + degrees_[i];
    if (out && *out != total) return std::nullopt;
    out = total;
  }
  return out;
}

ModuleOrder Presentation::order(bool local) const { return ModuleOrder::graded(row_weights(), local); }

std::shared_ptr<const GroebnerBasis> Presentation::relation_basis(std::optional<int64_t> bound) const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto& g = cache_->global;
  if (g && (!g->partial || (bound && g->bound && *g->bound >= *bound))) return g;
  ModuleOrder ord = order(false);
  VecOps ops(*ring_, ord);
  std::vector<Vec> gens;
  for (auto& c : rels_) gens.push_back(ops.from_column(c));
  GBOptions opt;
  opt.bound = bound;
  auto G = std::make_shared<GroebnerBasis>(groebner_basis(ring_, ord, std::move(gens), opt));
  if (G->bound && !G->partial) G->bound.reset();
  g = G;
  return g;
}

std::shared_ptr<const GroebnerBasis> Presentation::local_basis() const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  if (cache_->local) return cache_->local;
  ModuleOrder ord = order(true);
  VecOps ops(*ring_, ord);
  std::vector<Vec> gens;
  for (auto& c : rels_) gens.push_back(ops.from_column(c));
  cache_->local = std::make_shared<GroebnerBasis>(groebner_basis(ring_, ord, std::move(gens)));
  return cache_->local;
}

bool Presentation::is_zero_element(const Column& v, bool local) const {
  if (zero_column(v)) return true;
  auto G = local ? local_basis() : relation_basis();
  VecOps ops(*ring_, G->order);
  return G->contains(ops.from_column(v));
}

Presentation Presentation::shifted(const Degree& delta) const {
  std::vector<Degree> d = degrees_;
  for (auto& x : d) x = x + delta;
  return Presentation(ring_, std::move(d), rels_);
}

std::string Presentation::format() const {
  std::ostringstream os;
  os << "coker over " << ngens() << " generators";
  if (graded()) {
    os << " of degrees";
    for (auto& d : degrees_) os << ' ' << format_degree_vector(d);
  }
  os << '\n';
  for (size_t i = 0; i < ngens(); ++i) {
    os << "  [";
    for (size_t j = 0; j < rels_.size(); ++j) os << (j ? ", " : "") << ring_->format(rels_[j][i]);
    os << "]\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Homomorphisms

Hom identity_hom(const ModulePtr& M) {
  Hom h{M, M, {}, M->ring()->zero_degree()};
  for (size_t j = 0; j < M->ngens(); ++j) h.images.push_back(unit_col(*M->ring(), M->ngens(), j));
  return h;
}

Hom zero_hom(const ModulePtr& M, const ModulePtr& N) {
  check_same_ring(M, N);
  return Hom{M, N, std::vector<Column>(M->ngens(), zero_col(N->ngens())), M->ring()->zero_degree()};
}

Column apply(const Hom& h, const Column& v) {
  const Ring& R = *h.target->ring();
  if (v.size() != h.images.size()) fail(ErrorCode::ShapeMismatch, "vector length differs from the source rank");
  Column out = zero_col(h.target->ngens());
  for (size_t j = 0; j < v.size(); ++j) {
    if (v[j].is_zero()) continue;
    for (size_t i = 0; i < out.size(); ++i)
      if (!h.images[j][i].is_zero()) out[i] = R.add(out[i], R.mul(v[j], h.images[j][i]));
  }
  return out;
}

Hom compose(const Hom& g, const Hom& f) {
  if (f.target->ngens() != g.source->ngens()) fail(ErrorCode::ShapeMismatch, "maps are not composable");
  Hom h{f.source, g.target, {}, f.shift + g.shift};
  for (auto& c : f.images) h.images.push_back(apply(g, c));
  return h;
}

Hom add(const Hom& a, const Hom& b) {
  if (a.images.size() != b.images.size()) fail(ErrorCode::ShapeMismatch, "maps have different sources");
  Hom h{a.source, a.target, {}, a.shift};
  for (size_t j = 0; j < a.images.size(); ++j) h.images.push_back(add_col(*a.target->ring(), a.images[j], b.images[j]));
  return h;
}

Hom scale(const Hom& a, const Scalar& c) {
  const Ring& R = *a.target->ring();
  Hom h{a.source, a.target, {}, a.shift};
  for (auto& col : a.images) {
    Column out(col.size());
    for (size_t i = 0; i < col.size(); ++i) out[i] = R.scale(col[i], c);
    h.images.push_back(std::move(out));
  }
  return h;
}

Hom sub(const Hom& a, const Hom& b) { return add(a, scale(b, a.target->ring()->field()->from_int(-1))); }

Hom normalize(const Hom& h) {
  if (h.target->is_free()) return h;
  auto G = h.target->relation_basis();
  if (G->partial) return h;
  VecOps ops(*h.target->ring(), G->order);
  Hom out{h.source, h.target, {}, h.shift};
  for (auto& c : h.images) out.images.push_back(ops.to_column(G->normal_form(ops.from_column(c)), h.target->ngens()));
  return out;
}

Hom hom_pow(const Hom& a, const mpz_class& e) {
  Hom result = identity_hom(a.source);
  Hom base = normalize(a);
  mpz_class n = e;
  while (n > 0) {
    if (mpz_odd_p(n.get_mpz_t())) result = normalize(compose(base, result));
    n >>= 1;
    if (n > 0) base = normalize(compose(base, base));
  }
  return result;
}

bool is_well_defined(const Hom& h, bool local) {
  if (h.images.size() != h.source->ngens()) return false;
  for (auto& c : h.images)
    if (c.size() != h.target->ngens()) return false;
  for (auto& rel : h.source->relations())
    if (!h.target->is_zero_element(apply(h, rel), local)) return false;
  return true;
}

bool is_zero_hom(const Hom& h, bool local) {
  for (auto& c : h.images)
    if (!h.target->is_zero_element(c, local)) return false;
  return true;
}

bool equal_homs(const Hom& a, const Hom& b, bool local) { return is_zero_hom(sub(a, b), local); }

Matrix reduce_mod_m(const Hom& h) {
  const Ring& R = *h.target->ring();
  Matrix A(R.field(), h.target->ngens(), h.source->ngens());
  for (size_t j = 0; j < h.images.size(); ++j)
    for (size_t i = 0; i < h.images[j].size(); ++i) A(i, j) = R.constant_term(h.images[j][i]);
  return A;
}

Hom combine(const std::vector<Hom>& hs, const std::vector<Scalar>& c) {
  if (hs.empty()) fail(ErrorCode::InvalidArgument, "empty combination");
  const Ring& R = *hs[0].target->ring();
  Hom h{hs[0].source, hs[0].target, std::vector<Column>(hs[0].images.size(), zero_col(hs[0].target->ngens())),
        hs[0].shift};
  for (size_t k = 0; k < hs.size(); ++k) {
    if (c[k].is_zero()) continue;
    for (size_t j = 0; j < h.images.size(); ++j)
      for (size_t i = 0; i < h.images[j].size(); ++i)
        if (!hs[k].images[j][i].is_zero()) h.images[j][i] = R.add(h.images[j][i], R.scale(hs[k].images[j][i], c[k]));
  }
  return h;
}

// ---------------------------------------------------------------------------
// Minimal presentations

bool is_minimal(const Presentation& M) {
  for (auto& c : M.relations())
    for (auto& p : c)
      if (!M.ring()->constant_term(p).is_zero()) return false;
  return true;
}

namespace {

std::vector<Column> prune_graded(const Presentation& M) {
  const RingPtr& R = M.ring();
  auto rw = M.row_weights();
  ModuleOrder ord = M.order(false);
  VecOps ops(*R, ord);
  std::vector<std::pair<int64_t, size_t>> by_weight;
  for (size_t j = 0; j < M.nrels(); ++j) by_weight.push_back({*column_weight(*R, M.relations()[j], rw), j});
  std::stable_sort(by_weight.begin(), by_weight.end());
  std::vector<size_t> kept;
  size_t a = 0;
  while (a < by_weight.size()) {
    size_t b = a;
    int64_t w = by_weight[a].first;
    while (b < by_weight.size() && by_weight[b].first == w) ++b;
    std::vector<Vec> gens;
    for (auto j : kept) gens.push_back(ops.from_column(M.relations()[j]));
    GBOptions opt;
    opt.bound = w;
    GroebnerBasis G = groebner_basis(R, ord, std::move(gens), opt);
    std::vector<Vec> rems;
    std::unordered_map<CoordKey, uint32_t, CoordHash> coord;
    for (size_t k = a; k < b; ++k) {
      rems.push_back(G.normal_form(ops.from_column(M.relations()[by_weight[k].second])));
      for (auto& t : rems.back().t) coord.emplace(CoordKey{t.pos, t.m}, uint32_t(coord.size()));
    }
    // Columns of C are the remainders; independent ones are kept.
    Matrix C(R->field(), coord.size(), rems.size());
    for (size_t k = 0; k < rems.size(); ++k)
      for (auto& t : rems[k].t) C(coord.at(CoordKey{t.pos, t.m}), k) = t.c;
    for (auto k : independent_columns(C)) kept.push_back(by_weight[a + k].second);
    a = b;
  }
  std::sort(kept.begin(), kept.end());
  std::vector<Column> out;
  for (auto j : kept) out.push_back(M.relations()[j]);
  return out;
}

std::vector<Column> prune_local(const Presentation& M) {
  const RingPtr& R = M.ring();
  ModuleOrder ord = M.order(true);
  VecOps ops(*R, ord);
  std::vector<Column> cols = M.relations();
  for (size_t j = cols.size(); j-- > 0;) {
    std::vector<Vec> gens;
    for (size_t k = 0; k < cols.size(); ++k)
      if (k != j) gens.push_back(ops.from_column(cols[k]));
    GroebnerBasis G = groebner_basis(R, ord, std::move(gens));
    if (G.contains(ops.from_column(cols[j]))) cols.erase(cols.begin() + j);
  }
  return cols;
}

}  // namespace

Presentation prune_relations(const Presentation& M) {
  if (M.nrels() == 0) return M;
  auto cols = M.graded() ? prune_graded(M) : prune_local(M);
  if (cols.size() == M.nrels()) return M;
  return Presentation(M.ring(), M.degrees(), std::move(cols));
}

Minimized minimize(const ModulePtr& M) {
  const RingPtr& Rp = M->ring();
  const Ring& R = *Rp;
  const Field& F = *R.field();
  bool local = R.is_local();
  std::vector<Column> cols = M->relations();
  std::vector<Degree> degs = M->degrees();
  std::vector<size_t> orig(degs.size());
  std::iota(orig.begin(), orig.end(), 0);
  std::vector<Column> expr;
  for (size_t o = 0; o < degs.size(); ++o) expr.push_back(unit_col(R, degs.size(), o));
  bool exact = true;

  for (;;) {
    // Prefer constant pivots, which keep both change-of-basis maps exact;
    // among those, the sparsest column.
    long pi = -1, pj = -1;
    bool constant = false;
    size_t best = SIZE_MAX;
    for (size_t j = 0; j < cols.size(); ++j) {
      size_t nnz = 0;
      for (auto& p : cols[j]) nnz += !p.is_zero();
      for (size_t i = 0; i < cols[j].size(); ++i) {
        const Poly& a = cols[j][i];
        if (a.is_zero() || R.constant_term(a).is_zero()) continue;
        bool c = R.is_constant(a);
        if (!c && !local) continue;
        size_t score = nnz + (c ? 0 : 1000000);
        if (score < best) {
          best = score;
          pi = long(i);
          pj = long(j);
          constant = c;
        }
      }
    }
    if (pi < 0) break;
    size_t i = size_t(pi), j = size_t(pj);
    Column piv = cols[j];
    const Poly u = piv[i];
    Scalar inv = F.inv(R.constant_term(u));
    for (size_t l = 0; l < cols.size(); ++l) {
      if (l == j || cols[l][i].is_zero()) continue;
      if (constant) {
        cols[l] = sub_mul_col(R, cols[l], R.scale(cols[l][i], inv), piv);
      } else {
        Poly b = cols[l][i];
        cols[l] = sub_mul_col(R, scale_col(R, cols[l], u), b, piv);
      }
    }
    for (auto& e : expr) {
      if (e[i].is_zero()) continue;
      if (!constant) exact = false;
      e = sub_mul_col(R, e, R.scale(e[i], inv), piv);
    }
    cols.erase(cols.begin() + j);
    auto drop_row = [i](Column& c) { c.erase(c.begin() + long(i)); };
    for (auto& c : cols) drop_row(c);
    for (auto& e : expr) drop_row(e);
    degs.erase(degs.begin() + long(i));
    orig.erase(orig.begin() + long(i));
    cols.erase(std::remove_if(cols.begin(), cols.end(), zero_column), cols.end());
  }

  Minimized out;
  out.module = make_module(prune_relations(Presentation(Rp, degs, std::move(cols))));
  out.exact = exact;
  out.to_new = Hom{M, out.module, std::move(expr), R.zero_degree()};
  out.to_old = Hom{out.module, M, {}, R.zero_degree()};
  for (auto o : orig) out.to_old.images.push_back(unit_col(R, M->ngens(), o));
  return out;
}

// ---------------------------------------------------------------------------
// Hilbert functions

namespace {

// Standard vector monomials of N in degree d, given a Gröbner basis of its
// relations complete up to weight(d).
std::vector<CoordKey> module_basis(const Presentation& N, const GroebnerBasis& G, const Degree& d) {
  std::vector<CoordKey> out;
  const Ring& R = *N.ring();
  for (uint32_t r = 0; r < N.ngens(); ++r)
    for (auto& m : R.basis_in_degree(d - N.degree(r)))
      if (!G.lead_divides(r, m)) out.push_back({r, m});
  return out;
}

}  // namespace

std::vector<size_t> hilbert_window(const Presentation& M, const std::vector<Degree>& degrees) {
  if (!M.graded()) fail(ErrorCode::NotGraded, "Hilbert functions need a graded ring");
  if (degrees.empty()) return {};
  int64_t top = INT64_MIN;
  for (auto& d : degrees) {
    if (d.size() != M.ring()->grading_rank()) fail(ErrorCode::ShapeMismatch, "degree has the wrong length");
    top = std::max(top, M.ring()->weight_of(d));
  }
  auto G = M.relation_basis(top);
  std::vector<size_t> out;
  for (auto& d : degrees) out.push_back(module_basis(M, *G, d).size());
  return out;
}

std::vector<Degree> default_window(const Presentation& M, int width) {
  std::set<Degree> out;
  size_t r = M.ring()->grading_rank();
  for (auto& d : M.degrees())
    for (size_t k = 0; k < r; ++k)
      for (int t = -width; t <= width; ++t) {
        Degree e = d;
        e[k] += t;
        out.insert(e);
      }
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------
// Hom modules

HomModule hom_module(const ModulePtr& M, const ModulePtr& N) {
  check_same_ring(M, N);
  const RingPtr& Rp = M->ring();
  const Ring& R = *Rp;
  size_t s = M->ngens(), t = M->nrels(), n = N->ngens();
  bool graded = M->graded();
  auto wm = M->row_weights(), wn = N->row_weights();
  std::vector<int64_t> cw(t, 0);
  if (graded)
    for (size_t l = 0; l < t; ++l) cw[l] = R.weight_of(*M->relation_degree(l));

  // Coordinates of N^s: (j, i) -> j*n + i, meaning phi(e_j) has component i.
  std::vector<int64_t> src_shift(s * n), tgt_shift(t * n);
  for (size_t j = 0; j < s; ++j)
    for (size_t i = 0; i < n; ++i) src_shift[j * n + i] = wn[i] - wm[j];
  for (size_t l = 0; l < t; ++l)
    for (size_t i = 0; i < n; ++i) tgt_shift[l * n + i] = wn[i] - cw[l];

  std::vector<Column> kernel;
  if (t == 0) {
    for (size_t k = 0; k < s * n; ++k) kernel.push_back(unit_col(R, s * n, k));
  } else {
    std::vector<Column> phi;
    for (size_t j = 0; j < s; ++j)
      for (size_t i = 0; i < n; ++i) {
        Column c = zero_col(t * n);
        for (size_t l = 0; l < t; ++l) c[l * n + i] = M->relations()[l][j];
        phi.push_back(std::move(c));
      }
    std::vector<Column> rels;
    for (size_t l = 0; l < t; ++l)
      for (auto& b : N->relations()) {
        Column c = zero_col(t * n);
        for (size_t i = 0; i < n; ++i) c[l * n + i] = b[i];
        rels.push_back(std::move(c));
      }
    kernel = kernel_of_map(Rp, phi, rels, t * n, tgt_shift);
  }

  // Relations among the kernel generators, modulo N's relations in each slot.
  std::vector<Column> zero_in_n;
  for (size_t j = 0; j < s; ++j)
    for (auto& b : N->relations()) {
      Column c = zero_col(s * n);
      for (size_t i = 0; i < n; ++i) c[j * n + i] = b[i];
      zero_in_n.push_back(std::move(c));
    }

  std::vector<Degree> gdeg;
  for (auto& k : kernel) {
    Degree d = R.zero_degree();
    if (graded) {
      for (size_t x = 0; x < k.size(); ++x)
        if (!k[x].is_zero()) {
          d = R.degree(k[x].lead().m) + N->degree(x % n) - M->degree(x / n);
          break;
        }
    }
    gdeg.push_back(d);
  }
  std::vector<Column> hom_rels;
  if (!kernel.empty()) hom_rels = kernel_of_map(Rp, kernel, zero_in_n, s * n, src_shift);

  HomModule out;
  out.module = Presentation(Rp, gdeg, std::move(hom_rels));
  for (size_t a = 0; a < kernel.size(); ++a) {
    Hom h{M, N, {}, gdeg[a]};
    for (size_t j = 0; j < s; ++j) h.images.emplace_back(kernel[a].begin() + long(j * n), kernel[a].begin() + long((j + 1) * n));
    out.maps.push_back(std::move(h));
  }
  return out;
}

std::vector<Hom> hom_graded(const ModulePtr& M, const ModulePtr& N, const Degree& delta, bool reductions_only,
                            std::vector<std::pair<size_t, size_t>>* unit_entries) {
  check_same_ring(M, N);
  if (!M->graded()) fail(ErrorCode::NotGraded, "degree-zero homomorphisms need a graded ring");
  const RingPtr& Rp = M->ring();
  const Ring& R = *Rp;
  size_t s = M->ngens(), n = N->ngens();

  int64_t top = INT64_MIN;
  for (size_t l = 0; l < M->nrels(); ++l) top = std::max(top, R.weight_of(*M->relation_degree(l) + delta));
  for (auto& d : M->degrees()) top = std::max(top, R.weight_of(d + delta));
  auto G = N->relation_basis(top);
  VecOps ops(R, G->order);

  // Unknowns: coordinates of phi(e_j) in the standard basis of [N]_{d_j + delta}.
  std::vector<std::vector<CoordKey>> basis(s);
  std::vector<uint32_t> offset(s + 1, 0);
  for (size_t j = 0; j < s; ++j) {
    basis[j] = module_basis(*N, *G, M->degree(j) + delta);
    offset[j + 1] = offset[j] + uint32_t(basis[j].size());
  }
  size_t unknowns = offset[s];
  // Column of each unknown; constant coordinates go last when only the
  // reductions matter.
  std::vector<uint32_t> col(unknowns);
  uint32_t first_const = 0;
  {
    std::vector<uint32_t> lower, upper;
    for (size_t j = 0; j < s; ++j)
      for (size_t b = 0; b < basis[j].size(); ++b)
        (reductions_only && basis[j][b].m.total_degree() == 0 ? upper : lower).push_back(offset[j] + uint32_t(b));
    first_const = reductions_only ? uint32_t(lower.size()) : 0;
    uint32_t c = 0;
    for (auto u : lower) col[u] = c++;
    for (auto u : upper) col[u] = c++;
  }

  std::vector<SparseRow> rows;
  for (auto& rel : M->relations()) {
    std::unordered_map<CoordKey, size_t, CoordHash> row_of;
    for (size_t j = 0; j < s; ++j) {
      if (rel[j].is_zero()) continue;
      for (size_t b = 0; b < basis[j].size(); ++b) {
        const CoordKey& k = basis[j][b];
        std::vector<VTerm> ts;
        for (auto& term : rel[j].t) ts.push_back({k.pos, term.m * k.m, term.c});
        Vec v = G->normal_form(ops.normalize(std::move(ts)));
        for (auto& term : v.t) {
          auto [it, fresh] = row_of.emplace(CoordKey{term.pos, term.m}, rows.size());
          if (fresh) rows.emplace_back();
          rows[it->second].push_back({col[offset[j] + b], term.c});
        }
      }
    }
  }

  std::vector<Hom> out;
  std::vector<std::pair<uint32_t, uint32_t>> unknown_of(unknowns);  // column -> (j, b)
  for (size_t j = 0; j < s; ++j)
    for (size_t b = 0; b < basis[j].size(); ++b) unknown_of[col[offset[j] + b]] = {uint32_t(j), uint32_t(b)};
  if (unit_entries) unit_entries->clear();
  for (auto& x : sparse_kernel(R.field(), unknowns, rows, first_const)) {
    if (unit_entries && reductions_only) {
      auto [j, b] = unknown_of[x.back().first];
      unit_entries->push_back({basis[j][b].pos, j});
    }
    Hom h{M, N, std::vector<Column>(s, zero_col(n)), delta};
    for (auto& [c, v] : x) {
      auto [j, b] = unknown_of[c];
      auto& e = h.images[j][basis[j][b].pos];
      e = R.add(e, R.term(basis[j][b].m, v));
    }
    out.push_back(std::move(h));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Degree-zero endomorphisms

namespace {

std::vector<Scalar> flatten(const Matrix& A) {
  std::vector<Scalar> v;
  for (size_t i = 0; i < A.rows(); ++i)
    for (size_t j = 0; j < A.cols(); ++j) v.push_back(A(i, j));
  return v;
}

}  // namespace

End0Basis end0_basis(const ModulePtr& M, bool reductions_only) {
  if (!is_minimal(*M)) fail(ErrorCode::NotMinimal, "endomorphism bases need a minimal presentation");
  End0Basis B;
  B.module = M;
  B.graded = M->graded();
  if (B.graded) {
    B.basis = hom_graded(M, M, M->ring()->zero_degree(), reductions_only, &B.unit_entries);
    for (auto& h : B.basis) B.reductions.push_back(reduce_mod_m(h));
    return B;
  }
  // Local: keep generators whose reductions are independent; they span the
  // image of End(M) in End_k(M/mM).
  std::vector<Hom> cand{identity_hom(M)};
  for (auto& h : hom_module(M, M).maps) cand.push_back(h);
  size_t s = M->ngens();
  const FieldPtr& F = M->ring()->field();
  std::vector<std::vector<Scalar>> rows;
  for (auto& h : cand) {
    Matrix A = reduce_mod_m(h);
    if (A.is_zero()) continue;
    auto flat = flatten(A);
    Matrix T(F, rows.size() + 1, s * s);
    for (size_t a = 0; a < rows.size(); ++a)
      for (size_t b = 0; b < s * s; ++b) T(a, b) = rows[a][b];
    for (size_t b = 0; b < s * s; ++b) T(rows.size(), b) = flat[b];
    if (rank(T) <= rows.size()) continue;
    rows.push_back(std::move(flat));
    B.basis.push_back(h);
    B.reductions.push_back(std::move(A));
  }
  return B;
}

std::pair<Hom, Matrix> random_endomorphism(const End0Basis& B, std::mt19937_64& rng) {
  if (B.basis.empty()) fail(ErrorCode::InvalidArgument, "empty endomorphism basis");
  const FieldPtr& F = B.module->ring()->field();
  std::vector<Scalar> alpha;
  for (size_t i = 0; i < B.r(); ++i) alpha.push_back(F->random(rng, 100));
  Matrix A(F, B.module->ngens(), B.module->ngens());
  for (size_t i = 0; i < B.r(); ++i) A = A + scale(B.reductions[i], alpha[i]);
  return {combine(B.basis, alpha), A};
}

}  // namespace summands
