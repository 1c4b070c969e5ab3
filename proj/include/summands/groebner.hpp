#pragma once

#include <optional>
#include <vector>

#include "summands/polyring.hpp"

namespace summands {

struct VTerm {
  uint32_t pos;
  Monomial m;
  Scalar c;
};

// Element of a free module S^n: terms sorted decreasingly in a ModuleOrder.
struct Vec {
  std::vector<VTerm> t;
  bool is_zero() const { return t.empty(); }
  const VTerm& lead() const { return t.front(); }
  size_t size() const { return t.size(); }
};

// Monomial order on S^n. Positions in a smaller block are larger; inside a
// block the shifted weight decides (reversed for local orders), then revlex,
// then the smaller position.
struct ModuleOrder {
  std::vector<int64_t> shift;
  std::vector<int> block;
  bool local = false;
  bool pot = false;

  static ModuleOrder graded(std::vector<int64_t> shift, bool local = false) {
    ModuleOrder o;
    o.shift = std::move(shift);
    o.local = local;
    return o;
  }
  size_t rank() const { return shift.size(); }
  int64_t weight(uint32_t pos, const Monomial& m) const { return m.w + shift[pos]; }
  int compare(uint32_t pa, const Monomial& a, uint32_t pb, const Monomial& b) const {
    if (!block.empty() && block[pa] != block[pb]) return block[pa] < block[pb] ? 1 : -1;
    if (pot && pa != pb) return pa < pb ? 1 : -1;
    int64_t wa = a.w + shift[pa], wb = b.w + shift[pb];
    if (wa != wb) return (wa > wb) != local ? 1 : -1;
    int c = revlex(a, b);
    if (c) return c;
    if (pa != pb) return pa < pb ? 1 : -1;
    return 0;
  }
};

struct GBOptions {
  // Discard S-pairs (and generators) of shifted weight above this.
  std::optional<int64_t> bound;
  // Positions j that receive I*e_j for a quotient ring; empty means all.
  std::vector<bool> ideal_positions;
  bool tail_reduce = true;
};

struct GroebnerBasis {
  RingPtr ring;
  ModuleOrder order;
  std::vector<Vec> basis;
  std::optional<int64_t> bound;
  bool partial = false;

  size_t rank() const { return order.rank(); }
  bool is_local() const { return order.local; }
  // Remainder modulo the basis; for local orders Mora's normal form, which
  // is zero exactly for members of the localized submodule.
  Vec normal_form(const Vec& v) const;
  bool contains(const Vec& v) const { return normal_form(v).is_zero(); }
  // Leading terms of the basis by position, for standard-monomial tests.
  bool lead_divides(uint32_t pos, const Monomial& m) const;

  void index();
  std::vector<std::vector<uint32_t>> by_pos;
  std::vector<int64_t> ecarts;
};

using Column = std::vector<Poly>;

// Arithmetic on vectors for a given ring and order.
class VecOps {
 public:
  VecOps(const Ring& r, const ModuleOrder& o) : R(r), F(*r.field()), ord(o) {}
  int cmp(const VTerm& a, const VTerm& b) const { return ord.compare(a.pos, a.m, b.pos, b.m); }
  Vec normalize(std::vector<VTerm> terms) const;
  // a[a0:] - c*m*b
  Vec sub_mul(const Vec& a, size_t a0, const Scalar& c, const Monomial& m, const Vec& b) const;
  Vec add(const Vec& a, const Vec& b) const;
  Vec scale(const Vec& a, const Scalar& c) const;
  Vec mul_poly(const Vec& a, const Poly& f) const;
  void make_monic(Vec& v) const;
  Vec from_column(const Column& c, uint32_t offset = 0) const;
  // Entries in normal form modulo the ring's ideal.
  Column to_column(const Vec& v, size_t rank, uint32_t offset = 0) const;
  int64_t max_weight(const Vec& v) const;
  bool homogeneous(const Vec& v) const;

  const Ring& R;
  const Field& F;
  const ModuleOrder& ord;
};

// Reduced Gröbner basis of a submodule of R^n (R's quotient ideal included
// per position). Global orders run Buchberger with sugar and the
// Gebauer-Möller criteria; local orders compute a standard basis with Mora's
// normal form.
GroebnerBasis groebner_basis(const RingPtr& R, const ModuleOrder& ord, std::vector<Vec> gens,
                             const GBOptions& opt = {});

// Reduced monic Gröbner basis of an ideal of a polynomial ring, global order.
std::vector<Poly> reduced_ideal_basis(const Ring& S, const std::vector<Poly>& gens);

// Every S-pair of the basis reduces to zero (ignoring pairs above the bound).
bool verify_groebner(const GroebnerBasis& G);

// Generators of the syzygies of `gens` (columns of length `rank`), with row
// weights `row_shift` (empty: zero). Results are columns of length gens.size().
std::vector<Column> syzygies(const RingPtr& R, const std::vector<Column>& gens, size_t rank,
                             const std::vector<int64_t>& row_shift = {}, std::optional<int64_t> bound = {});

// {v : phi v in image(rels)} for phi with columns of length `rank`.
std::vector<Column> kernel_of_map(const RingPtr& R, const std::vector<Column>& phi, const std::vector<Column>& rels,
                                  size_t rank, const std::vector<int64_t>& row_shift = {},
                                  std::optional<int64_t> bound = {});

// Weight of a column under row shifts, or nullopt for the zero column or an
// inhomogeneous one.
std::optional<int64_t> column_weight(const Ring& R, const Column& c, const std::vector<int64_t>& row_shift);

}  // namespace summands
