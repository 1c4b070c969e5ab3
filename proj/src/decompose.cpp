#include "summands/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace summands {

namespace {

Matrix mat_pow(Matrix a, mpz_class e) {
  Matrix r = Matrix::identity(a.field(), a.rows());
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) r = r * a;
    e >>= 1;
    if (e > 0) a = a * a;
  }
  return r;
}

std::vector<Scalar> flatten(const Matrix& A) {
  std::vector<Scalar> v;
  for (size_t i = 0; i < A.rows(); ++i)
    for (size_t j = 0; j < A.cols(); ++j) v.push_back(A(i, j));
  return v;
}

// Columns are the flattened matrices.
Matrix span_matrix(const FieldPtr& F, const std::vector<Matrix>& As, size_t n) {
  Matrix T(F, n * n, As.size());
  for (size_t k = 0; k < As.size(); ++k) {
    auto v = flatten(As[k]);
    for (size_t x = 0; x < v.size(); ++x) T(x, k) = v[x];
  }
  return T;
}

// Coefficients c with sum c_k As[k] = target.
std::optional<std::vector<Scalar>> coordinates_in(const std::vector<Matrix>& As, const Matrix& target) {
  const FieldPtr& F = target.field();
  size_t n = target.rows();
  Matrix T = span_matrix(F, As, n);
  Matrix b(F, n * n, 1);
  auto v = flatten(target);
  for (size_t x = 0; x < v.size(); ++x) b(x, 0) = v[x];
  auto sol = solve(T, b);
  if (!sol) return std::nullopt;
  std::vector<Scalar> c;
  for (size_t k = 0; k < As.size(); ++k) c.push_back((*sol)(k, 0));
  return c;
}

// Same, reading the coordinates off the unit entries when the basis has them.
std::optional<std::vector<Scalar>> coordinates_in(const End0Basis& B, const Matrix& target) {
  if (B.unit_entries.empty()) return coordinates_in(B.reductions, target);
  const FieldPtr& F = target.field();
  std::vector<Scalar> c;
  Matrix A(F, target.rows(), target.cols());
  for (size_t k = 0; k < B.r(); ++k) {
    auto [i, j] = B.unit_entries[k];
    c.push_back(target(i, j));
    if (!c.back().is_zero()) A = A + scale(B.reductions[k], c.back());
  }
  if (A != target) return std::nullopt;
  return c;
}

Matrix linear_combination(const FieldPtr& F, const std::vector<Matrix>& As, const std::vector<Scalar>& c, size_t n) {
  Matrix A(F, n, n);
  for (size_t k = 0; k < As.size(); ++k)
    if (!c[k].is_zero()) A = A + scale(As[k], c[k]);
  return A;
}

Hom scalar_hom(const ModulePtr& M, const Scalar& c) { return scale(identity_hom(M), c); }

// Coprime factors of f: irreducible powers over finite fields; over other
// fields linear factors plus the square-free parts of the remaining cofactor.
std::vector<std::pair<UniPoly, int>> factor_groups(const UniPoly& f) {
  const FieldPtr& F = f.field;
  if (F->is_finite()) return factor(f);
  std::vector<std::pair<UniPoly, int>> out;
  UniPoly rest = monic(f);
  for (auto& [r, m] : find_roots(f)) {
    UniPoly l = UniPoly::linear(F, r);
    out.push_back({l, m});
    rest = rest / pow(l, unsigned(m));
  }
  if (rest.degree() > 0)
    for (auto& g : squarefree_decomposition(rest)) out.push_back(g);
  return out;
}

// Basis of the image of an idempotent and a left inverse on it.
struct Subspace {
  Matrix basis;  // n x w
  Matrix coords;  // w x n with coords * basis = I
  size_t dim() const { return basis.cols(); }
};

Subspace image_of(const Matrix& e) {
  const FieldPtr& F = e.field();
  size_t n = e.rows();
  auto cols = independent_columns(e);
  Subspace S;
  S.basis = Matrix(F, n, cols.size());
  for (size_t k = 0; k < cols.size(); ++k)
    for (size_t i = 0; i < n; ++i) S.basis(i, k) = e(i, cols[k]);
  auto rows = independent_columns(S.basis.transpose());
  Matrix sq(F, cols.size(), cols.size());
  for (size_t a = 0; a < rows.size(); ++a)
    for (size_t k = 0; k < cols.size(); ++k) sq(a, k) = S.basis(rows[a], k);
  Matrix inv = *inverse(sq);
  S.coords = Matrix(F, cols.size(), n);
  for (size_t k = 0; k < cols.size(); ++k)
    for (size_t a = 0; a < rows.size(); ++a) S.coords(k, rows[a]) = inv(k, a);
  return S;
}

Matrix restrict_to(const Subspace& W, const Matrix& a) { return W.coords * a * W.basis; }

unsigned ceil_log(uint64_t p, uint64_t n) {
  unsigned e = 0;
  uint64_t v = 1;
  while (v < n) {
    v *= p;
    ++e;
  }
  return e;
}

struct Corner {
  Matrix e;
  bool certified = false;
  unsigned residue = 1;  // degree of the residue field extension seen
};

// Complete set of orthogonal idempotents of the algebra spanned by As,
// found by splitting corners with random elements.
class IdempotentSearch {
 public:
  IdempotentSearch(const std::vector<Matrix>& As, std::mt19937_64& rng, int attempts, bool local)
      : As_(As), rng_(rng), attempts_(attempts), local_(local) {}

  std::vector<Corner> run(const Matrix& identity) {
    std::vector<Corner> out;
    split(identity, out);
    return out;
  }

  size_t samples = 0;

 private:
  Matrix idempotent_for(const Matrix& e, const Matrix& a, const UniPoly& chi, const UniPoly& g, int mult,
                        size_t w) const {
    const FieldPtr& F = e.field();
    Matrix f;
    if (local_) {
      // Kill everything but the g-part with a power of g(a): the exponent
      // p^e0 (p^e - 1) makes g(a) idempotent-up-to-complement.
      FieldPtr K = common_extension(F, splitting_field(chi));
      uint64_t p = F->characteristic();
      mpz_class N;
      mpz_ui_pow_ui(N.get_mpz_t(), p, ceil_log(p, w + 1));
      N *= mpz_class(std::to_string(K->order())) - 1;
      f = e - mat_pow(evaluate(g, a), N) * e;
    } else {
      UniPoly q = pow(g, unsigned(mult));
      UniPoly h = chi / q;
      auto [d, s, t] = xgcd(q, h);
      (void)d;
      (void)s;
      f = evaluate((t * h) % chi, a) * e;
    }
    if (f * f != f) fail(ErrorCode::IdempotencyCheckFailed, "corner idempotent is not idempotent");
    return f;
  }

  void split(const Matrix& e, std::vector<Corner>& out) {
    const FieldPtr& F = e.field();
    size_t n = e.rows();
    Subspace W = image_of(e);
    size_t w = W.dim();
    Corner c{e, false, 1};
    if (w == 1) {
      c.certified = true;
      out.push_back(c);
      return;
    }
    std::vector<Matrix> restricted;
    for (auto& A : As_) restricted.push_back(restrict_to(W, e * A * e));
    if (rank(span_matrix(F, restricted, w)) == 1) {
      c.certified = true;
      out.push_back(c);
      return;
    }
    for (int attempt = 0; attempt < attempts_; ++attempt) {
      Matrix a(F, n, n);
      for (auto& A : As_) a = a + scale(A, F->random(rng_, 100));
      a = e * a * e;
      UniPoly chi = charpoly(restrict_to(W, a));
      ++samples;
      auto groups = factor_groups(chi);
      if (groups.size() >= 2) {
        for (auto& [g, m] : groups) split(idempotent_for(e, a, chi, g, m, w), out);
        return;
      }
      c.residue = unsigned(std::lcm(c.residue, unsigned(groups[0].first.degree())));
    }
    out.push_back(c);
  }

  const std::vector<Matrix>& As_;
  std::mt19937_64& rng_;
  int attempts_;
  bool local_;
};

Hom hom_from_element(const ModulePtr& M, const ModulePtr& N, const std::vector<Hom>& maps, const Column& v) {
  const Ring& R = *M->ring();
  Hom h = zero_hom(M, N);
  for (size_t a = 0; a < maps.size(); ++a) {
    if (v[a].is_zero()) continue;
    for (size_t j = 0; j < h.images.size(); ++j)
      for (size_t i = 0; i < h.images[j].size(); ++i)
        if (!maps[a].images[j][i].is_zero())
          h.images[j][i] = R.add(h.images[j][i], R.mul(v[a], maps[a].images[j][i]));
    h.shift = maps[a].shift;
  }
  return h;
}

// Quotient of M by extra columns, with the quotient map.
ModulePtr quotient_module(const ModulePtr& M, const std::vector<Column>& extra) {
  std::vector<Column> rels = M->relations();
  rels.insert(rels.end(), extra.begin(), extra.end());
  return make_module(Presentation(M->ring(), M->degrees(), std::move(rels)));
}

Hom identity_images(const ModulePtr& src, const ModulePtr& tgt) {
  Hom h = identity_hom(src);
  h.source = src;
  h.target = tgt;
  return h;
}

bool has_invertible(const std::vector<Matrix>& mats, std::mt19937_64& rng) {
  if (mats.empty()) return false;
  const FieldPtr& F = mats[0].field();
  size_t n = mats[0].rows();
  if (n == 0) return true;
  auto test = [&](const std::vector<Scalar>& c) { return bool(inverse(linear_combination(F, mats, c, n))); };
  double total = F->is_finite() ? std::pow(double(F->order()), double(mats.size())) : 1e300;
  if (total <= 4096) {
    std::vector<Scalar> c(mats.size());
    for (uint64_t idx = 0; idx < uint64_t(total); ++idx) {
      uint64_t x = idx;
      for (auto& ci : c) {
        ci = F->element(x % F->order());
        x /= F->order();
      }
      if (test(c)) return true;
    }
    return false;
  }
  for (int t = 0; t < 64; ++t) {
    std::vector<Scalar> c;
    for (size_t k = 0; k < mats.size(); ++k) c.push_back(F->random(rng, 100));
    if (test(c)) return true;
  }
  return false;
}

Degree min_degree(const ModulePtr& M) { return *std::min_element(M->degrees().begin(), M->degrees().end()); }

}  // namespace

std::string status_name(SummandStatus s) {
  switch (s) {
    case SummandStatus::Certified:
      return "certified-indecomposable";
    case SummandStatus::Presumed:
      return "presumed-indecomposable";
    case SummandStatus::FreeLineBundle:
      return "free";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Eigenvalues and splitters

EigenData eigen_data(const Matrix& A, bool autoextend, uint64_t limit) {
  if (A.rows() != A.cols()) fail(ErrorCode::ShapeMismatch, "eigenvalues of a non-square matrix");
  const FieldPtr& F = A.field();
  size_t n = A.rows();
  EigenData E;
  E.charpoly = charpoly(A);
  E.minpoly = minpoly(A);
  E.field = F;
  if (autoextend) {
    if (F->is_finite()) {
      FieldPtr K = common_extension(F, splitting_field(E.charpoly));
      if (K->order() > limit)
        fail(ErrorCode::UnsupportedExtension, "eigenvalues need " + K->name() + ", beyond the extension limit");
      E.field = K;
    } else {
      size_t found = 0;
      for (auto& r : find_roots(E.charpoly)) found += size_t(r.second);
      if (found < n)
        fail(ErrorCode::UnsupportedExtension,
             "eigenvalues outside " + F->name() + "; declare an extension field containing them");
    }
  }
  Matrix AK = embed(A, E.field);
  size_t total = 0;
  for (auto& [lambda, mult] : find_roots(embed(E.charpoly, E.field))) {
    Matrix shifted = AK - scale(Matrix::identity(E.field, n), lambda);
    E.values.push_back({lambda, unsigned(mult), unsigned(n - rank(shifted))});
    total += size_t(mult);
  }
  E.complete = total == n;
  return E;
}

std::vector<Splitter> graded_splitters(const ModulePtr& M, const Hom& phi, const EigenData& E, ExponentMode mode) {
  if (!M->graded()) fail(ErrorCode::NotGraded, "graded splitters need a graded ring");
  const FieldPtr& F = M->ring()->field();
  if (*E.field != *F) fail(ErrorCode::DescriptorMismatch, "eigenvalues live outside the module's field");
  std::vector<Splitter> out;
  for (auto& ev : E.values) {
    Splitter s;
    s.kind = SplitterKind::GradedPower;
    s.lambda = ev.lambda;
    s.exponent = mode == ExponentMode::MuOfM ? mpz_class(std::to_string(M->ngens())) : mpz_class(ev.geometric);
    s.psi = hom_pow(sub(phi, scalar_hom(M, ev.lambda)), s.exponent);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Splitter> local_splitters(const ModulePtr& M, const Hom& phi) {
  const FieldPtr& F = M->ring()->field();
  if (!F->is_finite()) fail(ErrorCode::CharZero, "local splitters need a finite residue field");
  Matrix A = reduce_mod_m(phi);
  size_t n = A.rows();
  UniPoly chi = charpoly(A);
  FieldPtr K = common_extension(F, splitting_field(chi));
  uint64_t p = F->characteristic();
  mpz_class N;
  mpz_ui_pow_ui(N.get_mpz_t(), p, ceil_log(p, n + 1));
  N *= mpz_class(std::to_string(K->order())) - 1;
  std::vector<Splitter> out;
  for (auto& [lambda, mult] : find_roots(chi)) {
    (void)mult;
    Splitter s;
    s.kind = SplitterKind::IdempotentPower;
    s.lambda = lambda;
    s.exponent = N;
    s.psi = hom_pow(sub(phi, scalar_hom(M, lambda)), N);
    Matrix P = reduce_mod_m(s.psi);
    if (P * P != P) fail(ErrorCode::IdempotencyCheckFailed, "power of phi - lambda is not idempotent modulo m");
    if (P.is_zero() || P.is_identity()) continue;
    out.push_back(std::move(s));
  }
  return out;
}

std::optional<Split> split_by(const ModulePtr& M, const Splitter& s) {
  const RingPtr& R = M->ring();
  bool local = R->is_local();
  size_t n = M->ngens();
  auto K = kernel_of_map(R, s.psi.images, M->relations(), n, M->row_weights());
  Split out;
  // The kernel as the submodule generated by K.
  std::vector<Degree> kdeg;
  for (auto& k : K) {
    Degree d = R->zero_degree();
    if (M->graded())
      for (size_t i = 0; i < n; ++i)
        if (!k[i].is_zero()) {
          d = R->degree(k[i].lead().m) + M->degree(i);
          break;
        }
    kdeg.push_back(d);
  }
  auto krels = K.empty() ? std::vector<Column>{} : kernel_of_map(R, K, M->relations(), n, M->row_weights());
  auto kmin = minimize(make_module(Presentation(R, kdeg, krels)));
  auto imin = minimize(quotient_module(M, K));
  if (kmin.module->ngens() == 0 || imin.module->ngens() == 0) return std::nullopt;
  out.kernel = kmin.module;
  out.image = imin.module;
  Hom kincl{kmin.module, M, {}, R->zero_degree()};
  Hom raw{make_module(Presentation(R, kdeg, {})), M, K, R->zero_degree()};
  for (auto& c : kmin.to_old.images) kincl.images.push_back(summands::apply(raw, c));
  out.kernel_inclusion = kincl;
  Hom induced{imin.to_old.target, M, s.psi.images, s.psi.shift};
  out.image_inclusion = compose(induced, imin.to_old);
  out.image_projection = compose(imin.to_new, identity_images(M, imin.to_new.source));
  // ker + im = M forces the sum to be direct (degree by degree, or by
  // Nakayama after localizing).
  std::vector<Column> both = K;
  both.insert(both.end(), s.psi.images.begin(), s.psi.images.end());
  out.hilbert_ok = minimize(quotient_module(M, both)).module->ngens() == 0;
  (void)local;
  return out;
}

std::vector<Splitter> guess_idempotents(const ModulePtr& M) {
  bool local = M->ring()->is_local();
  auto H = hom_module(M, M);
  auto Hmin = minimize(make_module(H.module));
  std::vector<Hom> gens;
  for (auto& c : Hmin.to_old.images) gens.push_back(hom_from_element(M, M, H.maps, c));
  Hom id = identity_hom(M);
  std::vector<Splitter> out;
  auto consider = [&](const Hom& g) {
    if (is_zero_hom(g, local) || is_zero_hom(sub(g, id), local)) return;
    if (!is_zero_hom(sub(compose(g, g), g), local)) return;
    for (auto& s : out)
      if (equal_homs(s.psi, g, local)) return;
    Splitter s;
    s.kind = SplitterKind::GuessedIdempotent;
    s.psi = g;
    s.exponent = 1;
    out.push_back(std::move(s));
  };
  for (auto& g : gens) {
    consider(g);
    consider(sub(id, g));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Certificates

namespace {

// Polynomial coefficients over k[a_1..a_r] for the symbolic checks.
struct PolyOps {
  using Elem = Poly;
  const Ring* R;
  Elem zero() const { return {}; }
  Elem one() const { return R->one(); }
  Elem add(const Elem& a, const Elem& b) const { return R->add(a, b); }
  Elem sub(const Elem& a, const Elem& b) const { return R->sub(a, b); }
  Elem mul(const Elem& a, const Elem& b) const { return R->mul(a, b); }
  Elem neg(const Elem& a) const { return R->neg(a); }
};

using PolyMatrix = std::vector<std::vector<Poly>>;

PolyMatrix pm_mul(const Ring& R, const PolyMatrix& a, const PolyMatrix& b) {
  size_t n = a.size();
  PolyMatrix c(n, std::vector<Poly>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < n; ++k) {
      if (a[i][k].is_zero()) continue;
      for (size_t j = 0; j < n; ++j)
        if (!b[k][j].is_zero()) c[i][j] = R.add(c[i][j], R.mul(a[i][k], b[k][j]));
    }
  return c;
}

Poly determinant(const Ring& R, const PolyMatrix& a) {
  auto c = berkowitz(PolyOps{&R}, a);
  return a.size() % 2 ? R.neg(c[0]) : c[0];
}

// q = L * (t - c)^d for some c over the closure, with L = q.back().
bool single_root(const Ring& R, const std::vector<Poly>& q) {
  const Field& F = *R.field();
  size_t d = q.size() - 1;
  if (d <= 1) return true;
  uint64_t p = F.characteristic();
  size_t P = 1;
  if (p)
    while (d % (P * p) == 0) P *= p;
  for (size_t i = 0; i <= d; ++i)
    if (i % P && !q[i].is_zero()) return false;
  size_t d0 = d / P;
  std::vector<Poly> g;
  for (size_t j = 0; j <= d0; ++j) g.push_back(q[j * P]);
  const Poly& L = g[d0];
  Poly Lpow = R.one();  // L^(i-1)
  Poly top = R.one();   // g_{d0-1}^i
  mpz_class binom = d0;
  Scalar d0i = F.one();
  for (size_t i = 1; i <= d0; ++i) {
    top = R.mul(top, g[d0 - 1]);
    d0i = F.mul(d0i, F.from_int(int64_t(d0)));
    if (i >= 2) {
      Lpow = R.mul(Lpow, L);
      binom = binom * (d0 - i + 1) / i;
      Poly lhs = R.scale(R.mul(g[d0 - i], Lpow), d0i);
      Poly rhs = R.scale(top, F.from_mpz(binom));
      if (lhs != rhs) return false;
    }
  }
  return true;
}

}  // namespace

Certificate certify_reductions(const std::vector<Matrix>& A, CertifyLevel level) {
  Certificate out;
  if (A.empty()) {
    out.witness = "no endomorphisms";
    return out;
  }
  const FieldPtr& F = A[0].field();
  size_t n = A[0].rows();
  if (n <= 1) {
    out.certified = true;
    out.witness = "End0 = <id>";
    return out;
  }
  // Drop dependent reductions.
  Matrix T = span_matrix(F, A, n);
  std::vector<Matrix> basis;
  for (auto k : independent_columns(T)) basis.push_back(A[k]);
  if (basis.size() == 1) {
    out.certified = true;
    out.witness = "End0 = <id>";
    return out;
  }
  if (level == CertifyLevel::Quick) {
    out.witness = "image of End has dimension " + std::to_string(basis.size());
    return out;
  }
  size_t r = basis.size();
  if (r > size_t(kMaxVars)) {
    out.witness = "too many endomorphisms for a symbolic check";
    return out;
  }
  std::vector<std::string> names;
  for (size_t i = 0; i < r; ++i) names.push_back("a" + std::to_string(i + 1));
  auto P = Ring::polynomial(F, names, {std::vector<int64_t>(r, 1)});
  const Ring& R = *P;
  PolyMatrix G(n, std::vector<Poly>(n));
  for (size_t k = 0; k < r; ++k)
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        if (!basis[k](i, j).is_zero()) G[i][j] = R.add(G[i][j], R.term(R.variable_monomial(k), basis[k](i, j)));

  if (level == CertifyLevel::Charpoly) {
    auto c = berkowitz(PolyOps{&R}, G);
    out.certified = single_root(R, c);
    out.witness = out.certified ? "generic characteristic polynomial is a pure power" : "generic characteristic polynomial has several roots";
    return out;
  }

  // Minimal polynomial: a dependency D*G^d = sum num_j G^j among the powers,
  // found by Cramer's rule on coordinates independent at a specialization.
  std::vector<PolyMatrix> powers{PolyMatrix(n, std::vector<Poly>(n))};
  for (size_t i = 0; i < n; ++i) powers[0][i][i] = R.one();
  std::mt19937_64 rng(12345);
  for (size_t d = 1; d <= n; ++d) {
    powers.push_back(pm_mul(R, powers.back(), G));
    // Specialize to pick d coordinates where I, G, ..., G^(d-1) are independent.
    std::optional<std::vector<size_t>> coords;
    for (int t = 0; t < 16 && !coords; ++t) {
      std::vector<Scalar> alpha;
      for (size_t k = 0; k < r; ++k) alpha.push_back(F->random(rng, 100));
      Matrix K(F, n * n, d);
      for (size_t j = 0; j < d; ++j)
        for (size_t x = 0; x < n * n; ++x) {
          Scalar v;
          for (auto& term : powers[j][x / n][x % n].t) {
            Scalar m = term.c;
            for (size_t k = 0; k < r; ++k) m = F->mul(m, F->pow(alpha[k], uint64_t(term.m.e[k])));
            v = F->add(v, m);
          }
          K(x, j) = v;
        }
      auto rows = independent_columns(K.transpose());
      if (rows.size() == d) coords = rows;
    }
    if (!coords) continue;
    auto entry = [&](size_t j, size_t x) -> const Poly& { return powers[j][x / n][x % n]; };
    PolyMatrix B(d, std::vector<Poly>(d));
    for (size_t a = 0; a < d; ++a)
      for (size_t j = 0; j < d; ++j) B[a][j] = entry(j, (*coords)[a]);
    Poly D = determinant(R, B);
    if (D.is_zero()) continue;
    std::vector<Poly> q(d + 1);
    for (size_t j = 0; j < d; ++j) {
      PolyMatrix Bj = B;
      for (size_t a = 0; a < d; ++a) Bj[a][j] = entry(d, (*coords)[a]);
      q[j] = R.neg(determinant(R, Bj));
    }
    q[d] = D;
    // Check the dependency on every coordinate.
    bool holds = true;
    for (size_t x = 0; x < n * n && holds; ++x) {
      Poly s = R.mul(D, entry(d, x));
      for (size_t j = 0; j < d; ++j) s = R.add(s, R.mul(q[j], entry(j, x)));
      holds = s.is_zero();
    }
    if (!holds) continue;
    out.certified = single_root(R, q);
    out.witness = out.certified ? "generic minimal polynomial is a pure power" : "generic minimal polynomial has several roots";
    return out;
  }
  out.witness = "no generic minimal polynomial found";
  return out;
}

Certificate certify_indecomposable(const ModulePtr& M, CertifyLevel level) {
  if (!is_minimal(*M)) fail(ErrorCode::NotMinimal, "certificates need a minimal presentation");
  if (M->ngens() == 0) return {false, "zero module"};
  if (M->ngens() == 1) return {true, "End0 = <id>"};
  return certify_reductions(end0_basis(M, true).reductions, level);
}

// ---------------------------------------------------------------------------
// Field extension

ModulePtr extend_module(const ModulePtr& M, const RingPtr& target) {
  std::vector<Column> rels = M->relations();
  for (auto& c : rels)
    for (auto& p : c) p = target->embed(p, *M->ring());
  return make_module(Presentation(target, M->degrees(), std::move(rels)));
}

Hom extend_hom(const Hom& h, const ModulePtr& source, const ModulePtr& target) {
  Hom out{source, target, h.images, h.shift};
  const Ring& from = *h.source->ring();
  for (auto& c : out.images)
    for (auto& p : c) p = target->ring()->embed(p, from);
  return out;
}

// ---------------------------------------------------------------------------
// Grouping

bool isomorphic(const ModulePtr& S, const ModulePtr& T, const Degree& delta, std::mt19937_64& rng, int window) {
  if (S->ngens() != T->ngens() || S->nrels() != T->nrels()) return false;
  std::vector<Matrix> there, back;
  if (S->graded()) {
    auto ds = S->degrees(), dt = T->degrees();
    for (auto& d : ds) d = d + delta;
    std::sort(ds.begin(), ds.end());
    std::sort(dt.begin(), dt.end());
    if (ds != dt) return false;
    auto W = default_window(*S, window);
    auto WT = W;
    for (auto& d : WT) d = d + delta;
    if (hilbert_window(*S, W) != hilbert_window(*T, WT)) return false;
    Degree neg = T->ring()->zero_degree() - delta;
    for (auto& h : hom_graded(S, T, delta, true)) there.push_back(reduce_mod_m(h));
    if (!has_invertible(there, rng)) return false;
    for (auto& h : hom_graded(T, S, neg, true)) back.push_back(reduce_mod_m(h));
    return has_invertible(back, rng);
  }
  for (auto& h : hom_module(S, T).maps) there.push_back(reduce_mod_m(h));
  if (!has_invertible(there, rng)) return false;
  for (auto& h : hom_module(T, S).maps) back.push_back(reduce_mod_m(h));
  return has_invertible(back, rng);
}

namespace {

void group_summands(Decomposition& D, const DecomposeConfig& cfg, std::mt19937_64& rng) {
  auto& S = D.summands;
  for (size_t i = 0; i < S.size(); ++i) {
    S[i].twist = S[i].module->ring()->zero_degree();
    bool placed = false;
    if (cfg.group) {
      for (size_t g = 0; g < D.groups.size() && !placed; ++g) {
        const Summand& rep = S[D.groups[g].representative];
        Degree delta = S[i].module->ring()->zero_degree();
        if (S[i].module->graded() && cfg.shift_insensitive && S[i].module->ngens() > 0 &&
            rep.module->ngens() == S[i].module->ngens())
          delta = min_degree(S[i].module) - min_degree(rep.module);
        bool same;
        if (rep.status == SummandStatus::FreeLineBundle || S[i].status == SummandStatus::FreeLineBundle)
          same = rep.status == S[i].status && rep.free_degree + delta == S[i].free_degree;
        else
          same = isomorphic(rep.module, S[i].module, delta, rng, cfg.window);
        if (same) {
          D.groups[g].members.push_back(i);
          S[i].group = g;
          S[i].twist = delta;
          placed = true;
        }
      }
    }
    if (!placed) {
      S[i].group = D.groups.size();
      D.groups.push_back({i, {i}});
    }
  }
}

Summand whole_module(const ModulePtr& M, SummandStatus status) {
  Summand s;
  s.module = M;
  s.status = status;
  s.inclusion = identity_hom(M);
  s.projection = identity_hom(M);
  return s;
}

// Recursive splitting by exact idempotents guessed among End generators.
void guess_split(const ModulePtr& M, const Hom& incl, const Hom& proj, std::vector<Summand>& out, int depth) {
  if (M->ngens() == 0) return;
  auto finish = [&](SummandStatus st) {
    Summand s = whole_module(M, st);
    s.inclusion = incl;
    s.projection = proj;
    s.exact = false;
    out.push_back(s);
  };
  if (M->ngens() == 1) return finish(SummandStatus::Certified);
  auto guesses = depth < 32 ? guess_idempotents(M) : std::vector<Splitter>{};
  if (guesses.empty()) return finish(SummandStatus::Presumed);
  const Hom& g = guesses[0].psi;
  Hom one_minus = sub(identity_hom(M), g);
  // im g = M / im(1 - g) and ker g = M / im g.
  for (const Hom* e : {&g, static_cast<const Hom*>(&one_minus)}) {
    const Hom& other = e == &g ? one_minus : g;
    auto Q = quotient_module(M, other.images);
    auto mini = minimize(Q);
    Hom induced{Q, M, e->images, e->shift};
    Hom to_piece = compose(mini.to_new, identity_images(M, Q));
    Hom from_piece = compose(induced, mini.to_old);
    guess_split(mini.module, compose(incl, from_piece), compose(to_piece, proj), out, depth + 1);
  }
}


struct LocalPiece {
  Summand summand;
  Hom psi;
};

// Summand cut out by a lift psi of the corner idempotent e. Since im psi is
// M / ker psi, it is a summand with complement ker psi exactly when it needs
// no more than rank(e) generators: then psi restricts to a surjection of
// im psi onto itself.
std::optional<LocalPiece> local_corner(const ModulePtr& M, const End0Basis& B, const Corner& corner) {
  const RingPtr& R = M->ring();
  auto c = coordinates_in(B, corner.e);
  if (!c) fail(ErrorCode::IdempotencyCheckFailed, "idempotent outside the endomorphism image");
  Hom psi = combine(B.basis, *c);
  Matrix P = reduce_mod_m(psi);
  if (P * P != P) fail(ErrorCode::IdempotencyCheckFailed, "lifted endomorphism is not idempotent modulo m");
  auto K = kernel_of_map(R, psi.images, M->relations(), M->ngens());
  auto Q = quotient_module(M, K);
  auto mini = minimize(Q);
  if (mini.module->ngens() != rank(P)) return std::nullopt;
  Summand s;
  s.module = mini.module;
  s.status = corner.certified ? SummandStatus::Certified : SummandStatus::Presumed;
  s.inclusion = compose(Hom{Q, M, psi.images, psi.shift}, mini.to_old);
  s.projection = compose(mini.to_new, identity_images(M, Q));
  s.exact = false;
  return LocalPiece{std::move(s), std::move(psi)};
}

// A map sigma: C -> M with e sigma = 0 and p sigma = 1 modulo m.
std::optional<Hom> local_section(const ModulePtr& C, const ModulePtr& M, const Matrix& e, const Matrix& p) {
  auto H = hom_module(C, M);
  const FieldPtr& F = M->ring()->field();
  size_t m = M->ngens(), c = C->ngens(), rows = (m + c) * c;
  Matrix A(F, rows, H.maps.size()), b(F, rows, 1);
  for (size_t l = 0; l < H.maps.size(); ++l) {
    Matrix h = reduce_mod_m(H.maps[l]);
    Matrix top = e * h, bottom = p * h;
    for (size_t j = 0; j < c; ++j) {
      for (size_t i = 0; i < m; ++i) A(j * (m + c) + i, l) = top(i, j);
      for (size_t i = 0; i < c; ++i) A(j * (m + c) + m + i, l) = bottom(i, j);
    }
  }
  for (size_t j = 0; j < c; ++j) b(j * (m + c) + m + j, 0) = F->one();
  auto sol = solve(A, b);
  if (!sol) return std::nullopt;
  std::vector<Scalar> coef;
  for (size_t l = 0; l < H.maps.size(); ++l) coef.push_back((*sol)(l, 0));
  return combine(H.maps, coef);
}

// Splits off every corner whose lift splits M exactly and continues on the
// complement with its own endomorphisms. The witness maps compose to maps
// between M and the sum of the pieces that are isomorphisms modulo m, so both
// are surjective and M is that sum. origin records the corner index of
// top-level pieces.
void local_split(const ModulePtr& M, const End0Basis& B, const std::vector<Corner>& corners, const Hom& incl,
                 const Hom& proj, const DecomposeConfig& cfg, std::mt19937_64& rng, std::vector<Summand>& out,
                 std::vector<size_t>& origin, std::vector<std::string>& notes, bool top = true) {
  auto place = [&](Summand s, size_t from) {
    s.inclusion = compose(incl, s.inclusion);
    s.projection = compose(s.projection, proj);
    if (top) origin.resize(out.size(), SIZE_MAX), origin.push_back(from);
    out.push_back(std::move(s));
  };
  if (corners.size() == 1) {
    Summand s = whole_module(M, corners[0].certified ? SummandStatus::Certified : SummandStatus::Presumed);
    s.exact = top;
    return place(std::move(s), 0);
  }
  const FieldPtr& F = M->ring()->field();
  size_t mu = M->ngens();
  Matrix split(F, mu, mu);
  std::vector<Column> images;
  for (size_t i = 0; i < corners.size(); ++i) {
    auto piece = local_corner(M, B, corners[i]);
    if (!piece) continue;
    split = split + corners[i].e;
    images.insert(images.end(), piece->psi.images.begin(), piece->psi.images.end());
    place(std::move(piece->summand), i);
  }
  if (images.empty()) {
    Summand s = whole_module(M, SummandStatus::Presumed);
    s.exact = top;
    notes.push_back("idempotents modulo m of a piece with " + std::to_string(mu) +
                    " generators did not lift to an exact splitting");
    return place(std::move(s), SIZE_MAX);
  }
  if (split.is_identity()) return;
  auto Q = quotient_module(M, images);
  auto mini = minimize(Q);
  Hom p = compose(mini.to_new, identity_images(M, Q));
  auto sigma = local_section(mini.module, M, split, reduce_mod_m(p));
  if (!sigma) fail(ErrorCode::IdempotencyCheckFailed, "no section of the complement of the split corners");
  End0Basis Bs = end0_basis(mini.module, true);
  IdempotentSearch search(Bs.reductions, rng, cfg.attempts, true);
  auto sub = search.run(Matrix::identity(F, mini.module->ngens()));
  local_split(mini.module, Bs, sub, compose(incl, *sigma), compose(p, proj), cfg, rng, out, origin, notes, false);
}

}  // namespace

// ---------------------------------------------------------------------------
// Driver

Decomposition decompose(const ModulePtr& M0, const DecomposeConfig& cfg) {
  Decomposition D;
  D.input = M0;
  D.seed = cfg.seed;
  std::mt19937_64 rng(cfg.seed);
  auto first = minimize(M0);
  ModulePtr M = first.module;
  RingPtr R = M->ring();
  const FieldPtr& F0 = R->field();
  bool local = R->is_local();
  bool autoextend = cfg.autoextend.value_or(F0->is_finite());
  D.module = M;
  D.field = F0;
  size_t mu = M->ngens();

  if (mu == 0) {
    D.notes.push_back("zero module");
    return D;
  }
  if (M->is_free()) {
    for (size_t j = 0; j < mu; ++j) {
      Summand s;
      s.module = make_module(Presentation::free(R, {M->degree(j)}));
      s.status = SummandStatus::FreeLineBundle;
      s.free_degree = M->degree(j);
      s.inclusion = Hom{s.module, M, {Column(mu)}, R->zero_degree()};
      s.inclusion.images[0][j] = R->one();
      s.projection = Hom{M, s.module, std::vector<Column>(mu, Column(1)), R->zero_degree()};
      s.projection.images[j][0] = R->one();
      D.summands.push_back(std::move(s));
    }
    group_summands(D, cfg, rng);
    return D;
  }
  if (mu == 1) {
    D.summands.push_back(whole_module(M, SummandStatus::Certified));
    group_summands(D, cfg, rng);
    return D;
  }
  if (local && !F0->is_finite()) {
    D.notes.push_back("characteristic 0 local ring: only exact idempotents among End generators are used");
    guess_split(M, identity_hom(M), identity_hom(M), D.summands, 0);
    group_summands(D, cfg, rng);
    return D;
  }

  End0Basis B = end0_basis(M, true);
  std::vector<Corner> corners;
  for (int round = 0;; ++round) {
    IdempotentSearch search(B.reductions, rng, cfg.attempts, local);
    corners = search.run(Matrix::identity(M->ring()->field(), mu));
    D.samples += search.samples;
    unsigned L = 1;
    for (auto& c : corners)
      if (!c.certified) L = unsigned(std::lcm(L, c.residue));
    if (L == 1) break;
    const FieldPtr& F = M->ring()->field();
    if (!F->is_finite() || !autoextend || round > 0) {
      D.notes.push_back("some summands split further over an extension of degree " + std::to_string(L) + " of " +
                        F->name());
      break;
    }
    FieldPtr K = Field::finite(F->characteristic(), F->degree() * L);
    if (K->order() > cfg.extension_limit) {
      D.notes.push_back("splitting needs " + K->name() + ", beyond the extension limit");
      break;
    }
    RingPtr RK = M->ring()->extend_field(K);
    ModulePtr MK = extend_module(M, RK);
    End0Basis BK;
    BK.module = MK;
    BK.graded = B.graded;
    BK.unit_entries = B.unit_entries;
    for (auto& h : B.basis) BK.basis.push_back(extend_hom(h, MK, MK));
    for (auto& A : B.reductions) BK.reductions.push_back(embed(A, K));
    M = MK;
    B = std::move(BK);
    D.module = M;
    D.field = K;
    D.extended = true;
    D.notes.push_back("extended the field to " + K->name());
  }
  R = M->ring();
  const FieldPtr& F = R->field();

  std::vector<size_t> corner_of;
  for (size_t i = 0; i < corners.size(); ++i) corner_of.push_back(i);
  if (corners.size() == 1) {
    Summand s = whole_module(M, corners[0].certified ? SummandStatus::Certified : SummandStatus::Presumed);
    D.summands.push_back(std::move(s));
  } else if (!local) {
    // Lift the idempotents to exact orthogonal idempotents of [End M]_0.
    Hom C = identity_hom(M);
    std::vector<Hom> E;
    for (size_t i = 0; i + 1 < corners.size(); ++i) {
      auto c = coordinates_in(B, corners[i].e);
      if (!c) fail(ErrorCode::IdempotencyCheckFailed, "idempotent outside the endomorphism image");
      Hom x = normalize(compose(C, compose(combine(B.basis, *c), C)));
      int it = 0;
      for (;; ++it) {
        Hom x2 = normalize(compose(x, x));
        if (equal_homs(x2, x)) break;
        if (it > 64) fail(ErrorCode::IdempotencyCheckFailed, "idempotent lifting did not converge");
        Hom x3 = normalize(compose(x2, x));
        x = normalize(sub(scale(x2, F->from_int(3)), scale(x3, F->from_int(2))));
      }
      E.push_back(x);
      C = normalize(sub(C, x));
    }
    E.push_back(C);
    for (size_t i = 0; i < corners.size(); ++i) {
      Hom comp = sub(identity_hom(M), E[i]);
      auto Q = quotient_module(M, comp.images);
      auto mini = minimize(Q);
      Summand s;
      s.module = mini.module;
      s.status = corners[i].certified ? SummandStatus::Certified : SummandStatus::Presumed;
      s.inclusion = compose(Hom{Q, M, E[i].images, E[i].shift}, mini.to_old);
      s.projection = compose(mini.to_new, identity_images(M, Q));
      D.summands.push_back(std::move(s));
    }
  } else {
    std::vector<size_t> origin;
    local_split(M, B, corners, identity_hom(M), identity_hom(M), cfg, rng, D.summands, origin, D.notes);
    corner_of.assign(D.summands.size(), SIZE_MAX);
    for (size_t i = 0; i < origin.size(); ++i) corner_of[i] = origin[i];
  }

  for (size_t i = 0; i < D.summands.size(); ++i) {
    Summand& s = D.summands[i];
    if (s.module->ngens() == 1 && s.module->is_free()) {
      s.status = SummandStatus::FreeLineBundle;
      s.free_degree = s.module->degree(0);
    } else if (s.module->ngens() == 1) {
      s.status = SummandStatus::Certified;
    } else if (s.status == SummandStatus::Presumed && cfg.certify != CertifyLevel::Quick && i < corner_of.size() &&
               corner_of[i] < corners.size()) {
      const Matrix& e = corners[corner_of[i]].e;
      Subspace W = image_of(e);
      std::vector<Matrix> restricted;
      for (auto& A : B.reductions) restricted.push_back(restrict_to(W, e * A * e));
      if (certify_reductions(restricted, cfg.certify).certified) s.status = SummandStatus::Certified;
    }
  }
  (void)F;
  group_summands(D, cfg, rng);
  return D;
}

Soundness check_decomposition(const Decomposition& D, int window) {
  Soundness out;
  const ModulePtr& M = D.module;
  if (!M || M->ngens() == 0) return out;
  const FieldPtr& F = M->ring()->field();
  bool local = M->ring()->is_local();
  size_t mu = M->ngens();
  size_t total = 0;
  for (auto& s : D.summands) {
    total += s.module->ngens();
    if (!is_well_defined(s.inclusion, local) || !is_well_defined(s.projection, local)) out.witnesses = false;
  }
  if (total == mu) {
    // With P the stacked inclusions and Q the stacked projections, Q P = 1
    // gives P Q = 1 and e_S e_T = P_S (Q_S P_T) Q_T = 0.
    Matrix P(F, mu, mu), Q(F, mu, mu);
    size_t off = 0;
    for (auto& s : D.summands) {
      Matrix i = reduce_mod_m(s.inclusion), p = reduce_mod_m(s.projection);
      for (size_t a = 0; a < mu; ++a)
        for (size_t b = 0; b < i.cols(); ++b) {
          P(a, off + b) = i(a, b);
          Q(off + b, a) = p(b, a);
        }
      off += i.cols();
    }
    out.partition = (Q * P).is_identity();
  } else {
    std::vector<Matrix> E;
    Matrix sum(F, mu, mu);
    for (auto& s : D.summands) {
      Matrix e = reduce_mod_m(s.inclusion) * reduce_mod_m(s.projection);
      if (e * e != e) out.partition = false;
      sum = sum + e;
      E.push_back(e);
    }
    if (!sum.is_identity()) out.partition = false;
    for (size_t a = 0; a < E.size(); ++a)
      for (size_t b = 0; b < E.size(); ++b)
        if (a != b && !(E[a] * E[b]).is_zero()) out.partition = false;
  }
  if (M->graded()) {
    auto W = default_window(*M, window);
    auto total = hilbert_window(*M, W);
    std::vector<size_t> parts(W.size(), 0);
    for (auto& s : D.summands) {
      auto h = hilbert_window(*s.module, W);
      for (size_t k = 0; k < W.size(); ++k) parts[k] += h[k];
    }
    out.hilbert = parts == total;
  }
  return out;
}

}  // namespace summands
