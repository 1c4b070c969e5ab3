#include "summands/unipoly.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

namespace summands {

UniPoly::UniPoly(FieldPtr f, std::vector<Scalar> coeffs) : field(std::move(f)), c(std::move(coeffs)) {
  normalize();
}

UniPoly UniPoly::constant(FieldPtr f, const Scalar& a) { return UniPoly(std::move(f), {a}); }

UniPoly UniPoly::x(FieldPtr f) {
  Scalar one = f->one();
  return UniPoly(std::move(f), {Scalar(), one});
}

UniPoly UniPoly::linear(FieldPtr f, const Scalar& a) {
  Scalar na = f->neg(a), one = f->one();
  return UniPoly(std::move(f), {na, one});
}

UniPoly UniPoly::from_ints(FieldPtr f, const std::vector<int64_t>& coeffs) {
  std::vector<Scalar> c;
  for (int64_t v : coeffs) c.push_back(f->from_int(v));
  return UniPoly(std::move(f), std::move(c));
}

bool UniPoly::is_one() const { return c.size() == 1 && field->is_one(c[0]); }

void UniPoly::normalize() {
  while (!c.empty() && c.back().is_zero()) c.pop_back();
}

Scalar UniPoly::eval(const Scalar& a) const {
  Scalar r;
  for (size_t k = c.size(); k-- > 0;) r = field->add(field->mul(r, a), c[k]);
  return r;
}

std::string UniPoly::format(const std::string& var) const {
  if (c.empty()) return "0";
  std::string out;
  for (size_t k = c.size(); k-- > 0;) {
    if (c[k].is_zero()) continue;
    std::string s = field->format(c[k]);
    bool neg = s[0] == '-' && field->is_atomic(c[k]);
    if (neg) s = s.substr(1);
    if (!field->is_atomic(c[k])) s = "(" + s + ")";
    if (!out.empty()) out += neg ? "-" : "+";
    else if (neg) out += "-";
    if (k == 0) {
      out += s;
    } else {
      if (s != "1") out += s + "*";
      out += var;
      if (k > 1) out += "^" + std::to_string(k);
    }
  }
  return out;
}

UniPoly operator+(const UniPoly& a, const UniPoly& b) {
  const Field& F = *a.field;
  std::vector<Scalar> c(std::max(a.c.size(), b.c.size()));
  for (size_t k = 0; k < c.size(); ++k) c[k] = F.add(a.coeff(k), b.coeff(k));
  return UniPoly(a.field, std::move(c));
}

UniPoly operator-(const UniPoly& a, const UniPoly& b) {
  const Field& F = *a.field;
  std::vector<Scalar> c(std::max(a.c.size(), b.c.size()));
  for (size_t k = 0; k < c.size(); ++k) c[k] = F.sub(a.coeff(k), b.coeff(k));
  return UniPoly(a.field, std::move(c));
}

UniPoly operator*(const UniPoly& a, const UniPoly& b) {
  if (a.is_zero() || b.is_zero()) return UniPoly(a.field);
  const Field& F = *a.field;
  std::vector<Scalar> c(a.c.size() + b.c.size() - 1);
  for (size_t i = 0; i < a.c.size(); ++i) {
    if (a.c[i].is_zero()) continue;
    for (size_t j = 0; j < b.c.size(); ++j)
      if (!b.c[j].is_zero()) c[i + j] = F.add(c[i + j], F.mul(a.c[i], b.c[j]));
  }
  return UniPoly(a.field, std::move(c));
}

UniPoly scale(const UniPoly& a, const Scalar& s) {
  std::vector<Scalar> c(a.c.size());
  for (size_t k = 0; k < c.size(); ++k) c[k] = a.field->mul(a.c[k], s);
  return UniPoly(a.field, std::move(c));
}

std::pair<UniPoly, UniPoly> divmod(const UniPoly& a, const UniPoly& b) {
  if (b.is_zero()) fail(ErrorCode::DivisionByZero, "polynomial division by zero");
  const Field& F = *a.field;
  std::vector<Scalar> r = a.c;
  size_t db = b.c.size() - 1;
  std::vector<Scalar> q(r.size() >= b.c.size() ? r.size() - db : 0);
  Scalar li = F.inv(b.lead());
  while (r.size() >= b.c.size()) {
    Scalar t = F.mul(r.back(), li);
    size_t s = r.size() - b.c.size();
    q[s] = t;
    if (!t.is_zero())
      for (size_t j = 0; j < db; ++j) r[s + j] = F.sub(r[s + j], F.mul(t, b.c[j]));
    r.pop_back();
    while (!r.empty() && r.back().is_zero()) r.pop_back();
  }
  return {UniPoly(a.field, std::move(q)), UniPoly(a.field, std::move(r))};
}

UniPoly operator/(const UniPoly& a, const UniPoly& b) { return divmod(a, b).first; }
UniPoly operator%(const UniPoly& a, const UniPoly& b) { return divmod(a, b).second; }

UniPoly monic(const UniPoly& a) {
  if (a.is_zero()) return a;
  return scale(a, a.field->inv(a.lead()));
}

UniPoly gcd(const UniPoly& a, const UniPoly& b) {
  UniPoly x = a, y = b;
  while (!y.is_zero()) {
    UniPoly r = x % y;
    x = std::move(y);
    y = std::move(r);
  }
  return monic(x);
}

std::tuple<UniPoly, UniPoly, UniPoly> xgcd(const UniPoly& a, const UniPoly& b) {
  FieldPtr F = a.field;
  UniPoly r0 = a, r1 = b;
  UniPoly s0 = UniPoly::constant(F, F->one()), s1(F);
  UniPoly t0(F), t1 = UniPoly::constant(F, F->one());
  while (!r1.is_zero()) {
    auto [q, r] = divmod(r0, r1);
    UniPoly s2 = s0 - q * s1, t2 = t0 - q * t1;
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.is_zero()) return {r0, s0, t0};
  Scalar li = F->inv(r0.lead());
  return {scale(r0, li), scale(s0, li), scale(t0, li)};
}

UniPoly derivative(const UniPoly& a) {
  std::vector<Scalar> c;
  for (size_t k = 1; k < a.c.size(); ++k) c.push_back(a.field->mul(a.field->from_int(int64_t(k)), a.c[k]));
  return UniPoly(a.field, std::move(c));
}

UniPoly powmod(const UniPoly& base, const mpz_class& e, const UniPoly& mod) {
  UniPoly r = UniPoly::constant(base.field, base.field->one()) % mod;
  UniPoly b = base % mod;
  size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (size_t i = bits; i-- > 0;) {
    r = (r * r) % mod;
    if (mpz_tstbit(e.get_mpz_t(), i)) r = (r * b) % mod;
  }
  return r;
}

UniPoly pow(const UniPoly& base, unsigned e) {
  UniPoly r = UniPoly::constant(base.field, base.field->one());
  UniPoly b = base;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

namespace {

// p-th root of a polynomial whose exponents are all multiples of p.
UniPoly pth_root(const UniPoly& f) {
  const Field& F = *f.field;
  uint64_t p = F.characteristic();
  uint64_t expo = F.order() / p;
  std::vector<Scalar> c;
  for (size_t k = 0; k < f.c.size(); k += p) c.push_back(F.pow(f.c[k], expo));
  return UniPoly(f.field, std::move(c));
}

void sqf_char_p(const UniPoly& f, int mult, std::vector<std::pair<UniPoly, int>>& out) {
  if (f.degree() <= 0) return;
  uint64_t p = f.field->characteristic();
  UniPoly d = derivative(f);
  if (d.is_zero()) {
    sqf_char_p(pth_root(f), mult * int(p), out);
    return;
  }
  UniPoly c = gcd(f, d);
  UniPoly w = f / c;
  int i = 1;
  while (w.degree() > 0) {
    UniPoly y = gcd(w, c);
    UniPoly z = w / y;
    if (z.degree() > 0) out.push_back({monic(z), i * mult});
    ++i;
    w = y;
    c = c / y;
  }
  if (c.degree() > 0) sqf_char_p(pth_root(c), mult * int(p), out);
}

void sort_factors(std::vector<std::pair<UniPoly, int>>& fs) {
  auto key = [](const UniPoly& g) {
    std::vector<uint64_t> k{uint64_t(g.degree())};
    for (size_t i = g.c.size(); i-- > 0;) k.push_back(g.field->index(g.c[i]));
    return k;
  };
  std::sort(fs.begin(), fs.end(), [&](const auto& a, const auto& b) {
    auto ka = key(a.first), kb = key(b.first);
    if (ka != kb) return ka < kb;
    return a.second < b.second;
  });
}

UniPoly random_poly(const FieldPtr& F, int deg, std::mt19937_64& rng) {
  std::vector<Scalar> c(size_t(deg) + 1);
  for (auto& x : c) x = F->random(rng);
  return UniPoly(F, std::move(c));
}

mpz_class field_order(const Field& F) { return mpz_class(std::to_string(F.order())); }

void equal_degree(const UniPoly& f, int d, std::mt19937_64& rng, std::vector<UniPoly>& out) {
  if (f.degree() == d) {
    out.push_back(monic(f));
    return;
  }
  const FieldPtr& F = f.field;
  mpz_class q = field_order(*F);
  for (int attempt = 0; attempt < 4096; ++attempt) {
    UniPoly a = random_poly(F, f.degree() - 1, rng);
    if (a.degree() <= 0) continue;
    UniPoly b(F);
    if (F->characteristic() != 2) {
      mpz_class qd;
      mpz_pow_ui(qd.get_mpz_t(), q.get_mpz_t(), unsigned(d));
      b = powmod(a, (qd - 1) / 2, f) - UniPoly::constant(F, F->one());
    } else {
      // Trace map into F_2 over F_{q^d}.
      unsigned k = 0;
      for (uint64_t t = F->order(); t > 1; t >>= 1) ++k;
      UniPoly t = a % f;
      b = t;
      for (unsigned i = 1; i < k * unsigned(d); ++i) {
        t = (t * t) % f;
        b = b + t;
      }
    }
    UniPoly g = gcd(f, b);
    if (g.degree() > 0 && g.degree() < f.degree()) {
      equal_degree(g, d, rng, out);
      equal_degree(f / g, d, rng, out);
      return;
    }
  }
  fail(ErrorCode::ResourceLimit, "equal-degree splitting did not converge");
}

}  // namespace

std::vector<std::pair<UniPoly, int>> squarefree_decomposition(const UniPoly& f) {
  if (f.is_zero()) fail(ErrorCode::InvalidArgument, "square-free decomposition of zero");
  std::vector<std::pair<UniPoly, int>> out;
  UniPoly g = monic(f);
  if (g.degree() <= 0) return out;
  if (f.field->characteristic() != 0) {
    sqf_char_p(g, 1, out);
    // Merge equal multiplicities arising from separate p-th root branches.
    std::map<int, UniPoly> merged;
    for (auto& [h, m] : out) {
      auto it = merged.find(m);
      if (it == merged.end()) merged.emplace(m, h);
      else it->second = it->second * h;
    }
    out.clear();
    for (auto& [m, h] : merged) out.push_back({h, m});
    return out;
  }
  // Yun's algorithm.
  UniPoly d = derivative(g);
  UniPoly a = gcd(g, d);
  UniPoly b = g / a, c = d / a;
  int i = 1;
  while (b.degree() > 0) {
    UniPoly e = c - derivative(b);
    UniPoly h = gcd(b, e);
    if (h.degree() > 0) out.push_back({h, i});
    b = b / h;
    c = e / h;
    ++i;
  }
  return out;
}

std::vector<std::pair<UniPoly, int>> distinct_degree_factorization(const UniPoly& f) {
  const FieldPtr& F = f.field;
  if (!F->is_finite()) fail(ErrorCode::InvalidArgument, "distinct-degree factorization needs a finite field");
  std::vector<std::pair<UniPoly, int>> out;
  UniPoly rest = monic(f);
  UniPoly x = UniPoly::x(F);
  UniPoly h = x % rest;
  mpz_class q = field_order(*F);
  int d = 1;
  while (rest.degree() >= 2 * d) {
    h = powmod(h, q, rest);
    UniPoly g = gcd(rest, h - x);
    if (g.degree() > 0) {
      out.push_back({g, d});
      rest = rest / g;
      h = h % rest;
    }
    ++d;
  }
  if (rest.degree() > 0) out.push_back({rest, rest.degree()});
  return out;
}

std::vector<std::pair<UniPoly, int>> factor(const UniPoly& f, uint64_t seed) {
  if (!f.field->is_finite()) fail(ErrorCode::InvalidArgument, "complete factorization needs a finite field");
  std::mt19937_64 rng(seed ^ 0x5f3759dfULL);
  std::vector<std::pair<UniPoly, int>> out;
  for (auto& [g, m] : squarefree_decomposition(f)) {
    for (auto& [h, d] : distinct_degree_factorization(g)) {
      std::vector<UniPoly> parts;
      equal_degree(h, d, rng, parts);
      for (auto& u : parts) out.push_back({u, m});
    }
  }
  sort_factors(out);
  return out;
}

namespace {

mpz_class mpz_of(uint64_t v) { return mpz_class(std::to_string(v)); }

mpz_class mod_pos(const mpz_class& a, const mpz_class& m) {
  mpz_class r = a % m;
  if (r < 0) r += m;
  return r;
}

mpz_class inv_mod(const mpz_class& a, const mpz_class& m) {
  mpz_class r;
  if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()))
    fail(ErrorCode::DivisionByZero, "non-invertible residue");
  return r;
}

mpz_class rational_mod(const mpq_class& q, const mpz_class& m) {
  return mod_pos(q.get_num() * inv_mod(mod_pos(q.get_den(), m), m), m);
}

// Wang's rational reconstruction with symmetric bounds.
bool reconstruct(const mpz_class& u, const mpz_class& m, mpq_class& out) {
  mpz_class bound;
  mpz_sqrt(bound.get_mpz_t(), mpz_class(m / 2).get_mpz_t());
  mpz_class r0 = m, r1 = mod_pos(u, m), t0 = 0, t1 = 1;
  while (r1 > bound) {
    mpz_class q = r0 / r1;
    mpz_class r2 = r0 - q * r1, t2 = t0 - q * t1;
    r0 = r1;
    r1 = r2;
    t0 = t1;
    t1 = t2;
  }
  if (t1 == 0 || abs(t1) > bound) return false;
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), r1.get_mpz_t(), t1.get_mpz_t());
  if (g != 1) return false;
  out = mpq_class(r1, t1);
  out.canonicalize();
  return true;
}

using ZPoly = std::vector<mpz_class>;

mpz_class zeval(const ZPoly& f, const mpz_class& x, const mpz_class& m) {
  mpz_class r = 0;
  for (size_t k = f.size(); k-- > 0;) r = mod_pos(r * x + f[k], m);
  return r;
}

ZPoly zderiv(const ZPoly& f, const mpz_class& m) {
  ZPoly d;
  for (size_t k = 1; k < f.size(); ++k) d.push_back(mod_pos(f[k] * int(k), m));
  return d;
}

// Newton lift of a simple root r mod p to modulus m = p^N.
mpz_class hensel(const ZPoly& f, mpz_class r, const mpz_class& m, unsigned steps) {
  ZPoly d = zderiv(f, m);
  for (unsigned s = 0; s < steps; ++s) {
    mpz_class fv = zeval(f, r, m);
    if (fv == 0) break;
    r = mod_pos(r - fv * inv_mod(zeval(d, r, m), m), m);
  }
  return r;
}

std::vector<uint64_t> roots_mod_p(const std::vector<mpz_class>& coeffs, uint64_t p) {
  FieldPtr Fp = Field::prime(p);
  std::vector<Scalar> c;
  for (auto& v : coeffs) c.push_back(Fp->from_mpz(v));
  UniPoly g(Fp, c);
  std::vector<uint64_t> out;
  if (g.degree() <= 0) return out;
  for (auto& [r, m] : find_roots(g, p)) out.push_back(r.raw());
  return out;
}

bool squarefree_mod_p(const std::vector<mpz_class>& coeffs, uint64_t p) {
  FieldPtr Fp = Field::prime(p);
  std::vector<Scalar> c;
  for (auto& v : coeffs) c.push_back(Fp->from_mpz(v));
  UniPoly g(Fp, c);
  return gcd(g, derivative(g)).degree() == 0;
}

// Roots of a monic square-free polynomial over Q or Q(t) with g(0) != 0.
std::vector<Scalar> simple_roots_char0(const UniPoly& g) {
  const FieldPtr& K = g.field;
  unsigned n = K->degree();
  size_t m = size_t(g.degree());
  std::vector<std::vector<mpq_class>> gc;
  mpz_class den = 1;
  for (auto& s : g.c) {
    gc.push_back(K->rational_coordinates(s));
    for (auto& q : gc.back()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den().get_mpz_t());
  }
  const auto& theta_mod = K->rational_modulus();
  for (auto& q : theta_mod) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den().get_mpz_t());

  // Pick a prime where the generator's modulus splits into distinct linear
  // factors and every conjugate of g stays square-free.
  uint64_t p = 0;
  std::vector<uint64_t> theta_roots;
  std::vector<std::vector<uint64_t>> conj_roots;
  for (uint64_t cand = 3; cand < 100000 && !p; cand += 2) {
    if (!is_prime(cand) || mpz_divisible_ui_p(den.get_mpz_t(), cand)) continue;
    mpz_class P = mpz_of(cand);
    std::vector<uint64_t> tr;
    if (n == 1) {
      tr = {0};
    } else {
      std::vector<mpz_class> tm;
      for (auto& q : theta_mod) tm.push_back(rational_mod(q, P));
      if (!squarefree_mod_p(tm, cand)) continue;
      tr = roots_mod_p(tm, cand);
      if (tr.size() != n) continue;
    }
    bool ok = true;
    std::vector<std::vector<uint64_t>> cr;
    for (uint64_t r : tr) {
      std::vector<mpz_class> gj;
      for (size_t k = 0; k <= m; ++k) {
        mpz_class v = 0, pw = 1;
        for (unsigned t = 0; t < n; ++t) {
          v += rational_mod(gc[k][t], P) * pw;
          pw = pw * r % P;
        }
        gj.push_back(mod_pos(v, P));
      }
      if (!squarefree_mod_p(gj, cand)) {
        ok = false;
        break;
      }
      cr.push_back(roots_mod_p(gj, cand));
    }
    if (!ok) continue;
    p = cand;
    theta_roots = tr;
    conj_roots = cr;
  }
  if (!p) fail(ErrorCode::ResourceLimit, "no suitable prime for root finding");

  size_t max_roots = m;
  double tuples = 1;
  for (auto& r : conj_roots) {
    max_roots = std::min(max_roots, r.size());
    tuples *= double(r.size());
  }
  if (max_roots == 0) return {};
  if (tuples > 100000) fail(ErrorCode::ResourceLimit, "too many root combinations");

  // Height bound for Q: a root a/b of the integer model has |a| <= |F_0|,
  // b <= |F_m|, and reconstruction uses symmetric bounds.
  mpz_class exact_bound = 0;
  if (n == 1) {
    mpz_class f0 = abs(mpz_class(gc[0][0] * den)), fm = abs(mpz_class(gc[m][0] * den));
    mpz_class h = f0 > fm ? f0 : fm;
    exact_bound = 2 * h * h + 1;
  }
  mpz_class P = mpz_of(p);
  std::vector<Scalar> found;
  for (unsigned N = 16;; N *= 2) {
    mpz_class M;
    mpz_pow_ui(M.get_mpz_t(), P.get_mpz_t(), N);
    unsigned steps = 1;
    while ((1u << steps) < N + 1) ++steps;
    ++steps;
    std::vector<mpz_class> rl(n);
    if (n > 1) {
      ZPoly tm;
      for (auto& q : theta_mod) tm.push_back(rational_mod(q, M));
      for (unsigned j = 0; j < n; ++j) rl[j] = hensel(tm, mpz_of(theta_roots[j]), M, steps);
    }
    std::vector<std::vector<mpz_class>> lifted(n);
    for (unsigned j = 0; j < n; ++j) {
      ZPoly gj(m + 1);
      for (size_t k = 0; k <= m; ++k) {
        mpz_class v = 0, pw = 1;
        for (unsigned t = 0; t < n; ++t) {
          v += rational_mod(gc[k][t], M) * pw;
          pw = pw * rl[j] % M;
        }
        gj[k] = mod_pos(v, M);
      }
      for (uint64_t r : conj_roots[j]) lifted[j].push_back(hensel(gj, mpz_of(r), M, steps));
    }
    found.clear();
    std::vector<size_t> pick(n, 0);
    while (true) {
      // Solve the Vandermonde system sum_t b_t rl_j^t = rho_j modulo M.
      std::vector<std::vector<mpz_class>> A(n, std::vector<mpz_class>(n + 1));
      for (unsigned j = 0; j < n; ++j) {
        mpz_class pw = 1;
        for (unsigned t = 0; t < n; ++t) {
          A[j][t] = pw;
          pw = pw * rl[j] % M;
        }
        A[j][n] = lifted[j][pick[j]];
      }
      bool solvable = true;
      for (unsigned col = 0; col < n && solvable; ++col) {
        unsigned piv = col;
        while (piv < n && mpz_divisible_ui_p(A[piv][col].get_mpz_t(), p)) ++piv;
        if (piv == n) {
          solvable = false;
          break;
        }
        std::swap(A[piv], A[col]);
        mpz_class iv = inv_mod(A[col][col], M);
        for (unsigned t = col; t <= n; ++t) A[col][t] = A[col][t] * iv % M;
        for (unsigned r = 0; r < n; ++r) {
          if (r == col || A[r][col] == 0) continue;
          mpz_class f = A[r][col];
          for (unsigned t = col; t <= n; ++t) A[r][t] = mod_pos(A[r][t] - f * A[col][t], M);
        }
      }
      if (solvable) {
        std::vector<mpq_class> coords(n);
        bool ok = true;
        for (unsigned t = 0; t < n && ok; ++t) ok = reconstruct(A[t][n], M, coords[t]);
        if (ok) {
          Scalar beta = K->from_rational_coordinates(coords);
          if (g.eval(beta).is_zero() && std::find(found.begin(), found.end(), beta) == found.end())
            found.push_back(beta);
        }
      }
      unsigned j = 0;
      while (j < n && ++pick[j] == lifted[j].size()) pick[j++] = 0;
      if (j == n) break;
    }
    if (found.size() == max_roots) break;
    if (n == 1 && M > exact_bound) break;
    if (N >= 4096) break;
  }
  return found;
}

}  // namespace

std::vector<std::pair<Scalar, int>> find_roots(const UniPoly& f, uint64_t seed) {
  if (f.is_zero()) fail(ErrorCode::InvalidArgument, "roots of the zero polynomial");
  const FieldPtr& F = f.field;
  std::vector<std::pair<Scalar, int>> out;
  if (f.degree() <= 0) return out;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (auto& [g, m] : squarefree_decomposition(f)) {
    if (F->is_finite()) {
      UniPoly x = UniPoly::x(F);
      UniPoly h = gcd(g, powmod(x, mpz_class(std::to_string(F->order())), g) - x);
      if (h.degree() <= 0) continue;
      std::vector<UniPoly> lin;
      equal_degree(h, 1, rng, lin);
      for (auto& l : lin) out.push_back({F->neg(l.c[0]), m});
    } else {
      UniPoly rest = g;
      if (rest.c[0].is_zero()) {
        out.push_back({Scalar(), m});
        rest = rest / UniPoly::x(F);
      }
      if (rest.degree() <= 0) continue;
      for (auto& r : simple_roots_char0(monic(rest))) out.push_back({r, m});
    }
  }
  if (F->is_finite()) {
    std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) { return F->index(a.first) < F->index(b.first); });
  } else {
    std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
      auto ca = F->rational_coordinates(a.first), cb = F->rational_coordinates(b.first);
      for (size_t k = 0; k < ca.size(); ++k)
        if (ca[k] != cb[k]) return ca[k] < cb[k];
      return false;
    });
  }
  return out;
}

unsigned splitting_degree(const UniPoly& f) {
  const FieldPtr& F = f.field;
  if (!F->is_finite()) fail(ErrorCode::UnsupportedExtension, "splitting fields are computed only over finite fields");
  uint64_t l = 1;
  if (f.degree() > 0)
    for (auto& [g, m] : squarefree_decomposition(f))
      for (auto& [h, d] : distinct_degree_factorization(g)) l = std::lcm(l, uint64_t(d));
  return unsigned(l) * F->degree();
}

FieldPtr splitting_field(const UniPoly& f) {
  unsigned e = splitting_degree(f);
  if (e == f.field->degree()) return f.field;
  return Field::finite(f.field->characteristic(), e);
}

FieldPtr common_extension(const FieldPtr& a, const FieldPtr& b) {
  if (*a == *b) return a;
  if (a->characteristic() != b->characteristic() || !a->is_finite())
    fail(ErrorCode::NotAnExtension, "no common extension of " + a->name() + " and " + b->name());
  unsigned e = unsigned(std::lcm(a->degree(), b->degree()));
  if (e == a->degree()) return a;
  if (e == b->degree()) return b;
  return Field::finite(a->characteristic(), e);
}

Embedding::Embedding(FieldPtr source, FieldPtr target) : source_(std::move(source)), target_(std::move(target)) {
  const Field& S = *source_;
  const Field& T = *target_;
  if (S == T) {
    identity_ = true;
    return;
  }
  bool ok = false;
  if (S.kind() == FieldKind::Rational && T.kind() == FieldKind::RationalExtension) ok = true;
  if (S.is_finite() && T.is_finite() && S.characteristic() == T.characteristic() && T.degree() % S.degree() == 0) ok = true;
  if (!ok) fail(ErrorCode::NotAnExtension, T.name() + " is not an extension of " + S.name());
  if (S.kind() == FieldKind::FiniteExtension) {
    std::vector<Scalar> c;
    for (uint32_t v : S.modulus()) c.push_back(T.from_int(v));
    auto roots = find_roots(UniPoly(target_, c), 1);
    if (roots.empty()) fail(ErrorCode::NotAnExtension, "modulus has no root in " + T.name());
    image_of_generator_ = roots.front().first;
    if (S.order() <= (1u << 16)) {
      table_.resize(S.order());
      for (uint64_t i = 0; i < S.order(); ++i) {
        Scalar x = S.element(i);
        auto d = S.coordinates(x);
        Scalar r;
        for (size_t k = d.size(); k-- > 0;) r = T.add(T.mul(r, image_of_generator_), T.from_int(d[k]));
        table_[x.raw()] = r;
      }
    }
  }
}

Scalar Embedding::operator()(const Scalar& x) const {
  if (identity_) return x;
  const Field& S = *source_;
  const Field& T = *target_;
  switch (S.kind()) {
    case FieldKind::Rational: return T.from_rational(S.rational_coordinates(x)[0]);
    case FieldKind::Prime: return T.from_int(x.raw());
    case FieldKind::FiniteExtension: {
      if (!table_.empty()) return table_[x.raw()];
      auto d = S.coordinates(x);
      Scalar r;
      for (size_t k = d.size(); k-- > 0;) r = T.add(T.mul(r, image_of_generator_), T.from_int(d[k]));
      return r;
    }
    default: break;
  }
  fail(ErrorCode::NotAnExtension, "unsupported embedding");
}

namespace {
std::shared_ptr<const Embedding> cached_embedding(const FieldPtr& s, const FieldPtr& t) {
  static std::mutex mu;
  static std::map<std::pair<const Field*, const Field*>, std::shared_ptr<const Embedding>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(s.get(), t.get());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto e = std::make_shared<const Embedding>(s, t);
  cache.emplace(key, e);
  return e;
}
}  // namespace

Scalar embed(const Scalar& x, const FieldPtr& source, const FieldPtr& target) {
  if (source == target) return x;
  return (*cached_embedding(source, target))(x);
}

UniPoly embed(const UniPoly& f, const FieldPtr& target) {
  if (f.field == target) return f;
  auto e = cached_embedding(f.field, target);
  std::vector<Scalar> c;
  for (auto& s : f.c) c.push_back((*e)(s));
  return UniPoly(target, std::move(c));
}

bool rational_irreducible(const std::vector<mpq_class>& monic_coeffs) {
  FieldPtr Q = Field::rationals();
  std::vector<Scalar> c;
  for (auto& v : monic_coeffs) c.push_back(Q->from_rational(v));
  UniPoly g(Q, c);
  int n = g.degree();
  if (n <= 0) return false;
  if (n == 1) return true;
  if (gcd(g, derivative(g)).degree() > 0) return false;
  if (!find_roots(g).empty()) return false;
  if (n <= 3) return true;
  mpz_class den = 1;
  for (auto& v : monic_coeffs) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), v.get_den().get_mpz_t());
  std::set<int> possible;
  for (int d = 0; d <= n; ++d) possible.insert(d);
  int used = 0;
  for (uint64_t p = 2; p < 2000 && used < 60; ++p) {
    if (!is_prime(p) || mpz_divisible_ui_p(den.get_mpz_t(), p)) continue;
    FieldPtr Fp = Field::prime(p);
    std::vector<Scalar> cp;
    for (auto& v : monic_coeffs) cp.push_back(Fp->from_rational(v));
    UniPoly gp(Fp, cp);
    if (gcd(gp, derivative(gp)).degree() > 0) continue;
    ++used;
    std::set<int> sums{0};
    for (auto& [h, m] : factor(gp, p)) {
      std::set<int> next = sums;
      for (int s : sums) next.insert(s + h.degree());
      sums = std::move(next);
    }
    std::set<int> inter;
    for (int d : possible)
      if (sums.count(d)) inter.insert(d);
    possible = std::move(inter);
    if (possible.size() == 2) return true;
  }
  return false;
}

}  // namespace summands
