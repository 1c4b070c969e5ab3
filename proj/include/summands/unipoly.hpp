#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "summands/field.hpp"

namespace summands {

// Dense univariate polynomial, coefficients low to high, no trailing zeros.
struct UniPoly {
  FieldPtr field;
  std::vector<Scalar> c;

  UniPoly() = default;
  explicit UniPoly(FieldPtr f) : field(std::move(f)) {}
  UniPoly(FieldPtr f, std::vector<Scalar> coeffs);
  static UniPoly constant(FieldPtr f, const Scalar& a);
  static UniPoly x(FieldPtr f);
  // x - a
  static UniPoly linear(FieldPtr f, const Scalar& a);
  static UniPoly from_ints(FieldPtr f, const std::vector<int64_t>& coeffs);

  int degree() const { return int(c.size()) - 1; }
  bool is_zero() const { return c.empty(); }
  bool is_one() const;
  const Scalar& lead() const { return c.back(); }
  Scalar coeff(size_t k) const { return k < c.size() ? c[k] : Scalar(); }
  void normalize();
  Scalar eval(const Scalar& a) const;
  std::string format(const std::string& var = "t") const;
  bool operator==(const UniPoly& o) const { return c == o.c; }
  bool operator!=(const UniPoly& o) const { return c != o.c; }
};

UniPoly operator+(const UniPoly& a, const UniPoly& b);
UniPoly operator-(const UniPoly& a, const UniPoly& b);
UniPoly operator*(const UniPoly& a, const UniPoly& b);
UniPoly scale(const UniPoly& a, const Scalar& s);
std::pair<UniPoly, UniPoly> divmod(const UniPoly& a, const UniPoly& b);
UniPoly operator/(const UniPoly& a, const UniPoly& b);
UniPoly operator%(const UniPoly& a, const UniPoly& b);
UniPoly monic(const UniPoly& a);
UniPoly gcd(const UniPoly& a, const UniPoly& b);
// Returns (g, s, t) with s*a + t*b = g monic.
std::tuple<UniPoly, UniPoly, UniPoly> xgcd(const UniPoly& a, const UniPoly& b);
UniPoly derivative(const UniPoly& a);
UniPoly powmod(const UniPoly& base, const mpz_class& e, const UniPoly& mod);
UniPoly pow(const UniPoly& base, unsigned e);

// Square-free decomposition: f = lc * prod g_i^{m_i} with g_i square-free,
// monic and pairwise coprime.
std::vector<std::pair<UniPoly, int>> squarefree_decomposition(const UniPoly& f);
// Finite fields: pairs (product of all irreducible factors of degree d, d)
// for a square-free monic input.
std::vector<std::pair<UniPoly, int>> distinct_degree_factorization(const UniPoly& f);
// Finite fields: complete factorization into monic irreducibles, sorted.
std::vector<std::pair<UniPoly, int>> factor(const UniPoly& f, uint64_t seed = 0);

// Roots in the coefficient field with multiplicities, deterministically sorted.
std::vector<std::pair<Scalar, int>> find_roots(const UniPoly& f, uint64_t seed = 0);

// Finite fields: the smallest F_{p^e} over which f splits into linear factors.
FieldPtr splitting_field(const UniPoly& f);
// The exponent e of splitting_field(f) without constructing the field.
unsigned splitting_degree(const UniPoly& f);
// Smallest common finite extension of two finite fields of equal characteristic.
FieldPtr common_extension(const FieldPtr& a, const FieldPtr& b);

// Fixed embedding of `source` into `target`; cached per pair of fields.
class Embedding {
 public:
  Embedding(FieldPtr source, FieldPtr target);
  Scalar operator()(const Scalar& x) const;
  const FieldPtr& source() const { return source_; }
  const FieldPtr& target() const { return target_; }
  bool is_identity() const { return identity_; }

 private:
  FieldPtr source_, target_;
  bool identity_ = false;
  Scalar image_of_generator_;
  std::vector<Scalar> table_;
};

Scalar embed(const Scalar& x, const FieldPtr& source, const FieldPtr& target);
UniPoly embed(const UniPoly& f, const FieldPtr& target);

// Irreducibility of a monic polynomial over Q, proven by rational-root and
// modular degree-pattern arguments; false when reducible or undecided.
bool rational_irreducible(const std::vector<mpq_class>& monic);

}  // namespace summands
