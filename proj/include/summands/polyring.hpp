#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "summands/field.hpp"

namespace summands {

constexpr int kMaxVars = 16;

using Degree = std::vector<int64_t>;

// Exponent vector with its cached weighted degree.
struct Monomial {
  std::array<uint16_t, kMaxVars> e{};
  int64_t w = 0;

  bool operator==(const Monomial& o) const { return e == o.e; }
  bool operator!=(const Monomial& o) const { return e != o.e; }
  bool is_one() const { return w == 0 && e == std::array<uint16_t, kMaxVars>{}; }
  bool divides(const Monomial& o) const {
    for (int i = 0; i < kMaxVars; ++i)
      if (e[i] > o.e[i]) return false;
    return true;
  }
  Monomial operator*(const Monomial& o) const {
    Monomial r;
    for (int i = 0; i < kMaxVars; ++i) {
      uint32_t s = uint32_t(e[i]) + o.e[i];
      if (s > 0xffff) fail(ErrorCode::ResourceLimit, "exponent overflow");
      r.e[i] = uint16_t(s);
    }
    r.w = w + o.w;
    return r;
  }
  // this / o, assuming o divides this.
  Monomial operator/(const Monomial& o) const {
    Monomial r;
    for (int i = 0; i < kMaxVars; ++i) r.e[i] = uint16_t(e[i] - o.e[i]);
    r.w = w - o.w;
    return r;
  }
  unsigned total_degree() const {
    unsigned s = 0;
    for (auto x : e) s += x;
    return s;
  }
  size_t hash() const {
    size_t h = 1469598103934665603ull;
    for (auto x : e) h = (h ^ x) * 1099511628211ull;
    return h;
  }
};

struct MonomialHash {
  size_t operator()(const Monomial& m) const { return m.hash(); }
};

// Reverse lexicographic tie-break: negative if a < b.
inline int revlex(const Monomial& a, const Monomial& b) {
  for (int i = kMaxVars - 1; i >= 0; --i)
    if (a.e[i] != b.e[i]) return a.e[i] < b.e[i] ? 1 : -1;
  return 0;
}

// Weighted grevlex; with `local` the degree comparison is reversed
// (negative weighted reverse lexicographic order).
inline int compare_monomials(const Monomial& a, const Monomial& b, bool local) {
  if (a.w != b.w) return (a.w > b.w) != local ? 1 : -1;
  return revlex(a, b);
}

struct Term {
  Monomial m;
  Scalar c;
};

// Sparse polynomial, terms sorted decreasingly in the ring's global order.
struct Poly {
  std::vector<Term> t;
  bool is_zero() const { return t.empty(); }
  size_t size() const { return t.size(); }
  const Term& lead() const { return t.front(); }
  bool operator==(const Poly& o) const {
    if (t.size() != o.t.size()) return false;
    for (size_t i = 0; i < t.size(); ++i)
      if (t[i].m != o.t[i].m || t[i].c != o.t[i].c) return false;
    return true;
  }
  bool operator!=(const Poly& o) const { return !(*this == o); }
};

enum class RingMode { Graded, Local };

class Ring;
using RingPtr = std::shared_ptr<const Ring>;

// Rational w with w . deg(x_i) >= 1 for every variable, when one exists.
std::optional<std::vector<mpq_class>> positivity_witness(const std::vector<Degree>& variable_degrees);
bool validate_positive_grading(const std::vector<Degree>& variable_degrees, std::vector<mpq_class>* witness = nullptr);

class Ring : public std::enable_shared_from_this<Ring> {
 public:
  // `degrees` has one row per grading coordinate and one column per variable.
  static RingPtr polynomial(FieldPtr field, std::vector<std::string> vars, const std::vector<std::vector<int64_t>>& degrees,
                            RingMode mode = RingMode::Graded);
  // Quotient by an ideal of this polynomial ring. Graded mode requires
  // homogeneous generators.
  RingPtr quotient(const std::vector<Poly>& ideal) const;
  // Same ring over a larger field.
  RingPtr extend_field(const FieldPtr& target) const;

  const FieldPtr& field() const { return field_; }
  size_t nvars() const { return vars_.size(); }
  const std::vector<std::string>& variables() const { return vars_; }
  size_t grading_rank() const { return rank_; }
  const Degree& variable_degree(size_t i) const { return var_deg_[i]; }
  const std::vector<Degree>& variable_degrees() const { return var_deg_; }
  const std::vector<int64_t>& weights() const { return weights_; }
  const std::vector<mpq_class>& witness() const { return witness_; }
  RingMode mode() const { return mode_; }
  bool is_local() const { return mode_ == RingMode::Local; }
  bool is_quotient() const { return !ideal_.empty(); }
  // Rank-1 grading with every variable of degree 1.
  bool standard_graded() const;
  const std::vector<Poly>& ideal_generators() const { return ideal_; }
  const std::vector<Poly>& ideal_basis() const { return ideal_gb_; }
  // The ambient polynomial ring (itself when there is no ideal).
  RingPtr base() const;

  int compare(const Monomial& a, const Monomial& b) const { return compare_monomials(a, b, false); }
  Monomial one_monomial() const { return Monomial{}; }
  Monomial variable_monomial(size_t i) const;
  Monomial make_monomial(const std::vector<unsigned>& exps) const;
  Monomial lcm(const Monomial& a, const Monomial& b) const;
  int64_t weight_of(const Degree& d) const;
  Degree degree(const Monomial& m) const;
  Degree zero_degree() const { return Degree(rank_, 0); }

  Poly zero() const { return {}; }
  Poly constant(const Scalar& c) const;
  Poly from_int(int64_t v) const { return constant(field_->from_int(v)); }
  Poly one() const { return constant(field_->one()); }
  Poly variable(size_t i) const;
  Poly term(const Monomial& m, const Scalar& c) const;

  Poly add(const Poly& a, const Poly& b) const;
  Poly sub(const Poly& a, const Poly& b) const;
  Poly neg(const Poly& a) const;
  Poly scale(const Poly& a, const Scalar& s) const;
  // a*c*m without reduction.
  Poly mul_term(const Poly& a, const Monomial& m, const Scalar& c) const;
  // a - c*m*b without reduction.
  Poly sub_mul(const Poly& a, const Scalar& c, const Monomial& m, const Poly& b) const;
  // Product, reduced modulo the ideal.
  Poly mul(const Poly& a, const Poly& b) const;
  Poly pow(const Poly& a, unsigned e) const;
  // Normal form modulo the ideal's Gröbner basis.
  Poly reduce(const Poly& a) const;
  // Sort and combine an arbitrary term list.
  Poly normalize(std::vector<Term> terms) const;

  std::optional<Degree> degree_of(const Poly& f) const;
  bool is_homogeneous(const Poly& f) const { return f.is_zero() || degree_of(f).has_value(); }
  Scalar constant_term(const Poly& f) const;
  bool is_constant(const Poly& f) const { return f.is_zero() || (f.t.size() == 1 && f.t[0].m.is_one()); }
  // Lowest weighted degree among the terms (order of vanishing at the origin).
  int64_t lowest_weight(const Poly& f) const;

  // All monomials of degree d, in decreasing order.
  std::vector<Monomial> monomials_of_degree(const Degree& d) const;
  // All monomials of weight w.
  std::vector<Monomial> monomials_of_weight(int64_t w) const;
  // k-basis of [R]_d: degree-d monomials outside the initial ideal.
  std::vector<Monomial> basis_in_degree(const Degree& d) const;
  bool is_standard(const Monomial& m) const;

  Poly embed(const Poly& f, const Ring& source) const;
  std::string format(const Poly& f) const;
  std::string format_monomial(const Monomial& m) const;
  std::string format_degree(const Degree& d) const;

 private:
  Ring() = default;

  FieldPtr field_;
  std::vector<std::string> vars_;
  size_t rank_ = 0;
  std::vector<Degree> var_deg_;
  std::vector<int64_t> weights_;
  std::vector<mpq_class> witness_;
  RingMode mode_ = RingMode::Graded;
  std::vector<Poly> ideal_;
  std::vector<Poly> ideal_gb_;
  std::vector<Monomial> ideal_leads_;
  std::shared_ptr<const Ring> base_;
};

// Degree arithmetic in Z^r.
Degree operator+(const Degree& a, const Degree& b);
Degree operator-(const Degree& a, const Degree& b);
std::string format_degree_vector(const Degree& d);

}  // namespace summands
