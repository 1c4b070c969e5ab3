#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "summands/errors.hpp"

namespace summands {

class Field;
using FieldPtr = std::shared_ptr<const Field>;

// Element of a Field. Finite fields use a 32-bit code (the residue for F_p,
// log+1 for F_{p^e}); Q and Q(t) keep rational coordinates in a shared
// immutable vector. The default value is zero in every field.
class Scalar {
 public:
  Scalar() = default;

  bool is_zero() const { return raw_ == 0 && !big_; }
  uint32_t raw() const { return raw_; }
  static Scalar from_raw(uint32_t r) {
    Scalar s;
    s.raw_ = r;
    return s;
  }

  bool operator==(const Scalar& o) const {
    if (raw_ != o.raw_) return false;
    if (big_ == o.big_) return true;
    if (!big_ || !o.big_) return false;
    return *big_ == *o.big_;
  }
  bool operator!=(const Scalar& o) const { return !(*this == o); }

 private:
  friend class Field;
  uint32_t raw_ = 0;
  std::shared_ptr<const std::vector<mpq_class>> big_;
};

enum class FieldKind { Rational, Prime, FiniteExtension, RationalExtension };

class Field {
 public:
  static FieldPtr rationals();
  static FieldPtr prime(uint64_t p);
  // F_{p^e} with a tabulated or lexicographically first irreducible modulus.
  static FieldPtr finite(uint64_t p, unsigned e);
  // Modulus is monic, coefficients low to high.
  static FieldPtr finite_with_modulus(uint64_t p, std::vector<uint32_t> modulus);
  static FieldPtr number_field(std::vector<mpq_class> modulus,
                               std::string generator = "t");
  static FieldPtr gaussian();

  FieldKind kind() const { return kind_; }
  uint64_t characteristic() const { return p_; }
  unsigned degree() const { return e_; }
  uint64_t order() const { return q_; }
  bool is_finite() const { return p_ != 0; }
  const std::string& generator_name() const { return gen_name_; }
  std::string name() const;
  const std::vector<uint32_t>& modulus() const { return fmod_; }
  const std::vector<mpq_class>& rational_modulus() const { return qmod_; }
  bool operator==(const Field& o) const;
  bool operator!=(const Field& o) const { return !(*this == o); }

  Scalar zero() const { return {}; }
  Scalar one() const { return from_int(1); }
  Scalar from_int(int64_t v) const;
  Scalar from_mpz(const mpz_class& v) const;
  Scalar from_rational(const mpq_class& v) const;
  Scalar generator() const;

  Scalar add(const Scalar& a, const Scalar& b) const {
    switch (kind_) {
      case FieldKind::Prime: {
        uint64_t s = uint64_t(a.raw_) + b.raw_;
        if (s >= p_) s -= p_;
        return Scalar::from_raw(uint32_t(s));
      }
      case FieldKind::FiniteExtension:
        return Scalar::from_raw(zech_add(a.raw_, b.raw_));
      default:
        return big_add(a, b, false);
    }
  }
  Scalar sub(const Scalar& a, const Scalar& b) const {
    switch (kind_) {
      case FieldKind::Prime: {
        uint64_t s = uint64_t(a.raw_) + (b.raw_ ? p_ - b.raw_ : 0);
        if (s >= p_) s -= p_;
        return Scalar::from_raw(uint32_t(s));
      }
      case FieldKind::FiniteExtension:
        return Scalar::from_raw(zech_add(a.raw_, zech_neg(b.raw_)));
      default:
        return big_add(a, b, true);
    }
  }
  Scalar neg(const Scalar& a) const {
    switch (kind_) {
      case FieldKind::Prime:
        return Scalar::from_raw(a.raw_ ? uint32_t(p_ - a.raw_) : 0);
      case FieldKind::FiniteExtension:
        return Scalar::from_raw(zech_neg(a.raw_));
      default:
        return big_neg(a);
    }
  }
  Scalar mul(const Scalar& a, const Scalar& b) const {
    switch (kind_) {
      case FieldKind::Prime:
        return Scalar::from_raw(uint32_t(uint64_t(a.raw_) * b.raw_ % p_));
      case FieldKind::FiniteExtension: {
        if (!a.raw_ || !b.raw_) return {};
        uint64_t s = uint64_t(a.raw_ - 1) + (b.raw_ - 1);
        if (s >= q_ - 1) s -= q_ - 1;
        return Scalar::from_raw(uint32_t(s + 1));
      }
      default:
        return big_mul(a, b);
    }
  }
  Scalar inv(const Scalar& a) const;
  Scalar div(const Scalar& a, const Scalar& b) const { return mul(a, inv(b)); }
  Scalar pow(const Scalar& a, uint64_t n) const;
  Scalar pow(const Scalar& a, const mpz_class& n) const;
  bool is_one(const Scalar& a) const { return a == one(); }

  // Finite fields: bijection with [0, q) via base-p coordinate digits.
  Scalar element(uint64_t index) const;
  uint64_t index(const Scalar& a) const;
  std::vector<uint32_t> coordinates(const Scalar& a) const;
  Scalar from_coordinates(const std::vector<uint32_t>& digits) const;

  // Q and Q(t): coordinates in the power basis of the generator.
  std::vector<mpq_class> rational_coordinates(const Scalar& a) const;
  Scalar from_rational_coordinates(std::vector<mpq_class> coords) const;

  // Uniform over a finite field; integer coordinates in [-height, height]
  // otherwise.
  Scalar random(std::mt19937_64& rng, int64_t height = 100) const;

  std::string format(const Scalar& a) const;
  // True when format(a) can be used as a coefficient without parentheses.
  bool is_atomic(const Scalar& a) const;

 private:
  Field() = default;
  void build_zech();
  uint32_t zech_add(uint32_t a, uint32_t b) const {
    if (!a) return b;
    if (!b) return a;
    uint64_t qm = q_ - 1;
    uint64_t la = a - 1, lb = b - 1;
    uint64_t d = lb >= la ? lb - la : lb + qm - la;
    uint32_t z = zech_[d];
    if (z == kNone) return 0;
    uint64_t s = la + z;
    if (s >= qm) s -= qm;
    return uint32_t(s + 1);
  }
  uint32_t zech_neg(uint32_t a) const {
    if (!a || p_ == 2) return a;
    uint64_t s = uint64_t(a - 1) + (q_ - 1) / 2;
    if (s >= q_ - 1) s -= q_ - 1;
    return uint32_t(s + 1);
  }
  Scalar big_add(const Scalar& a, const Scalar& b, bool subtract) const;
  Scalar big_neg(const Scalar& a) const;
  Scalar big_mul(const Scalar& a, const Scalar& b) const;
  Scalar make_big(std::vector<mpq_class> coords) const;

  static constexpr uint32_t kNone = 0xffffffffu;

  FieldKind kind_ = FieldKind::Rational;
  uint64_t p_ = 0;
  unsigned e_ = 1;
  uint64_t q_ = 0;
  std::string gen_name_;
  std::vector<uint32_t> fmod_;
  std::vector<mpq_class> qmod_;
  std::vector<uint32_t> exp_;   // exp_[i] = index of g^i
  std::vector<uint32_t> log_;   // log_[index] = i
  std::vector<uint32_t> zech_;  // zech_[n] = log(1 + g^n)
};

bool is_prime(uint64_t n);
std::vector<uint64_t> prime_factors(uint64_t n);

}  // namespace summands
