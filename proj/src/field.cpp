#include "summands/field.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "summands/unipoly.hpp"

namespace summands {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::DescriptorMismatch: return "DescriptorMismatch";
    case ErrorCode::NotAnExtension: return "NotAnExtension";
    case ErrorCode::RingMismatch: return "RingMismatch";
    case ErrorCode::NotGraded: return "NotGraded";
    case ErrorCode::MixedHomogeneity: return "MixedHomogeneity";
    case ErrorCode::BoundExceeded: return "BoundExceeded";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotMinimal: return "NotMinimal";
    case ErrorCode::GradingInvalid: return "GradingInvalid";
    case ErrorCode::UnsupportedExtension: return "UnsupportedExtension";
    case ErrorCode::IdempotencyCheckFailed: return "IdempotencyCheckFailed";
    case ErrorCode::ResourceLimit: return "ResourceLimit";
    case ErrorCode::CharZero: return "CharZero";
    case ErrorCode::NonIntegralDegrees: return "NonIntegralDegrees";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::SemanticError: return "SemanticError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

bool is_prime(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<uint64_t> prime_factors(uint64_t n) {
  std::vector<uint64_t> out;
  for (uint64_t d = 2; d * d <= n; ++d) {
    if (n % d) continue;
    out.push_back(d);
    while (n % d == 0) n /= d;
  }
  if (n > 1) out.push_back(n);
  return out;
}

namespace {

// Dense polynomials over F_p, low to high, used only to build field tables.
using Coeffs = std::vector<uint64_t>;

void trim(Coeffs& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Coeffs mulmod(const Coeffs& a, const Coeffs& b, const Coeffs& g, uint64_t p) {
  if (a.empty() || b.empty()) return {};
  Coeffs r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  size_t n = g.size() - 1;
  for (size_t k = r.size(); k-- > n;) {
    uint64_t c = r[k];
    if (!c) continue;
    for (size_t j = 0; j <= n; ++j) r[k - n + j] = (r[k - n + j] + (p - c) * g[j]) % p;
  }
  r.resize(std::min(r.size(), n));
  trim(r);
  return r;
}

Coeffs powmod(Coeffs base, uint64_t e, const Coeffs& g, uint64_t p) {
  Coeffs r{1};
  while (e) {
    if (e & 1) r = mulmod(r, base, g, p);
    base = mulmod(base, base, g, p);
    e >>= 1;
  }
  return r;
}

uint64_t inv_mod(uint64_t a, uint64_t p) {
  int64_t t = 0, nt = 1, r = int64_t(p), nr = int64_t(a % p);
  while (nr) {
    int64_t q = r / nr;
    std::tie(t, nt) = std::make_pair(nt, t - q * nt);
    std::tie(r, nr) = std::make_pair(nr, r - q * nr);
  }
  if (r != 1) fail(ErrorCode::DivisionByZero, "inverse of zero");
  return uint64_t(t < 0 ? t + int64_t(p) : t);
}

Coeffs polymod(Coeffs a, const Coeffs& b, uint64_t p) {
  trim(a);
  uint64_t lc = inv_mod(b.back(), p);
  while (a.size() >= b.size()) {
    uint64_t c = a.back() * lc % p;
    size_t s = a.size() - b.size();
    for (size_t j = 0; j < b.size(); ++j) a[s + j] = (a[s + j] + (p - c) * b[j]) % p;
    trim(a);
  }
  return a;
}

Coeffs polygcd(Coeffs a, Coeffs b, uint64_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Coeffs r = polymod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

Coeffs sub_x(Coeffs a, uint64_t p) {
  if (a.size() < 2) a.resize(2, 0);
  a[1] = (a[1] + p - 1) % p;
  trim(a);
  return a;
}

// Rabin's test.
bool irreducible_mod_p(const Coeffs& g, uint64_t p) {
  size_t n = g.size() - 1;
  if (n == 0) return false;
  if (n == 1) return true;
  auto frob_iter = [&](uint64_t k) {
    Coeffs h{0, 1};
    for (uint64_t i = 0; i < k; ++i) h = powmod(h, p, g, p);
    return h;
  };
  if (sub_x(frob_iter(n), p).size() != 0) return false;
  for (uint64_t r : prime_factors(n)) {
    Coeffs h = sub_x(frob_iter(n / r), p);
    Coeffs d = polygcd(g, h, p);
    if (d.size() != 1) return false;
  }
  return true;
}

bool primitive_mod_p(const Coeffs& elem, const Coeffs& g, uint64_t p, uint64_t q) {
  for (uint64_t r : prime_factors(q - 1)) {
    Coeffs h = powmod(elem, (q - 1) / r, g, p);
    if (h.size() == 1 && h[0] == 1) return false;
  }
  return true;
}

// Conway polynomials for small (p, e), low to high without the leading 1.
const std::map<std::pair<uint64_t, unsigned>, std::vector<uint32_t>>& conway_table() {
  static const std::map<std::pair<uint64_t, unsigned>, std::vector<uint32_t>> t = {
      {{2, 2}, {1, 1}},
      {{2, 3}, {1, 1, 0}},
      {{2, 4}, {1, 1, 0, 0}},
      {{2, 5}, {1, 0, 1, 0, 0}},
      {{2, 6}, {1, 1, 0, 1, 1, 0}},
      {{2, 7}, {1, 1, 0, 0, 0, 0, 0}},
      {{2, 8}, {1, 0, 1, 1, 1, 0, 0, 0}},
      {{3, 2}, {2, 2}},
      {{3, 3}, {1, 2, 0}},
      {{3, 4}, {2, 0, 0, 2}},
      {{3, 5}, {1, 2, 0, 0, 0}},
      {{3, 6}, {2, 2, 1, 0, 2, 0}},
      {{5, 2}, {2, 4}},
      {{5, 3}, {3, 3, 0}},
      {{5, 4}, {2, 4, 4, 0}},
      {{7, 2}, {3, 6}},
      {{7, 3}, {4, 0, 6}},
      {{7, 4}, {3, 4, 5, 0}},
      {{11, 2}, {2, 7}},
      {{13, 2}, {2, 12}},
  };
  return t;
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

FieldPtr Field::rationals() {
  static FieldPtr q = [] {
    auto f = std::shared_ptr<Field>(new Field());
    f->kind_ = FieldKind::Rational;
    f->qmod_ = {mpq_class(0), mpq_class(1)};
    return f;
  }();
  return q;
}

FieldPtr Field::prime(uint64_t p) {
  if (!is_prime(p)) fail(ErrorCode::InvalidArgument, "GF(" + std::to_string(p) + "): not a prime");
  if (p >= (uint64_t(1) << 31)) fail(ErrorCode::ResourceLimit, "prime too large for word arithmetic");
  static std::map<uint64_t, FieldPtr> cache;
  std::lock_guard<std::mutex> lock(registry_mutex());
  auto it = cache.find(p);
  if (it != cache.end()) return it->second;
  auto f = std::shared_ptr<Field>(new Field());
  f->kind_ = FieldKind::Prime;
  f->p_ = p;
  f->q_ = p;
  f->e_ = 1;
  cache[p] = f;
  return f;
}

FieldPtr Field::finite(uint64_t p, unsigned e) {
  if (e == 0) fail(ErrorCode::InvalidArgument, "field degree must be positive");
  if (e == 1) return prime(p);
  if (!is_prime(p)) fail(ErrorCode::InvalidArgument, "GF(" + std::to_string(p) + "," + std::to_string(e) + "): not a prime");
  long double order = 1;
  for (unsigned i = 0; i < e; ++i) order *= p;
  if (order > (long double)(1u << 24))
    fail(ErrorCode::ResourceLimit, "finite field of order " + std::to_string(p) + "^" +
                                       std::to_string(e) + " exceeds the table limit 2^24");
  uint64_t q = 1;
  for (unsigned i = 0; i < e; ++i) q *= p;
  auto it = conway_table().find({p, e});
  if (it != conway_table().end()) {
    Coeffs g(it->second.begin(), it->second.end());
    g.push_back(1);
    if (irreducible_mod_p(g, p) && primitive_mod_p({0, 1}, g, p, q)) {
      std::vector<uint32_t> m(g.begin(), g.end());
      return finite_with_modulus(p, m);
    }
  }
  for (uint64_t idx = 0; idx < q; ++idx) {
    Coeffs g(e + 1, 0);
    uint64_t v = idx;
    for (unsigned k = 0; k < e; ++k) {
      g[k] = v % p;
      v /= p;
    }
    g[e] = 1;
    if (g[0] == 0) continue;
    if (irreducible_mod_p(g, p)) return finite_with_modulus(p, std::vector<uint32_t>(g.begin(), g.end()));
  }
  fail(ErrorCode::InvalidArgument, "no irreducible polynomial found");
}

FieldPtr Field::finite_with_modulus(uint64_t p, std::vector<uint32_t> modulus) {
  if (!is_prime(p)) fail(ErrorCode::InvalidArgument, "modulus characteristic is not prime");
  while (!modulus.empty() && modulus.back() % p == 0) modulus.pop_back();
  for (auto& c : modulus) c %= p;
  if (modulus.size() < 2) fail(ErrorCode::InvalidArgument, "modulus must have positive degree");
  if (modulus.back() != 1) fail(ErrorCode::InvalidArgument, "modulus must be monic");
  unsigned e = unsigned(modulus.size() - 1);
  if (e == 1) return prime(p);
  Coeffs g(modulus.begin(), modulus.end());
  if (!irreducible_mod_p(g, p)) fail(ErrorCode::InvalidArgument, "modulus is not irreducible");
  long double order = 1;
  for (unsigned i = 0; i < e; ++i) order *= p;
  if (order > (long double)(1u << 24))
    fail(ErrorCode::ResourceLimit, "finite field exceeds the table limit 2^24");

  static std::map<std::pair<uint64_t, std::vector<uint32_t>>, FieldPtr> cache;
  {
    std::lock_guard<std::mutex> lock(registry_mutex());
    auto it = cache.find({p, modulus});
    if (it != cache.end()) return it->second;
  }
  auto f = std::shared_ptr<Field>(new Field());
  f->kind_ = FieldKind::FiniteExtension;
  f->p_ = p;
  f->e_ = e;
  f->q_ = 1;
  for (unsigned i = 0; i < e; ++i) f->q_ *= p;
  f->gen_name_ = "a";
  f->fmod_ = modulus;
  f->build_zech();
  std::lock_guard<std::mutex> lock(registry_mutex());
  auto [it, inserted] = cache.emplace(std::make_pair(p, modulus), f);
  return it->second;
}

void Field::build_zech() {
  Coeffs g(fmod_.begin(), fmod_.end());
  // Smallest primitive element in index order; the generator t is tried first.
  Coeffs prim;
  if (primitive_mod_p({0, 1}, g, p_, q_)) {
    prim = {0, 1};
  } else {
    for (uint64_t idx = 2; idx < q_; ++idx) {
      Coeffs c(e_, 0);
      uint64_t v = idx;
      for (unsigned k = 0; k < e_; ++k) {
        c[k] = v % p_;
        v /= p_;
      }
      trim(c);
      if (primitive_mod_p(c, g, p_, q_)) {
        prim = c;
        break;
      }
    }
  }
  exp_.assign(q_ - 1, 0);
  log_.assign(q_, kNone);
  std::vector<uint64_t> cur(e_, 0);
  cur[0] = 1;
  for (uint64_t i = 0; i + 1 < q_; ++i) {
    uint64_t idx = 0;
    for (unsigned k = e_; k-- > 0;) idx = idx * p_ + cur[k];
    exp_[i] = uint32_t(idx);
    log_[idx] = uint32_t(i);
    Coeffs c(cur.begin(), cur.end());
    trim(c);
    c = mulmod(c, prim, g, p_);
    std::fill(cur.begin(), cur.end(), 0);
    for (size_t k = 0; k < c.size(); ++k) cur[k] = c[k];
  }
  zech_.assign(q_ - 1, kNone);
  for (uint64_t n = 0; n + 1 < q_; ++n) {
    uint64_t idx = exp_[n];
    uint64_t d0 = idx % p_;
    uint64_t idx2 = idx - d0 + (d0 + 1) % p_;
    zech_[n] = idx2 == 0 ? kNone : log_[idx2];
  }
}

FieldPtr Field::number_field(std::vector<mpq_class> modulus, std::string generator) {
  while (!modulus.empty() && modulus.back() == 0) modulus.pop_back();
  if (modulus.size() < 2) fail(ErrorCode::InvalidArgument, "number field modulus must have positive degree");
  if (modulus.back() != 1) fail(ErrorCode::InvalidArgument, "number field modulus must be monic");
  if (modulus.size() - 1 > 8) fail(ErrorCode::ResourceLimit, "number field degree limited to 8");
  if (modulus.size() == 2) return rationals();
  if (!rational_irreducible(modulus))
    fail(ErrorCode::InvalidArgument, "number field modulus is reducible or irreducibility could not be verified");
  auto f = std::shared_ptr<Field>(new Field());
  f->kind_ = FieldKind::RationalExtension;
  f->e_ = unsigned(modulus.size() - 1);
  f->qmod_ = std::move(modulus);
  f->gen_name_ = std::move(generator);
  return f;
}

FieldPtr Field::gaussian() {
  static FieldPtr g = number_field({mpq_class(1), mpq_class(0), mpq_class(1)}, "i");
  return g;
}

std::string Field::name() const {
  switch (kind_) {
    case FieldKind::Rational: return "QQ";
    case FieldKind::Prime: return "GF(" + std::to_string(p_) + ")";
    case FieldKind::FiniteExtension:
      return "GF(" + std::to_string(p_) + "," + std::to_string(e_) + ")";
    case FieldKind::RationalExtension: {
      if (qmod_.size() == 3 && qmod_[0] == 1 && qmod_[1] == 0 && gen_name_ == "i") return "QQ[i]";
      std::string g;
      for (size_t k = qmod_.size(); k-- > 0;) {
        if (qmod_[k] == 0) continue;
        mpq_class c = qmod_[k];
        std::string cs = mpq_class(abs(c)).get_str();
        bool first = g.empty();
        if (!first) g += c < 0 ? "-" : "+";
        else if (c < 0) g += "-";
        if (k == 0) g += cs;
        else {
          if (abs(c) != 1) g += cs + "*";
          g += gen_name_;
          if (k > 1) g += "^" + std::to_string(k);
        }
      }
      return "QQ[" + gen_name_ + "]/(" + g + ")";
    }
  }
  return "?";
}

bool Field::operator==(const Field& o) const {
  if (this == &o) return true;
  return kind_ == o.kind_ && p_ == o.p_ && e_ == o.e_ && fmod_ == o.fmod_ && qmod_ == o.qmod_;
}

Scalar Field::make_big(std::vector<mpq_class> coords) const {
  bool zero = std::all_of(coords.begin(), coords.end(), [](const mpq_class& c) { return c == 0; });
  if (zero) return {};
  Scalar s;
  s.big_ = std::make_shared<const std::vector<mpq_class>>(std::move(coords));
  return s;
}

Scalar Field::from_int(int64_t v) const {
  if (p_) {
    int64_t r = v % int64_t(p_);
    if (r < 0) r += int64_t(p_);
    if (kind_ == FieldKind::Prime) return Scalar::from_raw(uint32_t(r));
    return r == 0 ? Scalar() : Scalar::from_raw(log_[r] + 1);
  }
  std::vector<mpq_class> c(e_, mpq_class(0));
  c[0] = mpq_class(mpz_class(std::to_string(v)));
  return make_big(std::move(c));
}

Scalar Field::from_mpz(const mpz_class& v) const {
  if (p_) {
    mpz_class r = v % mpz_class(std::to_string(p_));
    if (r < 0) r += mpz_class(std::to_string(p_));
    return from_int(int64_t(r.get_si()));
  }
  std::vector<mpq_class> c(e_, mpq_class(0));
  c[0] = mpq_class(v);
  return make_big(std::move(c));
}

Scalar Field::from_rational(const mpq_class& v) const {
  if (p_) {
    Scalar d = from_mpz(v.get_den());
    if (d.is_zero()) fail(ErrorCode::DivisionByZero, "denominator vanishes in characteristic " + std::to_string(p_));
    return div(from_mpz(v.get_num()), d);
  }
  std::vector<mpq_class> c(e_, mpq_class(0));
  c[0] = v;
  return make_big(std::move(c));
}

Scalar Field::generator() const {
  switch (kind_) {
    case FieldKind::FiniteExtension: return Scalar::from_raw(log_[p_] + 1);
    case FieldKind::RationalExtension: {
      std::vector<mpq_class> c(e_, mpq_class(0));
      c[1] = 1;
      return make_big(std::move(c));
    }
    default: fail(ErrorCode::InvalidArgument, name() + " has no generator");
  }
}

Scalar Field::big_add(const Scalar& a, const Scalar& b, bool subtract) const {
  if (b.is_zero()) return a;
  if (a.is_zero()) return subtract ? big_neg(b) : b;
  std::vector<mpq_class> c(*a.big_);
  for (size_t k = 0; k < c.size(); ++k) {
    if (subtract) c[k] -= (*b.big_)[k];
    else c[k] += (*b.big_)[k];
  }
  return make_big(std::move(c));
}

Scalar Field::big_neg(const Scalar& a) const {
  if (a.is_zero()) return a;
  std::vector<mpq_class> c(*a.big_);
  for (auto& x : c) x = -x;
  return make_big(std::move(c));
}

Scalar Field::big_mul(const Scalar& a, const Scalar& b) const {
  if (a.is_zero() || b.is_zero()) return {};
  const auto& x = *a.big_;
  const auto& y = *b.big_;
  if (e_ == 1) return make_big({x[0] * y[0]});
  std::vector<mpq_class> r(2 * e_ - 1, mpq_class(0));
  for (unsigned i = 0; i < e_; ++i) {
    if (x[i] == 0) continue;
    for (unsigned j = 0; j < e_; ++j)
      if (y[j] != 0) r[i + j] += x[i] * y[j];
  }
  for (size_t k = r.size(); k-- > e_;) {
    if (r[k] == 0) continue;
    mpq_class c = r[k];
    for (unsigned j = 0; j <= e_; ++j) r[k - e_ + j] -= c * qmod_[j];
  }
  r.resize(e_);
  return make_big(std::move(r));
}

Scalar Field::inv(const Scalar& a) const {
  if (a.is_zero()) fail(ErrorCode::DivisionByZero, "inverse of zero in " + name());
  switch (kind_) {
    case FieldKind::Prime: return Scalar::from_raw(uint32_t(inv_mod(a.raw_, p_)));
    case FieldKind::FiniteExtension: {
      uint64_t l = a.raw_ - 1;
      uint64_t r = l == 0 ? 0 : (q_ - 1) - l;
      return Scalar::from_raw(uint32_t(r + 1));
    }
    case FieldKind::Rational: return make_big({1 / (*a.big_)[0]});
    case FieldKind::RationalExtension: {
      // Extended Euclid of a(t) against the modulus over Q.
      using QP = std::vector<mpq_class>;
      auto trimq = [](QP& v) {
        while (!v.empty() && v.back() == 0) v.pop_back();
      };
      auto divmod = [&](QP u, const QP& v, QP& quo) {
        quo.assign(u.size() >= v.size() ? u.size() - v.size() + 1 : 0, mpq_class(0));
        while (u.size() >= v.size() && !u.empty()) {
          mpq_class c = u.back() / v.back();
          size_t s = u.size() - v.size();
          quo[s] = c;
          for (size_t j = 0; j < v.size(); ++j) u[s + j] -= c * v[j];
          u.pop_back();
          trimq(u);
        }
        return u;
      };
      auto mulp = [&](const QP& u, const QP& v) {
        if (u.empty() || v.empty()) return QP{};
        QP r(u.size() + v.size() - 1, mpq_class(0));
        for (size_t i = 0; i < u.size(); ++i)
          for (size_t j = 0; j < v.size(); ++j) r[i + j] += u[i] * v[j];
        trimq(r);
        return r;
      };
      auto subp = [&](QP u, const QP& v) {
        if (u.size() < v.size()) u.resize(v.size(), mpq_class(0));
        for (size_t j = 0; j < v.size(); ++j) u[j] -= v[j];
        trimq(u);
        return u;
      };
      QP r0 = qmod_, r1 = *a.big_;
      trimq(r1);
      QP s0{}, s1{mpq_class(1)};
      while (!r1.empty()) {
        QP quo;
        QP rem = divmod(r0, r1, quo);
        QP s2 = subp(s0, mulp(quo, s1));
        r0 = std::move(r1);
        r1 = std::move(rem);
        s0 = std::move(s1);
        s1 = std::move(s2);
      }
      // r0 is a nonzero constant since the modulus is irreducible.
      mpq_class c = r0[0];
      s0.resize(e_, mpq_class(0));
      for (auto& x : s0) x /= c;
      return make_big(std::move(s0));
    }
  }
  return {};
}

Scalar Field::pow(const Scalar& a, uint64_t n) const {
  Scalar r = one(), b = a;
  while (n) {
    if (n & 1) r = mul(r, b);
    n >>= 1;
    if (n) b = mul(b, b);
  }
  return r;
}

Scalar Field::pow(const Scalar& a, const mpz_class& n) const {
  if (n < 0) return pow(inv(a), mpz_class(-n));
  if (kind_ == FieldKind::Prime || kind_ == FieldKind::FiniteExtension) {
    if (a.is_zero()) return n == 0 ? one() : Scalar();
    mpz_class r = n % mpz_class(std::to_string(q_ - 1));
    return pow(a, uint64_t(r.get_ui()));
  }
  Scalar r = one(), b = a;
  size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
  for (size_t i = 0; i < bits; ++i) {
    if (mpz_tstbit(n.get_mpz_t(), i)) r = mul(r, b);
    b = mul(b, b);
  }
  return r;
}

Scalar Field::element(uint64_t index) const {
  if (!p_ || index >= q_) fail(ErrorCode::InvalidArgument, "element index out of range");
  if (kind_ == FieldKind::Prime) return Scalar::from_raw(uint32_t(index));
  return index == 0 ? Scalar() : Scalar::from_raw(log_[index] + 1);
}

uint64_t Field::index(const Scalar& a) const {
  if (!p_) fail(ErrorCode::InvalidArgument, "index of an element of an infinite field");
  if (kind_ == FieldKind::Prime) return a.raw_;
  return a.raw_ == 0 ? 0 : exp_[a.raw_ - 1];
}

std::vector<uint32_t> Field::coordinates(const Scalar& a) const {
  uint64_t idx = index(a);
  std::vector<uint32_t> d(e_, 0);
  for (unsigned k = 0; k < e_; ++k) {
    d[k] = uint32_t(idx % p_);
    idx /= p_;
  }
  return d;
}

Scalar Field::from_coordinates(const std::vector<uint32_t>& digits) const {
  uint64_t idx = 0;
  for (size_t k = std::min<size_t>(digits.size(), e_); k-- > 0;) idx = idx * p_ + digits[k] % p_;
  return element(idx);
}

std::vector<mpq_class> Field::rational_coordinates(const Scalar& a) const {
  if (p_) fail(ErrorCode::InvalidArgument, "rational coordinates of a finite field element");
  if (a.is_zero()) return std::vector<mpq_class>(e_, mpq_class(0));
  return *a.big_;
}

Scalar Field::from_rational_coordinates(std::vector<mpq_class> coords) const {
  if (p_) fail(ErrorCode::InvalidArgument, "rational coordinates in a finite field");
  coords.resize(e_, mpq_class(0));
  return make_big(std::move(coords));
}

Scalar Field::random(std::mt19937_64& rng, int64_t height) const {
  if (p_) {
    std::uniform_int_distribution<uint64_t> d(0, q_ - 1);
    return element(d(rng));
  }
  std::uniform_int_distribution<int64_t> d(-height, height);
  std::vector<mpq_class> c(e_);
  for (auto& x : c) x = mpq_class(mpz_class(std::to_string(d(rng))));
  return make_big(std::move(c));
}

std::string Field::format(const Scalar& a) const {
  switch (kind_) {
    case FieldKind::Prime: {
      uint64_t v = a.raw_;
      if (p_ > 2 && v > p_ / 2) return "-" + std::to_string(p_ - v);
      return std::to_string(v);
    }
    case FieldKind::Rational: return a.is_zero() ? "0" : (*a.big_)[0].get_str();
    default: break;
  }
  // Polynomial in the generator, highest power first.
  std::vector<std::string> coeff;
  std::vector<bool> negative;
  if (kind_ == FieldKind::FiniteExtension) {
    auto d = coordinates(a);
    for (unsigned k = 0; k < e_; ++k) {
      uint64_t v = d[k];
      bool neg = p_ > 2 && v > p_ / 2;
      coeff.push_back(v == 0 ? "" : std::to_string(neg ? p_ - v : v));
      negative.push_back(neg);
    }
  } else {
    auto d = rational_coordinates(a);
    for (unsigned k = 0; k < e_; ++k) {
      coeff.push_back(d[k] == 0 ? "" : mpq_class(abs(d[k])).get_str());
      negative.push_back(d[k] < 0);
    }
  }
  std::string out;
  for (unsigned k = e_; k-- > 0;) {
    if (coeff[k].empty()) continue;
    if (out.empty()) {
      if (negative[k]) out += "-";
    } else {
      out += negative[k] ? "-" : "+";
    }
    if (k == 0) {
      out += coeff[k];
      continue;
    }
    if (coeff[k] != "1") out += coeff[k] + "*";
    out += gen_name_;
    if (k > 1) out += "^" + std::to_string(k);
  }
  return out.empty() ? "0" : out;
}

bool Field::is_atomic(const Scalar& a) const {
  if (kind_ == FieldKind::Prime || kind_ == FieldKind::Rational) return true;
  std::string s = format(a);
  size_t start = s[0] == '-' ? 1 : 0;
  return s.find_first_of("+-", start) == std::string::npos;
}

}  // namespace summands
