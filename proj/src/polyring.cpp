#include "summands/polyring.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "summands/groebner.hpp"
#include "summands/unipoly.hpp"

namespace summands {

Degree operator+(const Degree& a, const Degree& b) {
  Degree r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Degree operator-(const Degree& a, const Degree& b) {
  Degree r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

std::string format_degree_vector(const Degree& d) {
  std::string s;
  for (size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i]);
  return s;
}

namespace {

struct Ineq {
  std::vector<mpq_class> a;  // a . w >= b
  mpq_class b;
};

}  // namespace

std::optional<std::vector<mpq_class>> positivity_witness(const std::vector<Degree>& cols) {
  if (cols.empty()) return std::vector<mpq_class>{};
  size_t r = cols[0].size();
  std::vector<std::vector<Ineq>> stages(r + 1);
  for (auto& c : cols) {
    Ineq q;
    for (auto x : c) q.a.emplace_back(mpq_class(mpz_class(std::to_string(x))));
    q.b = 1;
    stages[r].push_back(q);
  }
  // Eliminate w_{k} from stage k+1 to obtain stage k.
  for (size_t k = r; k-- > 0;) {
    std::vector<Ineq> pos, neg, next;
    for (auto& q : stages[k + 1]) {
      int s = sgn(q.a[k]);
      (s > 0 ? pos : s < 0 ? neg : next).push_back(q);
    }
    for (auto& p : pos)
      for (auto& n : neg) {
        Ineq q;
        mpq_class cp = -n.a[k], cn = p.a[k];
        q.a.resize(r);
        for (size_t i = 0; i < r; ++i) q.a[i] = cp * p.a[i] + cn * n.a[i];
        q.b = cp * p.b + cn * n.b;
        // Scale so the largest coefficient is 1 in absolute value to keep
        // duplicates recognisable.
        mpq_class m = 0;
        for (auto& x : q.a) m = std::max(m, mpq_class(abs(x)));
        if (m != 0) {
          for (auto& x : q.a) x /= m;
          q.b /= m;
        }
        bool dup = false;
        for (auto& o : next)
          if (o.a == q.a && o.b >= q.b) {
            dup = true;
            break;
          }
        if (!dup) next.push_back(q);
      }
    stages[k] = std::move(next);
  }
  for (auto& q : stages[0])
    if (q.b > 0) return std::nullopt;
  std::vector<mpq_class> w(r);
  for (size_t k = 0; k < r; ++k) {
    std::optional<mpq_class> lo, hi;
    for (auto& q : stages[k + 1]) {
      mpq_class rest = q.b;
      for (size_t i = 0; i < k; ++i) rest -= q.a[i] * w[i];
      int s = sgn(q.a[k]);
      if (s == 0) continue;
      mpq_class bound = rest / q.a[k];
      if (s > 0) {
        if (!lo || bound > *lo) lo = bound;
      } else if (!hi || bound < *hi) {
        hi = bound;
      }
    }
    mpq_class v = 0;
    if (lo) {
      mpz_class c;
      mpz_cdiv_q(c.get_mpz_t(), lo->get_num_mpz_t(), lo->get_den_mpz_t());
      v = (!hi || mpq_class(c) <= *hi) ? mpq_class(c) : *lo;
    } else if (hi) {
      mpz_class f;
      mpz_fdiv_q(f.get_mpz_t(), hi->get_num_mpz_t(), hi->get_den_mpz_t());
      v = std::min(mpq_class(0), mpq_class(f));
    }
    w[k] = v;
  }
  return w;
}

bool validate_positive_grading(const std::vector<Degree>& cols, std::vector<mpq_class>* witness) {
  auto w = positivity_witness(cols);
  if (w && witness) *witness = *w;
  return w.has_value();
}

RingPtr Ring::polynomial(FieldPtr field, std::vector<std::string> vars, const std::vector<std::vector<int64_t>>& degrees,
                         RingMode mode) {
  if (vars.empty()) fail(ErrorCode::InvalidArgument, "a ring needs at least one variable");
  if (vars.size() > size_t(kMaxVars))
    fail(ErrorCode::ResourceLimit, "at most " + std::to_string(kMaxVars) + " variables are supported");
  for (size_t i = 0; i < vars.size(); ++i)
    for (size_t j = 0; j < i; ++j)
      if (vars[i] == vars[j]) fail(ErrorCode::InvalidArgument, "duplicate variable " + vars[i]);
  auto r = std::shared_ptr<Ring>(new Ring());
  r->field_ = std::move(field);
  r->vars_ = std::move(vars);
  r->mode_ = mode;
  size_t n = r->vars_.size();
  std::vector<std::vector<int64_t>> d = degrees;
  if (d.empty()) d.assign(1, std::vector<int64_t>(n, 1));
  for (auto& row : d)
    if (row.size() != n) fail(ErrorCode::GradingInvalid, "degree matrix needs one column per variable");
  r->rank_ = d.size();
  r->var_deg_.assign(n, Degree(r->rank_));
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < r->rank_; ++k) r->var_deg_[i][k] = d[k][i];
  std::vector<mpq_class> w;
  if (!validate_positive_grading(r->var_deg_, &w)) {
    if (mode == RingMode::Graded) fail(ErrorCode::GradingInvalid, "grading is not positive");
    // A local ring only uses the grading for its order; fall back to the
    // standard weights.
    w.clear();
    r->weights_.assign(n, 1);
  } else {
    mpz_class l = 1;
    for (auto& x : w) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    r->weights_.assign(n, 0);
    for (size_t i = 0; i < n; ++i) {
      mpq_class s = 0;
      for (size_t k = 0; k < r->rank_; ++k) s += w[k] * r->var_deg_[i][k];
      s *= l;
      r->weights_[i] = s.get_num().get_si();
    }
    for (auto& x : w) x *= l;
  }
  r->witness_ = w;
  return r;
}

RingPtr Ring::base() const {
  if (base_) return base_;
  return shared_from_this();
}

bool Ring::standard_graded() const {
  if (rank_ != 1) return false;
  for (auto& d : var_deg_)
    if (d[0] != 1) return false;
  return true;
}

RingPtr Ring::quotient(const std::vector<Poly>& ideal) const {
  if (is_quotient()) fail(ErrorCode::InvalidArgument, "quotient of a quotient ring");
  std::vector<Poly> gens;
  for (auto& f : ideal) {
    if (f.is_zero()) continue;
    if (mode_ == RingMode::Graded && !degree_of(f))
      fail(ErrorCode::NotGraded, "ideal generator " + format(f) + " is not homogeneous");
    gens.push_back(f);
  }
  if (gens.empty()) return shared_from_this();
  auto r = std::shared_ptr<Ring>(new Ring(*this));
  r->base_ = shared_from_this();
  r->ideal_ = gens;
  r->ideal_gb_ = reduced_ideal_basis(*this, gens);
  for (auto& g : r->ideal_gb_) r->ideal_leads_.push_back(g.lead().m);
  return r;
}

RingPtr Ring::extend_field(const FieldPtr& target) const {
  if (*target == *field_) return shared_from_this();
  auto r = std::shared_ptr<Ring>(new Ring(*this));
  r->field_ = target;
  if (base_) r->base_ = base_->extend_field(target);
  for (auto& f : r->ideal_) f = r->embed(f, *this);
  for (auto& f : r->ideal_gb_) f = r->embed(f, *this);
  return r;
}

Monomial Ring::variable_monomial(size_t i) const {
  Monomial m;
  m.e[i] = 1;
  m.w = weights_[i];
  return m;
}

Monomial Ring::make_monomial(const std::vector<unsigned>& exps) const {
  Monomial m;
  for (size_t i = 0; i < exps.size(); ++i) {
    if (exps[i] > 0xffff) fail(ErrorCode::ResourceLimit, "exponent overflow");
    m.e[i] = uint16_t(exps[i]);
    m.w += int64_t(exps[i]) * weights_[i];
  }
  return m;
}

Monomial Ring::lcm(const Monomial& a, const Monomial& b) const {
  Monomial m;
  for (size_t i = 0; i < nvars(); ++i) {
    m.e[i] = std::max(a.e[i], b.e[i]);
    m.w += int64_t(m.e[i]) * weights_[i];
  }
  return m;
}

int64_t Ring::weight_of(const Degree& d) const {
  if (witness_.empty()) {
    int64_t s = 0;
    for (auto x : d) s += x;
    return s;
  }
  mpq_class s = 0;
  for (size_t k = 0; k < rank_; ++k) s += witness_[k] * d[k];
  return s.get_num().get_si();
}

Degree Ring::degree(const Monomial& m) const {
  Degree d(rank_, 0);
  for (size_t i = 0; i < nvars(); ++i)
    if (m.e[i])
      for (size_t k = 0; k < rank_; ++k) d[k] += int64_t(m.e[i]) * var_deg_[i][k];
  return d;
}

Poly Ring::constant(const Scalar& c) const {
  Poly p;
  if (!c.is_zero()) p.t.push_back({Monomial{}, c});
  return p;
}

Poly Ring::variable(size_t i) const { return term(variable_monomial(i), field_->one()); }

Poly Ring::term(const Monomial& m, const Scalar& c) const {
  Poly p;
  if (!c.is_zero()) p.t.push_back({m, c});
  return p;
}

namespace {

template <class Map>
Poly merge(const Field& F, const Poly& a, size_t a0, const Poly& b, Map&& mapb, bool local) {
  Poly r;
  r.t.reserve(a.t.size() - a0 + b.t.size());
  size_t i = a0, j = 0;
  Term tb;
  bool have_b = false;
  auto next_b = [&]() {
    if (j < b.t.size()) {
      tb = mapb(b.t[j++]);
      have_b = true;
    } else {
      have_b = false;
    }
  };
  next_b();
  while (i < a.t.size() || have_b) {
    if (!have_b) {
      r.t.push_back(a.t[i++]);
      continue;
    }
    if (i == a.t.size()) {
      r.t.push_back(tb);
      next_b();
      continue;
    }
    int c = compare_monomials(a.t[i].m, tb.m, local);
    if (c > 0) {
      r.t.push_back(a.t[i++]);
    } else if (c < 0) {
      r.t.push_back(tb);
      next_b();
    } else {
      Scalar s = F.add(a.t[i].c, tb.c);
      if (!s.is_zero()) r.t.push_back({tb.m, s});
      ++i;
      next_b();
    }
  }
  return r;
}

}  // namespace

Poly Ring::add(const Poly& a, const Poly& b) const {
  return merge(*field_, a, 0, b, [](const Term& t) { return t; }, false);
}

Poly Ring::sub(const Poly& a, const Poly& b) const {
  const Field& F = *field_;
  return merge(F, a, 0, b, [&](const Term& t) { return Term{t.m, F.neg(t.c)}; }, false);
}

Poly Ring::neg(const Poly& a) const {
  Poly r = a;
  for (auto& t : r.t) t.c = field_->neg(t.c);
  return r;
}

Poly Ring::scale(const Poly& a, const Scalar& s) const {
  if (s.is_zero()) return {};
  Poly r = a;
  for (auto& t : r.t) t.c = field_->mul(t.c, s);
  return r;
}

Poly Ring::mul_term(const Poly& a, const Monomial& m, const Scalar& c) const {
  if (c.is_zero()) return {};
  Poly r;
  r.t.reserve(a.t.size());
  for (auto& t : a.t) r.t.push_back({t.m * m, field_->mul(t.c, c)});
  return r;
}

Poly Ring::sub_mul(const Poly& a, const Scalar& c, const Monomial& m, const Poly& b) const {
  const Field& F = *field_;
  Scalar nc = F.neg(c);
  return merge(F, a, 0, b, [&](const Term& t) { return Term{t.m * m, F.mul(t.c, nc)}; }, false);
}

Poly Ring::normalize(std::vector<Term> terms) const {
  std::sort(terms.begin(), terms.end(), [](const Term& x, const Term& y) { return compare_monomials(x.m, y.m, false) > 0; });
  Poly r;
  for (auto& t : terms) {
    if (!r.t.empty() && r.t.back().m == t.m) {
      r.t.back().c = field_->add(r.t.back().c, t.c);
      if (r.t.back().c.is_zero()) r.t.pop_back();
    } else if (!t.c.is_zero()) {
      r.t.push_back(t);
    }
  }
  return r;
}

Poly Ring::mul(const Poly& a, const Poly& b) const {
  if (a.is_zero() || b.is_zero()) return {};
  if (a.t.size() == 1) return reduce(mul_term(b, a.t[0].m, a.t[0].c));
  if (b.t.size() == 1) return reduce(mul_term(a, b.t[0].m, b.t[0].c));
  std::vector<Term> all;
  all.reserve(a.t.size() * b.t.size());
  for (auto& x : a.t)
    for (auto& y : b.t) all.push_back({x.m * y.m, field_->mul(x.c, y.c)});
  return reduce(normalize(std::move(all)));
}

Poly Ring::pow(const Poly& a, unsigned e) const {
  Poly r = one(), b = a;
  while (e) {
    if (e & 1) r = mul(r, b);
    e >>= 1;
    if (e) b = mul(b, b);
  }
  return r;
}

Poly Ring::reduce(const Poly& a) const {
  if (ideal_gb_.empty() || a.is_zero()) return a;
  const Field& F = *field_;
  Poly rem, cur = a;
  size_t s = 0;
  while (s < cur.t.size()) {
    const Term& lt = cur.t[s];
    size_t j = 0;
    for (; j < ideal_leads_.size(); ++j)
      if (ideal_leads_[j].divides(lt.m)) break;
    if (j == ideal_leads_.size()) {
      rem.t.push_back(lt);
      ++s;
      continue;
    }
    const Poly& g = ideal_gb_[j];
    Scalar c = F.div(lt.c, g.lead().c);
    Monomial q = lt.m / g.lead().m;
    Scalar nc = F.neg(c);
    cur = merge(F, cur, s, g, [&](const Term& t) { return Term{t.m * q, F.mul(t.c, nc)}; }, false);
    s = 0;
  }
  return rem;
}

std::optional<Degree> Ring::degree_of(const Poly& f) const {
  if (f.is_zero()) return zero_degree();
  Degree d = degree(f.t[0].m);
  for (size_t i = 1; i < f.t.size(); ++i) {
    if (f.t[i].m.w != f.t[0].m.w) return std::nullopt;
    if (rank_ > 1 && degree(f.t[i].m) != d) return std::nullopt;
  }
  return d;
}

Scalar Ring::constant_term(const Poly& f) const {
  if (!f.is_zero() && f.t.back().m.is_one()) return f.t.back().c;
  return {};
}

int64_t Ring::lowest_weight(const Poly& f) const {
  int64_t w = INT64_MAX;
  for (auto& t : f.t) w = std::min(w, t.m.w);
  return w;
}

std::vector<Monomial> Ring::monomials_of_weight(int64_t w) const {
  std::vector<Monomial> out;
  if (w < 0) return out;
  size_t n = nvars();
  Monomial cur;
  // Depth-first over variables, last variable takes the remainder.
  auto rec = [&](auto&& self, size_t i, int64_t left) -> void {
    if (i + 1 == n) {
      if (left % weights_[i] == 0) {
        int64_t e = left / weights_[i];
        if (e > 0xffff) fail(ErrorCode::ResourceLimit, "exponent overflow");
        cur.e[i] = uint16_t(e);
        out.push_back(cur);
        cur.e[i] = 0;
      }
      return;
    }
    for (int64_t e = left / weights_[i]; e >= 0; --e) {
      if (e > 0xffff) fail(ErrorCode::ResourceLimit, "exponent overflow");
      cur.e[i] = uint16_t(e);
      self(self, i + 1, left - e * weights_[i]);
    }
    cur.e[i] = 0;
  };
  rec(rec, 0, w);
  for (auto& m : out) m.w = w;
  std::sort(out.begin(), out.end(), [](const Monomial& a, const Monomial& b) { return revlex(a, b) > 0; });
  return out;
}

std::vector<Monomial> Ring::monomials_of_degree(const Degree& d) const {
  if (d.size() != rank_) fail(ErrorCode::ShapeMismatch, "degree has the wrong length");
  std::vector<Monomial> out;
  for (auto& m : monomials_of_weight(weight_of(d)))
    if (rank_ == 1 || degree(m) == d) out.push_back(m);
  if (rank_ == 1 && !out.empty() && degree(out[0]) != d) out.clear();
  return out;
}

bool Ring::is_standard(const Monomial& m) const {
  for (auto& l : ideal_leads_)
    if (l.divides(m)) return false;
  return true;
}

std::vector<Monomial> Ring::basis_in_degree(const Degree& d) const {
  std::vector<Monomial> out;
  for (auto& m : monomials_of_degree(d))
    if (is_standard(m)) out.push_back(m);
  return out;
}

Poly Ring::embed(const Poly& f, const Ring& source) const {
  if (source.nvars() != nvars()) fail(ErrorCode::RingMismatch, "rings have different variables");
  Poly r = f;
  for (auto& t : r.t) t.c = summands::embed(t.c, source.field(), field_);
  return r;
}

std::string Ring::format_monomial(const Monomial& m) const {
  std::string s;
  for (size_t i = 0; i < nvars(); ++i) {
    if (!m.e[i]) continue;
    if (!s.empty()) s += "*";
    s += vars_[i];
    if (m.e[i] > 1) s += "^" + std::to_string(m.e[i]);
  }
  return s.empty() ? "1" : s;
}

std::string Ring::format(const Poly& f) const {
  if (f.is_zero()) return "0";
  std::string out;
  const Field& F = *field_;
  for (size_t i = 0; i < f.t.size(); ++i) {
    const Term& t = f.t[i];
    bool neg = false;
    std::string c = F.format(t.c);
    if (F.is_atomic(t.c) && !c.empty() && c[0] == '-') {
      neg = true;
      c = c.substr(1);
    } else if (!F.is_atomic(t.c)) {
      c = "(" + c + ")";
    }
    std::string body;
    if (t.m.is_one()) body = c;
    else if (c == "1") body = format_monomial(t.m);
    else body = c + "*" + format_monomial(t.m);
    if (i == 0) out += (neg ? "-" : "") + body;
    else out += (neg ? " - " : " + ") + body;
  }
  return out;
}

std::string Ring::format_degree(const Degree& d) const { return format_degree_vector(d); }

}  // namespace summands
