#include "summands/frobenius.hpp"

#include <unordered_map>

namespace summands {

namespace {

int64_t floor_mod(int64_t a, int64_t q) { return ((a % q) + q) % q; }

int64_t ceil_div(int64_t a, int64_t q) { return a >= 0 ? (a + q - 1) / q : -((-a) / q); }

// c^(1/p^e) in a perfect field.
Scalar frobenius_root(const Field& F, const Scalar& c, unsigned e) {
  if (F.degree() <= 1) return c;
  mpz_class root_exp;
  mpz_ui_pow_ui(root_exp.get_mpz_t(), F.characteristic(), F.degree() - 1);
  Scalar r = c;
  for (unsigned i = 0; i < e; ++i) r = F.pow(r, root_exp);
  return r;
}

void check_ring(const Ring& R) {
  if (R.field()->characteristic() == 0) fail(ErrorCode::CharZero, "Frobenius pushforward needs positive characteristic");
  if (R.is_local())
    fail(ErrorCode::NotGraded, "Frobenius pushforward is only constructed over graded rings; enter local pushforwards as explicit presentations");
}

struct Relation {
  Column v;
  Degree degree;
};

}  // namespace

PushforwardBasis pushforward_basis(const Ring& R, unsigned e) {
  PushforwardBasis B;
  B.e = e;
  uint64_t p = R.field()->characteristic();
  for (unsigned i = 0; i < e; ++i) {
    if (B.q > (uint64_t(1) << 15)) fail(ErrorCode::ResourceLimit, "p^e too large");
    B.q *= p;
  }
  size_t n = R.nvars();
  double count = 1;
  for (size_t i = 0; i < n; ++i) count *= double(B.q);
  if (count > double(1 << 22)) fail(ErrorCode::ResourceLimit, "pushforward basis too large");
  std::vector<unsigned> a(n, 0);
  while (true) {
    B.exponents.push_back(a);
    Degree d = R.zero_degree();
    for (size_t j = 0; j < n; ++j)
      for (size_t k = 0; k < d.size(); ++k) d[k] += int64_t(a[j]) * R.variable_degree(j)[k];
    B.degrees.push_back(std::move(d));
    size_t j = n;
    while (j > 0 && a[j - 1] + 1 == B.q) a[--j] = 0;
    if (j == 0) break;
    ++a[j - 1];
  }
  return B;
}

ModulePtr pushforward_module(const ModulePtr& M, unsigned e, TwistConvention conv, bool minimal) {
  const RingPtr& Rp = M->ring();
  const Ring& R = *Rp;
  check_ring(R);
  if (e == 0) return minimal ? minimize(M).module : M;
  if (conv == TwistConvention::Full && R.grading_rank() > 1)
    fail(ErrorCode::NonIntegralDegrees, "the full convention rounds degrees and is only defined for rank-1 gradings");

  auto B = pushforward_basis(R, e);
  const int64_t q = int64_t(B.q);
  const size_t n = R.nvars(), g = M->ngens(), nb = B.exponents.size();
  const Field& F = *R.field();

  auto in_class = [&](const Degree& d) {
    if (conv == TwistConvention::Full) return true;
    for (auto x : d)
      if (floor_mod(x, q) != 0) return false;
    return true;
  };
  auto divide = [&](const Degree& d) {
    Degree out(d.size());
    for (size_t k = 0; k < d.size(); ++k) out[k] = conv == TwistConvention::Full ? ceil_div(d[k], q) : d[k] / q;
    return out;
  };

  // New generators: (i, a) in the kept classes.
  std::vector<int64_t> index(g * nb, -1);
  std::vector<Degree> degrees;
  for (size_t i = 0; i < g; ++i)
    for (size_t a = 0; a < nb; ++a) {
      Degree d = M->degree(i) + B.degrees[a];
      if (!in_class(d)) continue;
      index[i * nb + a] = int64_t(degrees.size());
      degrees.push_back(divide(d));
    }

  // Relations of M over the ambient polynomial ring: the columns of M and
  // the ideal generators times each generator.
  std::vector<Relation> rels;
  for (size_t j = 0; j < M->nrels(); ++j) {
    auto d = M->relation_degree(j);
    if (!d) fail(ErrorCode::NotGraded, "relation column is not homogeneous");
    rels.push_back({M->relations()[j], *d});
  }
  for (auto& f : R.ideal_generators()) {
    auto df = R.degree_of(f);
    if (!df) fail(ErrorCode::NotGraded, "ideal generator is not homogeneous");
    for (size_t i = 0; i < g; ++i) {
      Column v(g);
      v[i] = f;
      rels.push_back({std::move(v), M->degree(i) + *df});
    }
  }

  // Mixed-radix position of a box exponent vector.
  auto box_index = [&](const std::array<unsigned, kMaxVars>& s) {
    size_t idx = 0;
    for (size_t j = 0; j < n; ++j) idx = idx * B.q + s[j];
    return idx;
  };

  std::vector<Column> out;
  std::vector<std::vector<Term>> acc(degrees.size());
  std::vector<size_t> touched;
  for (auto& rel : rels)
    for (size_t a = 0; a < nb; ++a) {
      if (!in_class(rel.degree + B.degrees[a])) continue;
      touched.clear();
      for (size_t i = 0; i < g; ++i)
        for (auto& t : rel.v[i].t) {
          std::array<unsigned, kMaxVars> s{};
          std::vector<unsigned> quot(n);
          for (size_t j = 0; j < n; ++j) {
            unsigned c = unsigned(t.m.e[j]) + B.exponents[a][j];
            quot[j] = unsigned(c / B.q);
            s[j] = unsigned(c % B.q);
          }
          int64_t row = index[i * nb + box_index(s)];
          if (row < 0) fail(ErrorCode::NotGraded, "relation leaves its degree class");
          if (acc[size_t(row)].empty()) touched.push_back(size_t(row));
          acc[size_t(row)].push_back({R.make_monomial(quot), frobenius_root(F, t.c, e)});
        }
      Column col(degrees.size());
      for (size_t row : touched) col[row] = R.reduce(R.normalize(std::move(acc[row])));
      for (size_t row : touched) acc[row].clear();
      out.push_back(std::move(col));
    }

  auto P = make_module(Presentation(Rp, std::move(degrees), std::move(out)));
  return minimal ? minimize(P).module : P;
}

ModulePtr pushforward_ring(const RingPtr& R, unsigned e, TwistConvention conv, bool minimal) {
  return pushforward_module(make_module(Presentation::free(R, {R->zero_degree()})), e, conv, minimal);
}

ModulePtr syzygy_module(const ModulePtr& M, unsigned i) {
  ModulePtr cur = minimize(M).module;
  for (unsigned step = 0; step < i; ++step) {
    const RingPtr& R = cur->ring();
    std::vector<Degree> degrees;
    for (size_t j = 0; j < cur->nrels(); ++j) {
      auto d = cur->relation_degree(j);
      degrees.push_back(d ? *d : R->zero_degree());
    }
    auto syz = syzygies(R, cur->relations(), cur->ngens(), cur->row_weights());
    cur = minimize(make_module(Presentation(R, std::move(degrees), std::move(syz)))).module;
  }
  return cur;
}

std::vector<size_t> resolution_ranks(const ModulePtr& M, unsigned n) {
  std::vector<size_t> ranks;
  ModulePtr cur = M;
  for (unsigned i = 0; i <= n; ++i) {
    cur = syzygy_module(cur, i == 0 ? 0 : 1);
    ranks.push_back(cur->ngens());
  }
  return ranks;
}

}  // namespace summands
