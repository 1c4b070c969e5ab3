#include <doctest.h>

#include <map>
#include <random>

#include "summands/decompose.hpp"
#include "summands/expr.hpp"
#include "summands/frobenius.hpp"

using namespace summands;

namespace {

RingPtr standard(FieldPtr F, std::vector<std::string> vars) {
  std::vector<int64_t> row(vars.size(), 1);
  return Ring::polynomial(F, vars, {row});
}

std::map<Degree, size_t> degree_counts(const Presentation& M) {
  std::map<Degree, size_t> out;
  for (auto& d : M.degrees()) ++out[d];
  return out;
}

int64_t choose2(int64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

// dim_k of degree m of k[x,y,z]/(f) with deg f = c.
int64_t hypersurface_dim(int64_t m, int64_t c) {
  if (m < 0) return 0;
  return choose2(m + 2) - (m >= c ? choose2(m - c + 2) : 0);
}

// q-th power of f: coefficients and exponents.
Poly frobenius(const Ring& R, const Poly& f, uint64_t q) {
  std::vector<Term> terms;
  for (auto& t : f.t) {
    std::vector<unsigned> ex(R.nvars());
    for (size_t j = 0; j < R.nvars(); ++j) ex[j] = unsigned(t.m.e[j] * q);
    terms.push_back({R.make_monomial(ex), R.field()->pow(t.c, q)});
  }
  return R.normalize(std::move(terms));
}

// Sends the generator x^a of F_*^e R to x^a in R and checks every relation
// column lands in the ideal.
void check_relations_vanish(const RingPtr& R, unsigned e, const Presentation& P) {
  auto B = pushforward_basis(*R, e);
  std::vector<size_t> kept;
  for (size_t a = 0; a < B.exponents.size(); ++a) {
    bool ok = true;
    for (auto x : B.degrees[a]) ok = ok && x % int64_t(B.q) == 0;
    if (ok) kept.push_back(a);
  }
  REQUIRE(kept.size() == P.ngens());
  for (auto& col : P.relations()) {
    Poly total;
    for (size_t r = 0; r < col.size(); ++r) {
      if (col[r].is_zero()) continue;
      std::vector<unsigned> ex(B.exponents[kept[r]].begin(), B.exponents[kept[r]].end());
      Poly xa = R->term(R->make_monomial(ex), R->field()->one());
      total = R->add(total, R->mul(frobenius(*R, col[r], B.q), xa));
    }
    CHECK(R->reduce(total).is_zero());
  }
}

}  // namespace

TEST_CASE("pushforward basis") {
  auto R = standard(Field::prime(3), {"x", "y", "z"});
  auto B = pushforward_basis(*R, 1);
  CHECK(B.q == 3);
  REQUIRE(B.exponents.size() == 27);
  CHECK(B.exponents[0] == std::vector<unsigned>{0, 0, 0});
  CHECK(B.exponents[1] == std::vector<unsigned>{0, 0, 1});
  CHECK(B.exponents[3] == std::vector<unsigned>{0, 1, 0});
  CHECK(B.exponents[26] == std::vector<unsigned>{2, 2, 2});
  CHECK(B.degrees[26] == Degree{6});
  CHECK(pushforward_basis(*R, 2).exponents.size() == 729);
  CHECK(pushforward_basis(*R, 0).exponents.size() == 1);
}

TEST_CASE("pushforwards of projective spaces") {
  auto P2 = standard(Field::prime(3), {"x", "y", "z"});
  auto F = pushforward_ring(P2, 1);
  CHECK(F->is_free());
  CHECK(degree_counts(*F) == std::map<Degree, size_t>{{{0}, 1}, {{1}, 7}, {{2}, 1}});

  auto full = pushforward_ring(P2, 1, TwistConvention::Full);
  CHECK(full->is_free());
  CHECK(full->ngens() == 27);
  // Class j of the full module is F_*O(j) shifted by ceil(j/3).
  CHECK(degree_counts(*full) == std::map<Degree, size_t>{{{0}, 1}, {{1}, 3 + 6 + 7}, {{2}, 6 + 3 + 1}});

  auto P1 = standard(Field::prime(2), {"s", "t"});
  CHECK(degree_counts(*pushforward_ring(P1, 1)) == std::map<Degree, size_t>{{{0}, 1}, {{1}, 1}});
  CHECK(degree_counts(*pushforward_ring(P1, 2)) == std::map<Degree, size_t>{{{0}, 1}, {{1}, 3}});

  auto E0 = pushforward_ring(P2, 0);
  CHECK(E0->ngens() == 1);
  CHECK(E0->is_free());
  CHECK(E0->degree(0) == Degree{0});

  // Free modules push forward to free modules of rank mu p^(e n) in the
  // full convention.
  auto M = make_module(Presentation::free(P1, {{0}, {3}}));
  auto FM = pushforward_module(M, 2, TwistConvention::Full);
  CHECK(FM->is_free());
  CHECK(FM->ngens() == 2 * 16);
}

TEST_CASE("Hirzebruch surface F_3") {
  auto F3 = Field::prime(3);
  auto X = Ring::polynomial(F3, {"x0", "x1", "x2", "x3"}, {{1, -3, 1, 0}, {0, 1, 0, 1}});
  auto O = pushforward_ring(X, 1);
  CHECK(O->is_free());
  // Generator degree -d for each summand O(d).
  CHECK(degree_counts(*O) ==
        std::map<Degree, size_t>{{{0, 0}, 1}, {{1, 0}, 2}, {{0, 1}, 2}, {{-1, 1}, 3}, {{-2, 1}, 1}});

  auto O11 = make_module(Presentation::free(X, {{-1, -1}}));
  auto F11 = pushforward_module(O11, 1);
  CHECK(F11->is_free());
  CHECK(degree_counts(*F11) ==
        std::map<Degree, size_t>{{{0, 0}, 3}, {{1, 0}, 1}, {{-1, 1}, 1}, {{-1, 0}, 2}, {{-2, 1}, 2}});

  // The same surface with the two grading coordinates swapped.
  auto Y = Ring::polynomial(F3, {"x0", "x1", "x2", "x3"}, {{0, 1, 0, 1}, {1, -3, 1, 0}});
  CHECK(degree_counts(*pushforward_ring(Y, 1)) ==
        std::map<Degree, size_t>{{{0, 0}, 1}, {{0, 1}, 2}, {{1, 0}, 2}, {{1, -1}, 3}, {{1, -2}, 1}});

  CHECK_THROWS_AS(pushforward_ring(X, 1, TwistConvention::Full), Error);
}

TEST_CASE("pushforward of a plane cubic") {
  auto S = standard(Field::prime(7), {"x", "y", "z"});
  auto R = S->quotient({parse_poly(*S, "x^3+y^3+z^3")});
  auto raw = pushforward_ring(R, 1, TwistConvention::Sheaf, false);
  CHECK(raw->ngens() == 1 + 33 + 15);
  check_relations_vanish(R, 1, *raw);

  auto F = pushforward_ring(R, 1);
  CHECK(F->ngens() < raw->ngens());
  std::vector<Degree> window{{0}, {1}, {2}, {3}};
  auto h = hilbert_window(*F, window);
  for (size_t d = 0; d < window.size(); ++d) CHECK(int64_t(h[d]) == hypersurface_dim(7 * int64_t(d), 3));
  CHECK(hilbert_window(*raw, window) == h);
}

TEST_CASE("pushforward over a nonprime field") {
  auto F4 = Field::finite(2, 2);
  auto S = standard(F4, {"x", "y", "z"});
  std::string a = F4->generator_name();
  auto R = S->quotient({parse_poly(*S, "x^2*y + " + a + "*y^2*z + z^3")});
  auto raw = pushforward_ring(R, 1, TwistConvention::Sheaf, false);
  check_relations_vanish(R, 1, *raw);
  auto raw2 = pushforward_ring(R, 2, TwistConvention::Sheaf, false);
  check_relations_vanish(R, 2, *raw2);
  auto F = pushforward_ring(R, 1);
  std::vector<Degree> window{{0}, {1}, {2}};
  auto h = hilbert_window(*F, window);
  for (size_t d = 0; d < window.size(); ++d) CHECK(int64_t(h[d]) == hypersurface_dim(2 * int64_t(d), 3));
}

TEST_CASE("iterated pushforward") {
  auto S = standard(Field::prime(2), {"x", "y", "z"});
  auto R = S->quotient({parse_poly(*S, "x*y*z")});
  auto once = pushforward_ring(R, 1);
  auto twice = pushforward_module(once, 1);
  auto direct = pushforward_ring(R, 2);
  auto w = default_window(*direct, 2);
  CHECK(hilbert_window(*twice, w) == hilbert_window(*direct, w));

  DecomposeConfig cfg;
  auto A = decompose(twice, cfg), B = decompose(direct, cfg);
  REQUIRE(A.summands.size() == B.summands.size());
  // Match summands one to one by isomorphism.
  std::mt19937_64 rng(1);
  std::vector<bool> used(B.summands.size(), false);
  for (auto& s : A.summands) {
    bool found = false;
    for (size_t j = 0; j < B.summands.size() && !found; ++j) {
      if (used[j]) continue;
      if (isomorphic(s.module, B.summands[j].module, S->zero_degree(), rng)) found = used[j] = true;
    }
    CHECK(found);
  }
}

TEST_CASE("pushforward errors") {
  auto Q = standard(Field::rationals(), {"x", "y"});
  CHECK_THROWS_AS(pushforward_ring(Q, 1), Error);
  auto L = Ring::polynomial(Field::prime(2), {"x", "y"}, {{1, 1}}, RingMode::Local);
  try {
    pushforward_ring(L, 1);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotGraded);
  }
  try {
    pushforward_ring(Q, 1);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CharZero);
  }
}

TEST_CASE("syzygies of the residue field over a Golod ring") {
  auto S = standard(Field::prime(101), {"x", "y"});
  auto R = S->quotient({parse_poly(*S, "x^3"), parse_poly(*S, "x^2*y^3"), parse_poly(*S, "y^5")});
  std::vector<Column> rel{{R->variable(0)}, {R->variable(1)}};
  auto k = make_module(Presentation(R, {{0}}, rel));

  auto syz1 = syzygy_module(k, 1);
  CHECK(syz1->ngens() == 2);
  // syz^1(k) is the maximal ideal: same Hilbert function as R minus k.
  auto Rfree = make_module(Presentation::free(R, {{0}}));
  std::vector<Degree> window;
  for (int64_t d = 0; d <= 8; ++d) window.push_back({d});
  auto hm = hilbert_window(*syz1, window), hr = hilbert_window(*Rfree, window);
  CHECK(hm[0] == 0);
  for (size_t d = 1; d < window.size(); ++d) CHECK(hm[d] == hr[d]);

  auto ranks = resolution_ranks(k, 4);
  CHECK(ranks == std::vector<size_t>{1, 2, 4, 8, 16});
  CHECK(syzygy_module(k, 0)->ngens() == 1);
}
