#include <doctest.h>

#include <map>
#include <random>

#include "summands/expr.hpp"
#include "summands/modules.hpp"

using namespace summands;

namespace {

RingPtr standard(FieldPtr F, std::vector<std::string> vars, RingMode mode = RingMode::Graded) {
  std::vector<int64_t> row(vars.size(), 1);
  return Ring::polynomial(F, vars, {row}, mode);
}

RingPtr golod(FieldPtr F) {
  auto S = standard(F, {"x", "y"});
  return S->quotient({parse_poly(*S, "x^3"), parse_poly(*S, "x^2*y^3"), parse_poly(*S, "y^5")});
}

// Relation matrix given row by row as expression strings.
ModulePtr coker(const RingPtr& R, std::vector<Degree> degs, const std::vector<std::vector<std::string>>& rows) {
  size_t t = rows.empty() ? 0 : rows[0].size();
  std::vector<Column> cols(t, Column(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < t; ++j) cols[j][i] = parse_poly(*R, rows[i][j]);
  return make_module(Presentation(R, std::move(degs), std::move(cols)));
}

// Graded pieces of M computed from scratch: [F0]_d over the ambient
// polynomial ring modulo the span of monomial multiples of the relations and
// of the ideal generators.
struct Piece {
  std::vector<std::pair<size_t, Monomial>> coords;  // all of [F0]_d over S
  Echelon rel;                                       // echelon form of the relation span
  std::vector<size_t> free_cols;                     // coordinates giving a basis of the quotient
};

class Oracle {
 public:
  explicit Oracle(const Presentation& M) : M_(M), R_(*M.ring()), S_(*M.ring()->base()), F_(M.ring()->field()) {}

  const Piece& piece(int64_t d) {
    auto it = cache_.find(d);
    if (it != cache_.end()) return it->second;
    Piece P;
    std::map<std::pair<size_t, std::vector<uint16_t>>, size_t> index;
    for (size_t i = 0; i < M_.ngens(); ++i)
      for (auto& m : S_.monomials_of_degree({d - M_.degree(i)[0]})) {
        index[{i, std::vector<uint16_t>(m.e.begin(), m.e.end())}] = P.coords.size();
        P.coords.push_back({i, m});
      }
    std::vector<std::vector<std::pair<size_t, Scalar>>> gens;
    auto add_multiples = [&](const std::vector<Poly>& col, int64_t cd) {
      for (auto& m : S_.monomials_of_degree({d - cd})) {
        std::vector<std::pair<size_t, Scalar>> v;
        for (size_t i = 0; i < col.size(); ++i)
          for (auto& t : col[i].t) {
            Monomial p = t.m * m;
            v.push_back({index.at({i, std::vector<uint16_t>(p.e.begin(), p.e.end())}), t.c});
          }
        gens.push_back(std::move(v));
      }
    };
    for (size_t j = 0; j < M_.nrels(); ++j) add_multiples(M_.relations()[j], (*M_.relation_degree(j))[0]);
    for (auto& g : R_.ideal_generators())
      for (size_t i = 0; i < M_.ngens(); ++i) {
        std::vector<Poly> col(M_.ngens());
        col[i] = g;
        add_multiples(col, (*S_.degree_of(g))[0] + M_.degree(i)[0]);
      }
    Matrix A(F_, gens.size(), P.coords.size());
    for (size_t r = 0; r < gens.size(); ++r)
      for (auto& [c, v] : gens[r]) A(r, c) = F_->add(A(r, c), v);
    P.rel = rref(A);
    std::vector<bool> pivot(P.coords.size(), false);
    for (auto p : P.rel.pivots) pivot[p] = true;
    for (size_t c = 0; c < P.coords.size(); ++c)
      if (!pivot[c]) P.free_cols.push_back(c);
    return cache_[d] = std::move(P);
  }

  size_t dim(int64_t d) { return piece(d).free_cols.size(); }

  // Quotient coordinates of a vector given on [F0]_d.
  std::vector<Scalar> project(int64_t d, std::vector<Scalar> v) {
    const Piece& P = piece(d);
    for (size_t r = 0; r < P.rel.pivots.size(); ++r) {
      size_t p = P.rel.pivots[r];
      if (v[p].is_zero()) continue;
      Scalar c = v[p];
      for (size_t k = 0; k < v.size(); ++k) v[k] = F_->sub(v[k], F_->mul(c, P.rel.reduced(r, k)));
    }
    std::vector<Scalar> out;
    for (auto c : P.free_cols) out.push_back(v[c]);
    return out;
  }

  // Matrix of multiplication by variable x on [M]_d -> [M]_{d+1}.
  Matrix mult(size_t x, int64_t d) {
    const Piece& P = piece(d);
    const Piece& Q = piece(d + 1);
    Matrix X(F_, Q.free_cols.size(), P.free_cols.size());
    for (size_t b = 0; b < P.free_cols.size(); ++b) {
      auto [i, m] = P.coords[P.free_cols[b]];
      Monomial p = m * S_.variable_monomial(x);
      std::vector<Scalar> v(Q.coords.size());
      for (size_t c = 0; c < Q.coords.size(); ++c)
        if (Q.coords[c].first == i && Q.coords[c].second == p) v[c] = F_->one();
      auto w = project(d + 1, v);
      for (size_t a = 0; a < w.size(); ++a) X(a, b) = w[a];
    }
    return X;
  }

  // dim_k of degree-0 k-linear maps commuting with every variable, for a
  // module concentrated in degrees [lo, hi].
  size_t end0_dim(int64_t lo, int64_t hi) {
    REQUIRE(dim(hi + 1) == 0);
    std::vector<size_t> off;
    size_t n = 0;
    for (int64_t d = lo; d <= hi; ++d) {
      off.push_back(n);
      n += dim(d) * dim(d);
    }
    std::vector<SparseRow> rows;
    for (int64_t d = lo; d < hi; ++d) {
      size_t a = dim(d), b = dim(d + 1);
      size_t o0 = off[d - lo], o1 = off[d + 1 - lo];
      for (size_t x = 0; x < S_.nvars(); ++x) {
        Matrix X = mult(x, d);
        // (X T_d - T_{d+1} X)_{pq} = 0
        for (size_t p = 0; p < b; ++p)
          for (size_t q = 0; q < a; ++q) {
            SparseRow row;
            for (size_t k = 0; k < a; ++k)
              if (!X(p, k).is_zero()) row.push_back({uint32_t(o0 + k * a + q), X(p, k)});
            for (size_t k = 0; k < b; ++k)
              if (!X(k, q).is_zero()) row.push_back({uint32_t(o1 + p * b + k), F_->neg(X(k, q))});
            if (!row.empty()) rows.push_back(std::move(row));
          }
      }
    }
    return sparse_kernel(F_, n, rows).size();
  }

 private:
  const Presentation& M_;
  const Ring& R_;
  const Ring& S_;
  FieldPtr F_;
  std::map<int64_t, Piece> cache_;
};

bool same_shape(const Presentation& a, const Presentation& b) {
  auto da = a.degrees(), db = b.degrees();
  std::sort(da.begin(), da.end());
  std::sort(db.begin(), db.end());
  return da == db && a.nrels() == b.nrels();
}

}  // namespace

TEST_CASE("minimal presentations") {
  auto F = Field::rationals();
  auto R = standard(F, {"x", "y"});

  auto one = coker(R, {{0}}, {{"1"}});
  CHECK(minimize(one).module->ngens() == 0);
  auto id2 = coker(R, {{0}, {0}}, {{"1", "0"}, {"0", "1"}});
  CHECK(minimize(id2).module->ngens() == 0);

  auto M = coker(R, {{1}, {0}}, {{"x", "1"}, {"0", "y"}});
  auto mini = minimize(M);
  REQUIRE(mini.module->ngens() == 1);
  CHECK(mini.exact);
  CHECK(is_minimal(*mini.module));
  CHECK(mini.module->nrels() == 1);
  Oracle before(*M), after(*mini.module);
  auto window = default_window(*M, 3);
  auto hw = hilbert_window(*mini.module, window);
  for (size_t k = 0; k < window.size(); ++k) {
    CHECK(before.dim(window[k][0]) == after.dim(window[k][0]));
    CHECK(hw[k] == before.dim(window[k][0]));
  }

  // The change-of-basis maps are well defined and mutually inverse.
  CHECK(is_well_defined(mini.to_new));
  CHECK(is_well_defined(mini.to_old));
  CHECK(equal_homs(compose(mini.to_old, mini.to_new), identity_hom(M)));
  CHECK(equal_homs(compose(mini.to_new, mini.to_old), identity_hom(mini.module)));
}

TEST_CASE("minimization preserves Hilbert functions") {
  std::mt19937_64 rng(11);
  auto F = Field::prime(3);
  auto R = golod(F);
  auto S = R->base();
  for (int trial = 0; trial < 12; ++trial) {
    // Generators in degrees 0..2; random homogeneous relations of degree 2..3
    // with an occasional unit entry between equal degrees.
    size_t s = 2 + rng() % 3, t = 1 + rng() % 4;
    std::vector<Degree> degs;
    for (size_t i = 0; i < s; ++i) degs.push_back({int64_t(rng() % 3)});
    std::vector<Column> cols;
    for (size_t j = 0; j < t; ++j) {
      int64_t cd = 2 + int64_t(rng() % 2);
      Column c(s);
      for (size_t i = 0; i < s; ++i)
        for (auto& m : R->basis_in_degree({cd - degs[i][0]}))
          if (rng() % 2) c[i] = R->add(c[i], R->term(m, F->random(rng)));
      cols.push_back(std::move(c));
    }
    auto M = make_module(Presentation(R, degs, cols));
    auto mini = minimize(M);
    CHECK(is_minimal(*mini.module));
    auto window = default_window(*M, 2);
    CHECK(hilbert_window(*M, window) == hilbert_window(*mini.module, window));
    Oracle o(*M);
    auto hw = hilbert_window(*M, window);
    for (size_t k = 0; k < window.size(); ++k) CHECK(hw[k] == o.dim(window[k][0]));
    CHECK(equal_homs(compose(mini.to_old, mini.to_new), identity_hom(M)));
    CHECK(equal_homs(compose(mini.to_new, mini.to_old), identity_hom(mini.module)));
  }
}

TEST_CASE("hilbert window") {
  auto F = Field::prime(5);
  auto R = standard(F, {"x", "y"});
  CHECK(hilbert_window(Presentation::free(R, {{0}}), {{3}}) == std::vector<size_t>{4});
  auto X = standard(F, {"x"});
  CHECK(hilbert_window(Presentation::free(X, {{1}, {0}}), {{1}}) == std::vector<size_t>{2});
  auto L = standard(F, {"x"}, RingMode::Local);
  CHECK_THROWS_AS(hilbert_window(Presentation::free(L, {{0}}), {{1}}), Error);
}

TEST_CASE("graded presentations are checked") {
  auto R = standard(Field::prime(5), {"x", "y"});
  CHECK_THROWS_AS(coker(R, {{0}}, {{"x + y^2"}}), Error);
  CHECK_THROWS_AS(coker(R, {{0}, {0}}, {{"x"}, {"y^2"}}), Error);
  CHECK_NOTHROW(coker(R, {{0}, {1}}, {{"x^2"}, {"y"}}));
}

TEST_CASE("hom modules") {
  auto F = Field::prime(5);
  auto R = standard(F, {"x", "y"});
  auto Rm = make_module(Presentation::free(R, {{0}}));
  auto H = hom_module(Rm, Rm);
  CHECK(H.module.ngens() == 1);
  CHECK(H.module.nrels() == 0);
  REQUIRE(H.maps.size() == 1);
  CHECK(equal_homs(H.maps[0], identity_hom(Rm)));

  // Hom(R(-a), R) = R(a), generated by a map of degree -a.
  for (int64_t a : {1, 2, 3}) {
    auto Ra = make_module(Presentation::free(R, {{a}}));
    auto Ha = hom_module(Ra, Rm);
    REQUIRE(Ha.module.ngens() == 1);
    CHECK(Ha.module.nrels() == 0);
    CHECK(Ha.module.degree(0) == Degree{-a});
  }

  // Hom(R, N) is N again.
  auto N = coker(R, {{0}, {1}}, {{"x^2", "y^2"}, {"y", "x"}});
  auto HN = hom_module(Rm, N);
  auto a = minimize(make_module(HN.module)).module;
  auto b = minimize(N).module;
  CHECK(same_shape(*a, *b));
  for (auto& h : HN.maps) CHECK(is_well_defined(h));
}

TEST_CASE("Hom(m, R) over the Golod ring") {
  auto R = golod(Field::prime(2));
  // m = (x, y) presented by the syzygies of (x, y).
  auto syz = syzygies(R, {{R->variable(0)}, {R->variable(1)}}, 1, {0});
  std::vector<Column> rels = syz;
  auto mm = make_module(Presentation(R, {{1}, {1}}, rels));
  auto H = hom_module(mm, make_module(Presentation::free(R, {{0}})));
  for (auto& h : H.maps) CHECK(is_well_defined(h));
  auto N = minimize(make_module(H.module)).module;
  CHECK(N->ngens() == 4);
  CHECK(N->nrels() == 8);
}

TEST_CASE("degree-zero endomorphisms") {
  auto F = Field::prime(7);
  auto X = standard(F, {"x"});
  auto sum = make_module(Presentation::free(X, {{0}, {1}}));
  auto B = end0_basis(sum);
  CHECK(B.r() == 3);
  for (auto& h : B.basis) CHECK(is_well_defined(h));

  auto R = standard(F, {"x", "y"});
  auto Rm = make_module(Presentation::free(R, {{0}}));
  auto BR = end0_basis(Rm);
  CHECK(BR.r() == 1);
  CHECK(BR.reductions[0] == Matrix::identity(F, 1));

  CHECK_THROWS_AS(end0_basis(coker(R, {{0}}, {{"1"}})), Error);
}

TEST_CASE("end0 against brute force") {
  auto F = Field::prime(3);
  auto S = standard(F, {"x", "y"});
  auto A = S->quotient({parse_poly(*S, "x^2"), parse_poly(*S, "y^2")});
  auto Sq = S->quotient({parse_poly(*S, "x^2"), parse_poly(*S, "x*y"), parse_poly(*S, "y^2")});
  auto G = golod(F);

  struct Case {
    ModulePtr M;
    int64_t lo, hi;
  };
  std::vector<Case> cases{
      {coker(Sq, {{0}}, {{"x", "y"}}), 0, 0},                                   // k
      {coker(Sq, {{1}, {1}}, {{"x", "y", "0", "0"}, {"0", "0", "x", "y"}}), 1, 1},  // m = k(-1)^2
      {make_module(Presentation::free(A, {{0}})), 0, 2},
      {make_module(Presentation::free(A, {{0}, {1}})), 0, 3},
      {coker(A, {{0}, {1}}, {{"y", "0"}, {"1", "x"}}), 0, 3},
      {coker(A, {{0}, {0}}, {{"x", "y"}, {"y", "x"}}), 0, 2},
      {make_module(Presentation::free(G, {{0}})), 0, 6},
      {coker(G, {{0}, {0}}, {{"x", "y^2"}, {"y", "0"}}), 0, 6},
  };
  for (auto& c : cases) {
    auto M = minimize(c.M).module;
    Oracle o(*M);
    auto B = end0_basis(M);
    CHECK(B.r() == o.end0_dim(c.lo, c.hi));
    // The identity lies in the span of the reductions.
    Matrix span(F, B.r() + 1, M->ngens() * M->ngens());
    for (size_t k = 0; k <= B.r(); ++k) {
      Matrix Ak = k < B.r() ? B.reductions[k] : Matrix::identity(F, M->ngens());
      for (size_t i = 0; i < M->ngens(); ++i)
        for (size_t j = 0; j < M->ngens(); ++j) span(k, i * M->ngens() + j) = Ak(i, j);
    }
    Matrix only(F, B.r(), M->ngens() * M->ngens());
    for (size_t k = 0; k < B.r(); ++k)
      for (size_t x = 0; x < only.cols(); ++x) only(k, x) = span(k, x);
    CHECK(rank(span) == rank(only));
    // The trimmed basis spans the same reductions, with no redundancy.
    auto T = end0_basis(M, true);
    Matrix both(F, B.r() + T.r(), M->ngens() * M->ngens());
    for (size_t k = 0; k < B.r() + T.r(); ++k) {
      const Matrix& Ak = k < B.r() ? B.reductions[k] : T.reductions[k - B.r()];
      for (size_t i = 0; i < M->ngens(); ++i)
        for (size_t j = 0; j < M->ngens(); ++j) both(k, i * M->ngens() + j) = Ak(i, j);
    }
    CHECK(rank(both) == rank(only));
    CHECK(T.r() == rank(only));
    REQUIRE(T.unit_entries.size() == T.r());
    for (size_t k = 0; k < T.r(); ++k)
      for (size_t l = 0; l < T.r(); ++l) {
        auto [i, j] = T.unit_entries[l];
        CHECK(T.reductions[k](i, j) == (k == l ? F->one() : F->zero()));
      }
    for (auto& h : T.basis) CHECK(is_well_defined(h));
    for (auto& h : B.basis) {
      CHECK(is_well_defined(h));
      CHECK(h.shift == Degree{0});
      for (size_t j = 0; j < h.images.size(); ++j)
        for (size_t i = 0; i < M->ngens(); ++i)
          if (!h.images[j][i].is_zero()) CHECK(M->ring()->degree_of(h.images[j][i]) == M->degree(j) - M->degree(i));
    }
  }
}

TEST_CASE("random endomorphisms of R^2 over F_7") {
  auto F = Field::prime(7);
  auto R = standard(F, {"x", "y"});
  auto M = make_module(Presentation::free(R, {{0}, {0}}));
  auto B = end0_basis(M);
  REQUIRE(B.r() == 4);
  size_t distinct = 0;
  for (uint64_t seed = 0; seed < 1000; ++seed) {
    std::mt19937_64 rng(seed);
    auto [phi, A] = random_endomorphism(B, rng);
    CHECK(reduce_mod_m(phi) == A);
    // Two distinct eigenvalues over the closure iff the discriminant of the
    // characteristic polynomial is nonzero.
    Scalar tr = F->add(A(0, 0), A(1, 1));
    Scalar det = F->sub(F->mul(A(0, 0), A(1, 1)), F->mul(A(0, 1), A(1, 0)));
    Scalar disc = F->sub(F->mul(tr, tr), F->mul(F->from_int(4), det));
    distinct += !disc.is_zero();
  }
  CHECK(double(distinct) / 1000 > 0.70);
}

TEST_CASE("local presentations") {
  auto F = Field::prime(5);
  auto L = standard(F, {"x", "y"}, RingMode::Local);

  // 1 + x is a unit after localizing.
  auto U = coker(L, {{}}, {{"1 + x"}});
  auto mu = minimize(U);
  CHECK(mu.module->ngens() == 0);

  auto M = coker(L, {{}, {}}, {{"x", "1 + y"}, {"0", "x*y"}});
  auto mini = minimize(M);
  CHECK(mini.module->ngens() == 1);
  CHECK(is_minimal(*mini.module));
  CHECK(is_well_defined(mini.to_old, true));

  // R + R/(x): the image of End in End_k(k^2) is the lower triangular algebra.
  auto N = coker(L, {{}, {}}, {{"0"}, {"x"}});
  auto B = end0_basis(N);
  CHECK_FALSE(B.graded);
  CHECK(B.r() == 3);
  for (auto& h : B.basis) CHECK(is_well_defined(h, true));
}
