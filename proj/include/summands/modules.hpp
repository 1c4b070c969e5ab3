#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "summands/groebner.hpp"
#include "summands/linalg.hpp"

namespace summands {

// coker(relations: F1 -> F0) with F0 = sum of R(-d_i). Relation columns are
// vectors of F0; in graded mode each column is homogeneous.
class Presentation {
 public:
  Presentation() = default;
  Presentation(RingPtr ring, std::vector<Degree> degrees, std::vector<Column> relations);
  static Presentation free(RingPtr ring, std::vector<Degree> degrees);

  const RingPtr& ring() const { return ring_; }
  size_t ngens() const { return degrees_.size(); }
  size_t nrels() const { return rels_.size(); }
  const std::vector<Degree>& degrees() const { return degrees_; }
  const Degree& degree(size_t i) const { return degrees_[i]; }
  const std::vector<Column>& relations() const { return rels_; }
  bool graded() const { return ring_->mode() == RingMode::Graded; }
  bool is_free() const { return rels_.empty(); }

  // Weights of the generators under the ring's positivity witness.
  std::vector<int64_t> row_weights() const;
  // Degree of relation column j; nullopt for a zero column or in local mode.
  std::optional<Degree> relation_degree(size_t j) const;
  ModuleOrder order(bool local = false) const;

  // Gröbner basis of image(relations) + I*F0 in the global order, complete
  // up to `bound` (everything when absent). Cached.
  std::shared_ptr<const GroebnerBasis> relation_basis(std::optional<int64_t> bound = {}) const;
  // Standard basis in the local order (membership after localizing). Cached.
  std::shared_ptr<const GroebnerBasis> local_basis() const;

  // v represents zero in M (globally, or after localizing at the origin).
  bool is_zero_element(const Column& v, bool local = false) const;

  // Generator degrees shifted by `delta` (so the result is M(-delta)).
  Presentation shifted(const Degree& delta) const;
  std::string format() const;

 private:
  struct Cache {
    std::mutex mu;
    std::shared_ptr<const GroebnerBasis> global;
    std::shared_ptr<const GroebnerBasis> local;
  };
  RingPtr ring_;
  std::vector<Degree> degrees_;
  std::vector<Column> rels_;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

using ModulePtr = std::shared_ptr<const Presentation>;

inline ModulePtr make_module(Presentation p) { return std::make_shared<const Presentation>(std::move(p)); }

// Homomorphism given by the images of the source generators, each a column
// over the target's F0. `shift` is the degree of the map.
struct Hom {
  ModulePtr source, target;
  std::vector<Column> images;
  Degree shift;
};

Hom identity_hom(const ModulePtr& M);
Hom zero_hom(const ModulePtr& M, const ModulePtr& N);
// g o f
Hom compose(const Hom& g, const Hom& f);
Hom add(const Hom& a, const Hom& b);
Hom sub(const Hom& a, const Hom& b);
Hom scale(const Hom& a, const Scalar& c);
Hom hom_pow(const Hom& a, const mpz_class& e);
// Image of a vector of the source's F0.
Column apply(const Hom& h, const Column& v);
// Images in normal form modulo the target relations (graded: canonical).
Hom normalize(const Hom& h);
bool is_well_defined(const Hom& h, bool local = false);
bool is_zero_hom(const Hom& h, bool local = false);
bool equal_homs(const Hom& a, const Hom& b, bool local = false);
// Induced map on generators modulo the maximal ideal (constant terms).
Matrix reduce_mod_m(const Hom& h);
// Linear combination sum c_i h_i of maps with a common source and target.
Hom combine(const std::vector<Hom>& hs, const std::vector<Scalar>& c);

struct Minimized {
  ModulePtr module;
  Hom to_new;  // M -> M'
  Hom to_old;  // M' -> M
  // False when a local pivot made to_new correct only modulo m.
  bool exact = true;
};

// Pivot away unit entries, then drop redundant relations.
Minimized minimize(const ModulePtr& M);
// Drop relations lying in the span of the others.
Presentation prune_relations(const Presentation& M);
bool is_minimal(const Presentation& M);

// dim_k [M]_d for each d.
std::vector<size_t> hilbert_window(const Presentation& M, const std::vector<Degree>& degrees);
// Degrees d_i + t*u for the generator degrees d_i, t in [-width, width] and
// u each unit vector of Z^r, with the ring's positivity.
std::vector<Degree> default_window(const Presentation& M, int width);

struct HomModule {
  Presentation module;
  // Concrete map for each generator of `module`.
  std::vector<Hom> maps;
};

HomModule hom_module(const ModulePtr& M, const ModulePtr& N);

// k-basis of the degree-delta part of Hom(M, N) for graded modules. With
// `reductions_only`, just enough maps for their reductions modulo m to span
// the image in Hom_k(M/mM, N/mN).
// `unit_entries` then receives, for each map, an entry (row, column) where
// its reduction is 1 and every other returned reduction is 0.
std::vector<Hom> hom_graded(const ModulePtr& M, const ModulePtr& N, const Degree& delta, bool reductions_only = false,
                            std::vector<std::pair<size_t, size_t>>* unit_entries = nullptr);

struct End0Basis {
  ModulePtr module;
  std::vector<Hom> basis;
  std::vector<Matrix> reductions;
  bool graded = true;
  // When filled: reductions[k](unit_entries[l]) is 1 for k == l, else 0.
  std::vector<std::pair<size_t, size_t>> unit_entries;
  size_t r() const { return basis.size(); }
};

// Graded: a k-basis of [End(M)]_0. Local: generators of End(M) with
// linearly independent reductions (a basis of the image in End_k(M/mM)),
// identity first. Requires a minimal presentation. `reductions_only` trims
// the graded basis to maps whose reductions span the same image.
End0Basis end0_basis(const ModulePtr& M, bool reductions_only = false);

// Random k-combination of the basis and its reduction.
std::pair<Hom, Matrix> random_endomorphism(const End0Basis& B, std::mt19937_64& rng);

}  // namespace summands
