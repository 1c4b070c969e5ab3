#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "summands/modules.hpp"
#include "summands/unipoly.hpp"

namespace summands {

struct Eigenvalue {
  Scalar lambda;
  unsigned algebraic = 0;
  unsigned geometric = 0;
};

struct EigenData {
  FieldPtr field;  // where the listed eigenvalues live
  std::vector<Eigenvalue> values;
  UniPoly charpoly, minpoly;  // over the matrix's own field
  // Every root of the characteristic polynomial is listed.
  bool complete = false;
  size_t distinct() const { return values.size(); }
};

// Largest field order autoextension may reach.
constexpr uint64_t kExtensionLimit = uint64_t(1) << 20;

// Eigenvalues of A over its field, or over the splitting field of the
// characteristic polynomial when `autoextend` is set (finite fields only).
EigenData eigen_data(const Matrix& A, bool autoextend, uint64_t limit = kExtensionLimit);

enum class SplitterKind { GradedPower, IdempotentPower, GuessedIdempotent };

struct Splitter {
  Hom psi;
  SplitterKind kind = SplitterKind::GradedPower;
  Scalar lambda;
  mpz_class exponent;
};

enum class ExponentMode { Geometric, MuOfM };

// psi_j = (phi - lambda_j)^n_j for the eigenvalues of E (which must live in
// the module's field), n_j the geometric multiplicity or mu(M).
std::vector<Splitter> graded_splitters(const ModulePtr& M, const Hom& phi, const EigenData& E,
                                       ExponentMode mode = ExponentMode::MuOfM);

// psi_j = (phi - lambda_j)^(p^e0 (p^e - 1)) for the eigenvalues of phi mod m
// in the module's field; trivial splitters are dropped.
std::vector<Splitter> local_splitters(const ModulePtr& M, const Hom& phi);

struct Split {
  ModulePtr kernel, image;
  Hom kernel_inclusion;  // ker -> M
  Hom image_inclusion;   // im -> M, induced by psi
  Hom image_projection;  // M -> im
  bool hilbert_ok = true;
};

// M = ker psi + im psi; nullopt when one side is zero.
std::optional<Split> split_by(const ModulePtr& M, const Splitter& s);

// Nontrivial exact idempotents among the minimal generators g of End(M)
// and their complements 1 - g.
std::vector<Splitter> guess_idempotents(const ModulePtr& M);

enum class CertifyLevel { Quick, Minpoly, Charpoly };

struct Certificate {
  bool certified = false;
  std::string witness;
};

// Indecomposability over the algebraic closure from the reductions A_i of
// an endomorphism basis. Quick: the span is one-dimensional. Minpoly and
// charpoly: the generic combination has a single eigenvalue.
Certificate certify_reductions(const std::vector<Matrix>& A, CertifyLevel level);
Certificate certify_indecomposable(const ModulePtr& M, CertifyLevel level);

enum class SummandStatus { Certified, Presumed, FreeLineBundle };

struct Summand {
  ModulePtr module;
  SummandStatus status = SummandStatus::Presumed;
  Degree free_degree;  // for FreeLineBundle: the module is R(-free_degree)
  Hom inclusion;       // S -> M
  Hom projection;      // M -> S
  // Witness maps compose to the identity of S exactly (otherwise modulo m).
  bool exact = true;
  size_t group = 0;
  Degree twist;        // S = representative(-twist) up to isomorphism
};

struct SummandGroup {
  size_t representative;
  std::vector<size_t> members;
};

struct Decomposition {
  ModulePtr input;
  ModulePtr module;  // minimal presentation, over the extended field if any
  FieldPtr field;
  bool extended = false;
  std::vector<Summand> summands;
  std::vector<SummandGroup> groups;
  uint64_t seed = 0;
  size_t samples = 0;
  std::vector<std::string> notes;
};

struct DecomposeConfig {
  uint64_t seed = 0;
  int attempts = 8;
  // Default: on for finite fields, off otherwise.
  std::optional<bool> autoextend;
  uint64_t extension_limit = kExtensionLimit;
  CertifyLevel certify = CertifyLevel::Quick;
  bool group = true;
  // Group summands that agree up to a degree shift.
  bool shift_insensitive = false;
  int window = 2;
};

Decomposition decompose(const ModulePtr& M, const DecomposeConfig& config = {});

struct Soundness {
  bool partition = true;  // sum e_S = id and e_S e_T = 0 modulo m
  bool hilbert = true;    // graded only
  bool witnesses = true;  // witness maps are well defined
  bool ok() const { return partition && hilbert && witnesses; }
};

Soundness check_decomposition(const Decomposition& D, int window = 2);

// Isomorphism test used for grouping: generator counts, Hilbert windows
// and degree-shift-delta maps both ways with invertible reductions.
bool isomorphic(const ModulePtr& S, const ModulePtr& T, const Degree& delta, std::mt19937_64& rng, int window = 2);

// Same module over a larger field.
ModulePtr extend_module(const ModulePtr& M, const RingPtr& target);
Hom extend_hom(const Hom& h, const ModulePtr& source, const ModulePtr& target);

std::string status_name(SummandStatus s);

}  // namespace summands
