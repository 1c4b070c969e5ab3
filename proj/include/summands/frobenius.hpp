#pragma once

#include <cstdint>
#include <vector>

#include "summands/modules.hpp"

namespace summands {

// Which degree classes of F_*^e M are kept.
//   Sheaf: generators x^a e_i with d_i + deg(a) divisible by p^e, in degree
//          (d_i + deg(a)) / p^e. This is Gamma_*(F_*^e M~), the convention
//          under which F_*O_{P^n} has the twists O, ..., O(-n).
//   Full:  every x^a e_i, in degree ceil((d_i + deg(a)) / p^e). Each degree
//          class is a direct summand. Rank-1 gradings only; multigraded
//          rings raise NonIntegralDegrees.
enum class TwistConvention { Sheaf, Full };

struct PushforwardBasis {
  unsigned e = 0;
  uint64_t q = 1;  // p^e
  // Exponent vectors with entries below q, lexicographic.
  std::vector<std::vector<unsigned>> exponents;
  std::vector<Degree> degrees;  // deg(x^a) in the ring's grading
};

PushforwardBasis pushforward_basis(const Ring& R, unsigned e);

// F_*^e R as a module over R.
ModulePtr pushforward_ring(const RingPtr& R, unsigned e, TwistConvention conv = TwistConvention::Sheaf,
                           bool minimal = true);

// F_*^e M over the ring of M. Before minimization the sheaf convention has
// the generators of the zero class, the full convention mu(M) p^(e n).
ModulePtr pushforward_module(const ModulePtr& M, unsigned e, TwistConvention conv = TwistConvention::Sheaf,
                             bool minimal = true);

// i-th syzygy module in a minimal free resolution (i = 0 gives M minimized).
ModulePtr syzygy_module(const ModulePtr& M, unsigned i);

// Ranks of F_0, ..., F_n in a minimal free resolution of M.
std::vector<size_t> resolution_ranks(const ModulePtr& M, unsigned n);

}  // namespace summands
