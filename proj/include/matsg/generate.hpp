#pragma once

// Seeded random semigroup models with known structure.

#include <cstdint>
#include <vector>

#include "matsg/semigroup.hpp"

namespace matsg {

struct GeneratedModel {
  SemigroupModel model;
  int zero_dim = 0;
  std::vector<int> block_dims;   // sorted: plain part, each rotating block, zero part
  std::vector<double> rates;     // sorted a of every primary component
};

struct GeneratorOptions {
  int min_dim = 2;
  int max_dim = 8;
  bool allow_zero = true;
  bool allow_rotating = true;
  bool allow_plain = true;
};

// Real mode on the basis {1, sqrt(2), sqrt(3)}: plain blocks aI, aI + N and
// aI + cL, rotating blocks Q^nu(x) exp(Mx) with M the real form of
// (a + ic) id + N and random non-linear nu, zero blocks; random orthogonal
// change of basis. Rates a are distinct and at least 0.1 apart.
GeneratedModel random_model(std::uint64_t seed, const GeneratorOptions& opt = {});

// Exact mode. With `rotating`, the basis is {1, sqrt(2)}, rotating blocks
// have M = 0 and angles in multiples of 8 units of the rotation (3/5, 4/5);
// otherwise the basis is {1} and plain blocks have nilpotent generators.
// Conjugators are integer unimodular: signed permutations when a rotating
// or zero block is present, integer shears otherwise.
GeneratedModel random_exact_model(std::uint64_t seed, bool rotating);

// Uniformly random orthogonal matrix.
Mat random_orthogonal(int n, std::uint64_t seed);

}  // namespace matsg
