#pragma once

// Covariance functions R(s, t) of centered Gaussian processes: Markov
// criterion, self-similarity, and the reduction g(x) = R(exp(-x), 1) of a
// self-similar covariance to a matrix semigroup.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "matsg/semigroup.hpp"

namespace matsg {

enum class KernelKind { min, fractional, table };
std::string to_string(KernelKind k);

class CovarianceModel {
 public:
  // min(s, t) id_d; self-similar with H = 1/2.
  static CovarianceModel min(int d = 1);
  // (s^2H + t^2H - |s - t|^2H) / 2 id_d.
  static CovarianceModel fractional(double h, int d = 1);
  // values[i][j] = R(times[i], times[j]); bilinear interpolation in between,
  // flagged approximate. Evaluation outside the grid is a DomainError.
  static CovarianceModel table(std::vector<double> times, std::vector<std::vector<Mat>> values,
                               std::optional<double> h = std::nullopt);

  Mat operator()(double s, double t) const;

  KernelKind kind() const { return kind_; }
  int dimension() const { return dim_; }
  std::optional<double> hurst() const { return h_; }
  bool approximate() const { return kind_ == KernelKind::table; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<std::vector<Mat>>& values() const { return values_; }

 private:
  KernelKind kind_ = KernelKind::min;
  int dim_ = 1;
  std::optional<double> h_;
  std::vector<double> times_;
  std::vector<std::vector<Mat>> values_;
};

struct MarkovEntry {
  std::array<double, 3> triple{};  // sorted s <= t <= u
  double residual = 0.0;
  std::string error;  // non-empty when R(t, t) is singular
};

struct MarkovReport {
  bool pass = true;
  double tol = 0.0;
  double max_residual = 0.0;
  std::vector<MarkovEntry> entries;
};

// ||R(s,t) R(t,t)^{-1} R(t,u) - R(s,u)|| per triple; unordered triples are
// sorted, non-positive entries are a PreconditionError.
MarkovReport markov_check(const CovarianceModel& r, const std::vector<std::array<double, 3>>& triples,
                          double tol);

struct SimilarityEntry {
  double s = 0.0, t = 0.0, a = 0.0;
  double residual = 0.0;
};

struct SimilarityReport {
  bool pass = true;
  double max_residual = 0.0;
  std::vector<SimilarityEntry> entries;
};

// ||R(as, at) - a^2H R(s, t)|| for every pair and scale.
SimilarityReport self_similarity_check(const CovarianceModel& r, double h,
                                       const std::vector<std::pair<double, double>>& pairs,
                                       const std::vector<double>& scales, double tol);

// Samples g(x) = R(exp(-x), 1). PreconditionError when R(1,1) != id (the
// message suggests the rescaling) or when a known exponent H fails the
// self-similarity check at tol.
SampleSet to_semigroup(const CovarianceModel& r, const BasisPtr& basis,
                       const std::vector<ModuleElement>& points, double tol = 1e-9);

// Triples (exp(-x-y), exp(-y), 1) matching the semigroup law at (x, y).
std::vector<std::array<double, 3>> markov_triples(const std::vector<ModuleElement>& points);

// min, fractional at H in {0.3, 0.5, 0.7, 0.9}, and a two-dimensional min.
std::vector<std::pair<std::string, CovarianceModel>> kernel_registry();

}  // namespace matsg
