#pragma once

// Solutions of Cauchy's functional equation f(x+y) = f(x) + f(y) restricted
// to a finitely generated Q-submodule of R.
//
// The module is spanned by finitely many positive reals that are *declared*
// Q-linearly independent (e.g. 1, sqrt(2), sqrt(3), pi). Independence is a
// modelling assumption and is never proven. An element is stored by its exact
// rational coordinates, so additivity of every solution holds exactly in
// coordinates and to working precision (50 digits) in value.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "matsg/scalar.hpp"

namespace matsg {

struct BasisEntry {
  std::string label;
  Real value;
  int precision = kRealDigits;
  // Set when the value is an exact rational (needed by exact-mode models).
  std::optional<Rational> exact;
};

class ModuleBasis;
using BasisPtr = std::shared_ptr<const ModuleBasis>;

class ModuleBasis {
 public:
  // Validates: at least one entry, values > 0, unique labels, precision >= 30.
  static BasisPtr make(std::vector<BasisEntry> entries, bool independence_claimed = true);
  // Entries parsed from expressions such as "1", "sqrt(2)", "pi", "3/2";
  // labels are the expressions themselves.
  static BasisPtr from_expressions(const std::vector<std::string>& exprs);

  size_t size() const { return entries_.size(); }
  const BasisEntry& entry(size_t i) const { return entries_[i]; }
  const std::vector<BasisEntry>& entries() const { return entries_; }
  const Real& value(size_t i) const { return entries_[i].value; }
  bool independence_claimed() const { return independent_; }
  // True iff every entry carries an exact rational value.
  bool rational() const;

  bool same_as(const ModuleBasis& other) const;

 private:
  ModuleBasis(std::vector<BasisEntry> entries, bool independent)
      : entries_(std::move(entries)), independent_(independent) {}
  std::vector<BasisEntry> entries_;
  bool independent_ = true;
};

void require_same_basis(const BasisPtr& a, const BasisPtr& b);

class ModuleElement {
 public:
  ModuleElement() = default;
  ModuleElement(BasisPtr basis, std::vector<Rational> coords);

  static ModuleElement zero(BasisPtr basis);
  // The i-th basis real itself.
  static ModuleElement generator(BasisPtr basis, size_t i);

  const BasisPtr& basis() const { return basis_; }
  const std::vector<Rational>& coords() const { return coords_; }
  const Rational& coord(size_t i) const { return coords_[i]; }

  Real value() const;
  // Exact value when the basis is rational.
  std::optional<Rational> exact_value() const;
  bool is_zero() const;

  ModuleElement operator+(const ModuleElement& o) const;
  ModuleElement operator-(const ModuleElement& o) const;
  ModuleElement operator*(const Rational& s) const;
  bool operator==(const ModuleElement& o) const;
  bool operator!=(const ModuleElement& o) const { return !(*this == o); }
  // Lexicographic order on coordinates (for use as a map key).
  bool operator<(const ModuleElement& o) const;

  std::string to_string() const;

 private:
  BasisPtr basis_;
  std::vector<Rational> coords_;
};

// An additive function on the module, fixed by its values on the basis.
//
// real mode: values f(r_i) are 50-digit reals.
// exact mode: values are rationals times a fixed real `unit` (1 by default);
//   evaluate_exact returns the rational multiple of the unit. Exact-mode
//   rotation angles use a unit whose cosine and sine are rational.
class CauchySolution {
 public:
  CauchySolution() = default;

  static CauchySolution real(BasisPtr basis, std::vector<Real> values);
  static CauchySolution exact(BasisPtr basis, std::vector<Rational> values, Real unit = Real(1),
                              std::string unit_label = "1");
  static CauchySolution zero(BasisPtr basis);
  // f(x) = slope * x.
  static CauchySolution linear(BasisPtr basis, const Real& slope);

  ScalarMode mode() const { return mode_; }
  const BasisPtr& basis() const { return basis_; }
  size_t size() const { return values_.size(); }
  // f(r_i) as a real.
  const Real& value_at(size_t i) const { return values_[i]; }
  const std::vector<Real>& values() const { return values_; }
  const std::vector<Rational>& exact_values() const { return exact_values_; }
  const Real& unit() const { return unit_; }
  const std::string& unit_label() const { return unit_label_; }

  Real evaluate(const ModuleElement& x) const;
  Rational evaluate_exact(const ModuleElement& x) const;

  CauchySolution operator+(const CauchySolution& o) const;
  CauchySolution operator-(const CauchySolution& o) const;
  CauchySolution operator-() const;
  // Real-mode copy with the same values.
  CauchySolution as_real() const;
  // Same solution, re-expressed on another basis of the same Q-module:
  // new_basis_coords[k] holds the coordinates of the k-th new generator in
  // the current basis.
  CauchySolution rebased(BasisPtr new_basis,
                         const std::vector<std::vector<Rational>>& new_basis_coords) const;

 private:
  ScalarMode mode_ = ScalarMode::real;
  BasisPtr basis_;
  std::vector<Real> values_;
  std::vector<Rational> exact_values_;
  Real unit_ = Real(1);
  std::string unit_label_ = "1";
};

inline constexpr double kLinearTolReal = 1e-9;

// |f(r_i) r_j - f(r_j) r_i| <= tol * max(r_i, r_j) for all pairs. Without a
// tolerance: exact comparison (tol 0) in exact mode, 1e-9 in real mode.
// tol 0 on a non-rational basis compares at working precision.
bool is_linear(const CauchySolution& f, std::optional<double> tol = std::nullopt);

// Def.: f ~ g iff f - g is linear.
bool equivalent(const CauchySolution& f, const CauchySolution& g,
                std::optional<double> tol = std::nullopt);

// Lift of a solution with values in R / [-a, a): representatives are the
// given values reduced into [-a, a), extended Q-linearly. Lifts are not
// unique; two lifts differ by a solution with values in 2aZ on the basis.
CauchySolution lift(const std::vector<Real>& values_mod, const Real& a, BasisPtr basis);
// Basis values of f reduced into [-a, a).
std::vector<Real> reduce(const CauchySolution& f, const Real& a);

// Linear function agreeing with f modulo `period` on every basis element:
// f(r_i) + period * winding_i = slope * r_i (within tol).
struct WrappedLinearFit {
  Real slope;
  std::vector<long> windings;
  double residual = 0.0;
};
std::optional<WrappedLinearFit> linear_modulo(const CauchySolution& f, const Real& period,
                                              double tol, long max_winding = 64);

// Sequence x_k -> 0 with f'(x_k) -> pi and g'(x_k) -> theta, |theta| < pi,
// for non-equivalent f, g. (f', g') is (f, g) or, when `swapped`, (g, f).
struct PiSequence {
  std::vector<ModuleElement> terms;
  bool swapped = false;
  Real theta;              // limit of g'(x_k)
  size_t pair_x = 0;       // basis index of x
  size_t pair_y = 0;       // basis index of y
  Real q_limit, r_limit;   // x_k = q_k x - r_k y, (q_k, r_k) -> (q_limit, r_limit)
};
PiSequence pi_sequence(const CauchySolution& f, const CauchySolution& g, int n_terms);

// Module element whose graph point (x, f(x)) lies within eps of `target` in
// both coordinates, using denominators up to max_denominator.
std::optional<ModuleElement> dense_graph_witness(const CauchySolution& f,
                                                 const std::pair<Real, Real>& target,
                                                 const Real& eps, long max_denominator);

}  // namespace matsg
