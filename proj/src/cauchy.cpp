#include "matsg/cauchy.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "matsg/error.hpp"

namespace matsg {

namespace mp = boost::multiprecision;

// ---------------------------------------------------------------------------
// ModuleBasis

BasisPtr ModuleBasis::make(std::vector<BasisEntry> entries, bool independence_claimed) {
  if (entries.empty()) throw DomainError("module basis needs at least one entry");
  std::set<std::string> labels;
  for (const auto& e : entries) {
    if (!(e.value > 0)) throw DomainError("basis value for '" + e.label + "' must be positive");
    if (e.precision < 30)
      throw DomainError("basis entry '" + e.label + "' has precision below 30 digits");
    if (!labels.insert(e.label).second) throw DomainError("duplicate basis label '" + e.label + "'");
  }
  return BasisPtr(new ModuleBasis(std::move(entries), independence_claimed));
}

BasisPtr ModuleBasis::from_expressions(const std::vector<std::string>& exprs) {
  std::vector<BasisEntry> entries;
  for (const auto& expr : exprs) {
    BasisEntry e;
    e.label = expr;
    e.value = parse_real(expr);
    try {
      e.exact = parse_rational(expr);
    } catch (const ParseError&) {
    }
    entries.push_back(std::move(e));
  }
  return make(std::move(entries));
}

bool ModuleBasis::rational() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const BasisEntry& e) { return e.exact.has_value(); });
}

bool ModuleBasis::same_as(const ModuleBasis& other) const {
  if (this == &other) return true;
  if (entries_.size() != other.entries_.size()) return false;
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].label != other.entries_[i].label) return false;
    if (entries_[i].value != other.entries_[i].value) return false;
  }
  return true;
}

void require_same_basis(const BasisPtr& a, const BasisPtr& b) {
  if (!a || !b) throw DomainError("missing module basis");
  if (a != b && !a->same_as(*b)) throw DomainError("module basis mismatch");
}

// ---------------------------------------------------------------------------
// ModuleElement

ModuleElement::ModuleElement(BasisPtr basis, std::vector<Rational> coords)
    : basis_(std::move(basis)), coords_(std::move(coords)) {
  if (!basis_) throw DomainError("module element without basis");
  if (coords_.size() != basis_->size())
    throw DomainError("coordinate count does not match basis size");
  for (auto& c : coords_) c.canonicalize();
}

ModuleElement ModuleElement::zero(BasisPtr basis) {
  size_t n = basis->size();
  return ModuleElement(std::move(basis), std::vector<Rational>(n, Rational(0)));
}

ModuleElement ModuleElement::generator(BasisPtr basis, size_t i) {
  ModuleElement e = zero(std::move(basis));
  if (i >= e.coords_.size()) throw DomainError("generator index out of range");
  e.coords_[i] = 1;
  return e;
}

Real ModuleElement::value() const {
  Real v = 0;
  for (size_t i = 0; i < coords_.size(); ++i)
    if (coords_[i] != 0) v += to_real(coords_[i]) * basis_->value(i);
  return v;
}

std::optional<Rational> ModuleElement::exact_value() const {
  if (!basis_->rational()) return std::nullopt;
  Rational v = 0;
  for (size_t i = 0; i < coords_.size(); ++i) v += coords_[i] * *basis_->entry(i).exact;
  return v;
}

bool ModuleElement::is_zero() const {
  return std::all_of(coords_.begin(), coords_.end(), [](const Rational& c) { return c == 0; });
}

ModuleElement ModuleElement::operator+(const ModuleElement& o) const {
  require_same_basis(basis_, o.basis_);
  ModuleElement r = *this;
  for (size_t i = 0; i < coords_.size(); ++i) r.coords_[i] += o.coords_[i];
  return r;
}

ModuleElement ModuleElement::operator-(const ModuleElement& o) const {
  require_same_basis(basis_, o.basis_);
  ModuleElement r = *this;
  for (size_t i = 0; i < coords_.size(); ++i) r.coords_[i] -= o.coords_[i];
  return r;
}

ModuleElement ModuleElement::operator*(const Rational& s) const {
  ModuleElement r = *this;
  Rational t = s;
  t.canonicalize();
  for (auto& c : r.coords_) c *= t;
  return r;
}

bool ModuleElement::operator==(const ModuleElement& o) const {
  return coords_ == o.coords_ && (basis_ == o.basis_ || (basis_ && o.basis_ && basis_->same_as(*o.basis_)));
}

bool ModuleElement::operator<(const ModuleElement& o) const {
  return std::lexicographical_compare(coords_.begin(), coords_.end(), o.coords_.begin(),
                                      o.coords_.end());
}

std::string ModuleElement::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (size_t i = 0; i < coords_.size(); ++i) {
    if (coords_[i] == 0) continue;
    if (!first) os << " + ";
    os << matsg::to_string(coords_[i]) << "*" << basis_->entry(i).label;
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

// ---------------------------------------------------------------------------
// CauchySolution

CauchySolution CauchySolution::real(BasisPtr basis, std::vector<Real> values) {
  if (!basis) throw DomainError("solution without basis");
  if (values.size() != basis->size()) throw DomainError("one value per basis entry required");
  CauchySolution f;
  f.mode_ = ScalarMode::real;
  f.basis_ = std::move(basis);
  f.values_ = std::move(values);
  return f;
}

CauchySolution CauchySolution::exact(BasisPtr basis, std::vector<Rational> values, Real unit,
                                     std::string unit_label) {
  if (!basis) throw DomainError("solution without basis");
  if (values.size() != basis->size()) throw DomainError("one value per basis entry required");
  CauchySolution f;
  f.mode_ = ScalarMode::exact;
  f.basis_ = std::move(basis);
  f.exact_values_ = std::move(values);
  f.unit_ = std::move(unit);
  f.unit_label_ = std::move(unit_label);
  for (const auto& q : f.exact_values_) f.values_.push_back(to_real(q) * f.unit_);
  return f;
}

CauchySolution CauchySolution::zero(BasisPtr basis) {
  size_t n = basis->size();
  return exact(std::move(basis), std::vector<Rational>(n, Rational(0)));
}

CauchySolution CauchySolution::linear(BasisPtr basis, const Real& slope) {
  std::vector<Real> v;
  for (size_t i = 0; i < basis->size(); ++i) v.push_back(slope * basis->value(i));
  return real(std::move(basis), std::move(v));
}

Real CauchySolution::evaluate(const ModuleElement& x) const {
  require_same_basis(basis_, x.basis());
  if (mode_ == ScalarMode::exact) return to_real(evaluate_exact(x)) * unit_;
  Real v = 0;
  for (size_t i = 0; i < values_.size(); ++i)
    if (x.coord(i) != 0) v += to_real(x.coord(i)) * values_[i];
  return v;
}

Rational CauchySolution::evaluate_exact(const ModuleElement& x) const {
  require_same_basis(basis_, x.basis());
  if (mode_ != ScalarMode::exact) throw DomainError("exact evaluation of a real-mode solution");
  Rational v = 0;
  for (size_t i = 0; i < exact_values_.size(); ++i) v += x.coord(i) * exact_values_[i];
  return v;
}

CauchySolution CauchySolution::as_real() const { return real(basis_, values_); }

CauchySolution CauchySolution::operator+(const CauchySolution& o) const {
  require_same_basis(basis_, o.basis_);
  if (mode_ == ScalarMode::exact && o.mode_ == ScalarMode::exact && unit_ == o.unit_) {
    std::vector<Rational> v(exact_values_.size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = exact_values_[i] + o.exact_values_[i];
    return exact(basis_, std::move(v), unit_, unit_label_);
  }
  std::vector<Real> v(values_.size());
  for (size_t i = 0; i < v.size(); ++i) v[i] = values_[i] + o.values_[i];
  return real(basis_, std::move(v));
}

CauchySolution CauchySolution::operator-() const {
  if (mode_ == ScalarMode::exact) {
    std::vector<Rational> v = exact_values_;
    for (auto& q : v) q = -q;
    return exact(basis_, std::move(v), unit_, unit_label_);
  }
  std::vector<Real> v = values_;
  for (auto& r : v) r = -r;
  return real(basis_, std::move(v));
}

CauchySolution CauchySolution::operator-(const CauchySolution& o) const { return *this + (-o); }

CauchySolution CauchySolution::rebased(
    BasisPtr new_basis, const std::vector<std::vector<Rational>>& new_basis_coords) const {
  if (new_basis_coords.size() != new_basis->size())
    throw DomainError("rebasing needs coordinates for every new generator");
  if (mode_ == ScalarMode::exact) {
    std::vector<Rational> v;
    for (const auto& c : new_basis_coords) v.push_back(evaluate_exact(ModuleElement(basis_, c)));
    return exact(std::move(new_basis), std::move(v), unit_, unit_label_);
  }
  std::vector<Real> v;
  for (const auto& c : new_basis_coords) v.push_back(evaluate(ModuleElement(basis_, c)));
  return real(std::move(new_basis), std::move(v));
}

// ---------------------------------------------------------------------------
// Linearity and equivalence

bool is_linear(const CauchySolution& f, std::optional<double> tol) {
  const auto& b = *f.basis();
  double t = tol.value_or(f.mode() == ScalarMode::exact ? 0.0 : kLinearTolReal);
  if (t < 0) throw DomainError("negative tolerance");
  if (t == 0.0 && f.mode() == ScalarMode::exact && b.rational()) {
    for (size_t i = 0; i < b.size(); ++i)
      for (size_t j = i + 1; j < b.size(); ++j)
        if (f.exact_values()[i] * *b.entry(j).exact != f.exact_values()[j] * *b.entry(i).exact)
          return false;
    return true;
  }
  // Working-precision comparison when an exact test is impossible.
  Real rt = t == 0.0 ? Real("1e-40") : Real(t);
  for (size_t i = 0; i < b.size(); ++i)
    for (size_t j = i + 1; j < b.size(); ++j) {
      Real lhs = mp::abs(f.value_at(i) * b.value(j) - f.value_at(j) * b.value(i));
      if (lhs > rt * std::max(Real(mp::abs(b.value(i))), Real(mp::abs(b.value(j))))) return false;
    }
  return true;
}

bool equivalent(const CauchySolution& f, const CauchySolution& g, std::optional<double> tol) {
  require_same_basis(f.basis(), g.basis());
  return is_linear(f - g, tol);
}

CauchySolution lift(const std::vector<Real>& values_mod, const Real& a, BasisPtr basis) {
  if (!(a > 0)) throw DomainError("lift half-width must be positive");
  if (values_mod.size() != basis->size()) throw DomainError("one value per basis entry required");
  std::vector<Real> v;
  v.reserve(values_mod.size());
  for (const auto& r : values_mod) v.push_back(reduce_symmetric(r, a));
  return CauchySolution::real(std::move(basis), std::move(v));
}

std::vector<Real> reduce(const CauchySolution& f, const Real& a) {
  std::vector<Real> v;
  for (const auto& r : f.values()) v.push_back(reduce_symmetric(r, a));
  return v;
}

std::optional<WrappedLinearFit> linear_modulo(const CauchySolution& f, const Real& period,
                                              double tol, long max_winding) {
  const auto& b = *f.basis();
  size_t anchor = 0;
  for (size_t i = 1; i < b.size(); ++i)
    if (b.value(i) > b.value(anchor)) anchor = i;
  std::optional<WrappedLinearFit> best;
  for (long step = 0; step <= 2 * max_winding; ++step) {
    // 0, 1, -1, 2, -2, ...
    long n0 = (step % 2 == 1) ? (step + 1) / 2 : -(step / 2);
    Real slope = (f.value_at(anchor) + period * n0) / b.value(anchor);
    WrappedLinearFit fit;
    fit.slope = slope;
    fit.windings.assign(b.size(), 0);
    fit.windings[anchor] = n0;
    double worst = 0.0;
    for (size_t i = 0; i < b.size(); ++i) {
      if (i == anchor) continue;
      Real raw = (slope * b.value(i) - f.value_at(i)) / period;
      long n = mp::round(raw).convert_to<long>();
      fit.windings[i] = n;
      double res = to_double(mp::abs(f.value_at(i) + period * n - slope * b.value(i)));
      worst = std::max(worst, res);
    }
    fit.residual = worst;
    if (worst <= tol) return fit;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Sequence constructions

namespace {

struct PairChoice {
  size_t x = 0, y = 0;
  bool swapped = false;
  Real ratio;  // |dg / df| after orientation, < 1 when admissible
  Real df, dg;
};

// Solve q*x - r*y = t1, q*fx - r*fy = t2.
std::pair<Real, Real> solve_pair(const Real& x, const Real& y, const Real& fx, const Real& fy,
                                 const Real& t1, const Real& t2) {
  Real det = -x * fy + y * fx;
  if (det == 0) throw DegeneracyError("singular pair system");
  Real q = (-t1 * fy + y * t2) / det;
  Real r = (x * t2 - fx * t1) / det;
  return {q, r};
}

}  // namespace

PiSequence pi_sequence(const CauchySolution& f, const CauchySolution& g, int n_terms) {
  require_same_basis(f.basis(), g.basis());
  const auto& b = *f.basis();
  if (b.size() < 2) throw PreconditionError("pi_sequence needs a basis with at least two entries");
  if (n_terms < 1) throw PreconditionError("pi_sequence needs at least one term");
  if (equivalent(f, g)) throw PreconditionError("pi_sequence requires non-equivalent solutions");

  std::optional<PairChoice> best;
  for (size_t i = 0; i < b.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) {
      if (i == j) continue;
      Real df = f.value_at(i) / b.value(i) - f.value_at(j) / b.value(j);
      Real dg = g.value_at(i) / b.value(i) - g.value_at(j) / b.value(j);
      if (mp::abs(df - dg) <= Real(kLinearTolReal)) continue;
      PairChoice c;
      c.x = i;
      c.y = j;
      c.swapped = mp::abs(dg) > mp::abs(df);
      c.df = c.swapped ? dg : df;
      c.dg = c.swapped ? df : dg;
      c.ratio = mp::abs(c.dg / c.df);
      if (!best || c.ratio < best->ratio) best = c;
    }
  if (!best || best->ratio >= Real(1) - Real("1e-12"))
    throw DegeneracyError("no basis pair separates the two solutions strictly");

  const CauchySolution& fp = best->swapped ? g : f;
  const CauchySolution& gp = best->swapped ? f : g;
  const Real x = b.value(best->x), y = b.value(best->y);
  const Real fx = fp.value_at(best->x), fy = fp.value_at(best->y);
  const Real pi = real_pi();

  PiSequence out;
  out.swapped = best->swapped;
  out.pair_x = best->x;
  out.pair_y = best->y;
  std::tie(out.q_limit, out.r_limit) = solve_pair(x, y, fx, fy, Real(0), pi);
  out.theta = out.q_limit * gp.value_at(best->x) - out.r_limit * gp.value_at(best->y);

  Real scale = std::max({Real(mp::abs(x)), Real(mp::abs(y)), Real(mp::abs(fx)), Real(mp::abs(fy))});
  for (int k = 1; k <= n_terms; ++k) {
    Real half = Real(1) / (2 * k);
    auto [q, r] = solve_pair(x, y, fx, fy, half, pi);
    // |dq|,|dr| <= delta keeps both residuals below 1/(2k).
    Real delta = half / (4 * scale);
    auto qk = rational_approximation(q, delta);
    auto rk = rational_approximation(r, delta);
    if (!qk || !rk) throw NumericError("rational approximation did not converge");
    std::vector<Rational> coords(b.size(), Rational(0));
    coords[best->x] += *qk;
    coords[best->y] -= *rk;
    out.terms.emplace_back(f.basis(), std::move(coords));
  }
  return out;
}

std::optional<ModuleElement> dense_graph_witness(const CauchySolution& f,
                                                 const std::pair<Real, Real>& target,
                                                 const Real& eps, long max_denominator) {
  if (!(eps > 0)) throw PreconditionError("eps must be positive");
  if (is_linear(f)) throw PreconditionError("graph of a linear solution is a line, not dense");
  const auto& b = *f.basis();

  struct Cand {
    size_t i, j;
    Real det;
  };
  std::vector<Cand> pairs;
  for (size_t i = 0; i < b.size(); ++i)
    for (size_t j = i + 1; j < b.size(); ++j) {
      Real det = mp::abs(-b.value(i) * f.value_at(j) + b.value(j) * f.value_at(i));
      if (det > Real(kLinearTolReal)) pairs.push_back({i, j, det});
    }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Cand& a, const Cand& c) { return a.det > c.det; });

  for (const auto& p : pairs) {
    const Real x = b.value(p.i), y = b.value(p.j);
    const Real fx = f.value_at(p.i), fy = f.value_at(p.j);
    auto [q, r] = solve_pair(x, y, fx, fy, target.first, target.second);
    auto cq = convergents(q, 96);
    auto cr = convergents(r, 96);
    size_t n = std::max(cq.size(), cr.size());
    for (size_t m = 0; m < n; ++m) {
      const Rational& qm = cq[std::min(m, cq.size() - 1)];
      const Rational& rm = cr[std::min(m, cr.size() - 1)];
      if (abs(qm.get_den()) > max_denominator || abs(rm.get_den()) > max_denominator) break;
      std::vector<Rational> coords(b.size(), Rational(0));
      coords[p.i] += qm;
      coords[p.j] -= rm;
      ModuleElement e(f.basis(), std::move(coords));
      if (mp::abs(e.value() - target.first) < eps && mp::abs(f.evaluate(e) - target.second) < eps)
        return e;
    }
  }
  return std::nullopt;
}

}  // namespace matsg
