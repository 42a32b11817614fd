#include "matsg/gaussmarkov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "matsg/error.hpp"

namespace matsg {

std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::min: return "min";
    case KernelKind::fractional: return "fractional";
    case KernelKind::table: return "table";
  }
  return "?";
}

CovarianceModel CovarianceModel::min(int d) {
  if (d < 1 || d > 64) throw DomainError("covariance dimension must be in [1, 64]");
  CovarianceModel r;
  r.kind_ = KernelKind::min;
  r.dim_ = d;
  r.h_ = 0.5;
  return r;
}

CovarianceModel CovarianceModel::fractional(double h, int d) {
  if (!(h > 0.0) || h > 1.0) throw DomainError("fractional kernel needs 0 < H <= 1");
  if (d < 1 || d > 64) throw DomainError("covariance dimension must be in [1, 64]");
  CovarianceModel r;
  r.kind_ = KernelKind::fractional;
  r.dim_ = d;
  r.h_ = h;
  return r;
}

CovarianceModel CovarianceModel::table(std::vector<double> times, std::vector<std::vector<Mat>> values,
                                       std::optional<double> h) {
  const size_t n = times.size();
  if (n < 2) throw DomainError("covariance table needs at least two grid times");
  for (size_t i = 0; i < n; ++i) {
    if (!(times[i] > 0.0)) throw DomainError("covariance table times must be positive");
    if (i > 0 && !(times[i] > times[i - 1])) throw DomainError("covariance table times must increase");
  }
  if (values.size() != n) throw DomainError("covariance table: expected one row of values per time");
  const long d = values.empty() || values[0].empty() ? 0 : values[0][0].rows();
  if (d < 1 || d > 64) throw DomainError("covariance table: bad matrix size");
  for (const auto& row : values) {
    if (row.size() != n) throw DomainError("covariance table: expected one value per time pair");
    for (const auto& m : row)
      if (m.rows() != d || m.cols() != d) throw DomainError("covariance table: mixed matrix sizes");
  }
  if (h && !(*h > 0.0)) throw DomainError("self-similarity exponent must be positive");
  CovarianceModel r;
  r.kind_ = KernelKind::table;
  r.dim_ = static_cast<int>(d);
  r.h_ = h;
  r.times_ = std::move(times);
  r.values_ = std::move(values);
  return r;
}

namespace {

// Cell index and weight of the upper neighbour.
std::pair<size_t, double> locate(const std::vector<double>& times, double s) {
  if (s < times.front() || s > times.back())
    throw DomainError("covariance table evaluated outside its grid at " + std::to_string(s));
  size_t hi = std::upper_bound(times.begin(), times.end(), s) - times.begin();
  if (hi == times.size()) hi = times.size() - 1;
  size_t lo = hi - 1;
  return {lo, (s - times[lo]) / (times[hi] - times[lo])};
}

}  // namespace

Mat CovarianceModel::operator()(double s, double t) const {
  if (!(s > 0.0) || !(t > 0.0)) throw DomainError("covariance evaluated at a non-positive time");
  switch (kind_) {
    case KernelKind::min:
      return std::min(s, t) * Mat::Identity(dim_, dim_);
    case KernelKind::fractional: {
      double e = 2.0 * *h_;
      double v = 0.5 * (std::pow(s, e) + std::pow(t, e) - std::pow(std::abs(s - t), e));
      return v * Mat::Identity(dim_, dim_);
    }
    case KernelKind::table: {
      auto [i, wi] = locate(times_, s);
      auto [j, wj] = locate(times_, t);
      return (1 - wi) * (1 - wj) * values_[i][j] + wi * (1 - wj) * values_[i + 1][j] +
             (1 - wi) * wj * values_[i][j + 1] + wi * wj * values_[i + 1][j + 1];
    }
  }
  throw Error("unknown kernel kind");
}

MarkovReport markov_check(const CovarianceModel& r, const std::vector<std::array<double, 3>>& triples,
                          double tol) {
  if (tol < 0) throw DomainError("tolerance must be non-negative");
  MarkovReport rep;
  rep.tol = tol;
  for (auto tr : triples) {
    std::sort(tr.begin(), tr.end());
    if (!(tr[0] > 0.0)) throw PreconditionError("markov_check needs positive times");
    MarkovEntry e;
    e.triple = tr;
    const auto [s, t, u] = tr;
    Mat rtt = r(t, t);
    Eigen::FullPivLU<Mat> lu(rtt);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
      e.error = "R(t,t) is singular at t = " + std::to_string(t);
      e.residual = std::numeric_limits<double>::infinity();
      rep.pass = false;
    } else {
      e.residual = (r(s, t) * lu.solve(r(t, u)) - r(s, u)).norm();
      rep.max_residual = std::max(rep.max_residual, e.residual);
      if (e.residual > tol) rep.pass = false;
    }
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

SimilarityReport self_similarity_check(const CovarianceModel& r, double h,
                                       const std::vector<std::pair<double, double>>& pairs,
                                       const std::vector<double>& scales, double tol) {
  if (!(h > 0.0)) throw DomainError("self-similarity exponent must be positive");
  SimilarityReport rep;
  for (auto [s, t] : pairs)
    for (double a : scales) {
      if (!(a > 0.0)) throw DomainError("self-similarity scale must be positive");
      SimilarityEntry e{s, t, a, (r(a * s, a * t) - std::pow(a, 2 * h) * r(s, t)).norm()};
      rep.max_residual = std::max(rep.max_residual, e.residual);
      if (e.residual > tol) rep.pass = false;
      rep.entries.push_back(e);
    }
  return rep;
}

SampleSet to_semigroup(const CovarianceModel& r, const BasisPtr& basis,
                       const std::vector<ModuleElement>& points, double tol) {
  const int d = r.dimension();
  Mat r11 = r(1.0, 1.0);
  double off = (r11 - Mat::Identity(d, d)).norm();
  if (off > tol) {
    std::string hint = "R(1,1) != id (distance " + std::to_string(off) + "); rescale";
    if (r11.isApprox(r11(0, 0) * Mat::Identity(d, d)) && r11(0, 0) > 0)
      hint += " by 1/" + std::to_string(r11(0, 0));
    else
      hint += " to R(1,1)^{-1/2} R(s,t) R(1,1)^{-1/2}";
    throw PreconditionError(hint);
  }
  if (r.hurst()) {
    auto inside = [&](double v) {
      return r.kind() != KernelKind::table || (v >= r.times().front() && v <= r.times().back());
    };
    for (double a : {0.5, 2.0}) {
      std::vector<std::pair<double, double>> pairs;
      for (const auto& x : points) {
        double s = std::exp(-to_double(x.value()));
        if (inside(s) && inside(a * s) && inside(a)) pairs.emplace_back(s, 1.0);
      }
      auto sim = self_similarity_check(r, *r.hurst(), pairs, {a}, tol);
      if (!sim.pass)
        throw PreconditionError("covariance is not self-similar with H = " + std::to_string(*r.hurst()) +
                                " (residual " + std::to_string(sim.max_residual) + ")");
    }
  }
  SampleSet out;
  out.basis = basis;
  out.mode = ScalarMode::real;
  out.points = points;
  for (const auto& x : points) {
    require_same_basis(basis, x.basis());
    Real v = x.value();
    if (v < 0) throw PreconditionError("sample points must be non-negative");
    out.samples.emplace_back(x.is_zero() ? r11 : r(std::exp(-to_double(v)), 1.0));
  }
  out.validate();
  return out;
}

std::vector<std::array<double, 3>> markov_triples(const std::vector<ModuleElement>& points) {
  std::vector<std::array<double, 3>> out;
  for (const auto& x : points)
    for (const auto& y : points) {
      double vx = to_double(x.value()), vy = to_double(y.value());
      out.push_back({std::exp(-vx - vy), std::exp(-vy), 1.0});
    }
  return out;
}

std::vector<std::pair<std::string, CovarianceModel>> kernel_registry() {
  return {
      {"min", CovarianceModel::min()},
      {"fractional(0.3)", CovarianceModel::fractional(0.3)},
      {"fractional(0.5)", CovarianceModel::fractional(0.5)},
      {"fractional(0.7)", CovarianceModel::fractional(0.7)},
      {"fractional(0.9)", CovarianceModel::fractional(0.9)},
      {"min x id2", CovarianceModel::min(2)},
  };
}

}  // namespace matsg
