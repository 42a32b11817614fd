#include "matsg/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "matsg/error.hpp"

namespace matsg {

namespace mp = boost::multiprecision;

Real AngleUnit::angle() const { return mp::atan2(to_real(sin), to_real(cos)); }

int block_dimension(const Block& b) {
  return std::visit(
      [](const auto& blk) -> int {
        using T = std::decay_t<decltype(blk)>;
        if constexpr (std::is_same_v<T, ZeroBlock>) return blk.dim;
        else return static_cast<int>(blk.m.rows());
      },
      b);
}

Mat skew_unit(int k) {
  Mat j = Mat::Zero(k, k);
  for (int i = 0; i + 1 < k; i += 2) {
    j(i, i + 1) = 1;
    j(i + 1, i) = -1;
  }
  return j;
}

RatMatrix skew_unit_exact(int k) {
  RatMatrix j(k, k);
  for (int i = 0; i + 1 < k; i += 2) {
    j(i, i + 1) = 1;
    j(i + 1, i) = -1;
  }
  return j;
}

namespace {

Matrix in_mode(const Matrix& m, ScalarMode mode) {
  if (mode == ScalarMode::real) return Matrix(m.to_real());
  if (!m.is_exact()) throw DomainError("exact model given a floating-point matrix");
  return m;
}

void check_rotating(const RotatingBlock& r, ScalarMode mode) {
  const long k = r.m.rows();
  if (r.m.cols() != k) throw DomainError("block generator must be square");
  if (k % 2 != 0) throw DomainError("rotating block needs even dimension, got " + std::to_string(k));
  if (mode == ScalarMode::exact) {
    RatMatrix j = skew_unit_exact(static_cast<int>(k));
    if (r.m.exact() * j != j * r.m.exact())
      throw DomainError("generator does not commute with the block rotation");
    if (r.nu.mode() != ScalarMode::exact) throw DomainError("exact model needs an exact angle solution");
    if (!r.unit) throw DomainError("exact rotating block needs a rational angle unit");
    if (r.unit->cos * r.unit->cos + r.unit->sin * r.unit->sin != 1)
      throw DomainError("angle unit must satisfy cos^2 + sin^2 = 1");
    if (mp::abs(r.unit->angle() - r.nu.unit()) > Real("1e-40"))
      throw DomainError("angle solution unit differs from the rational rotation unit");
  } else {
    Mat j = skew_unit(static_cast<int>(k));
    const Mat& m = r.m.real();
    if ((m * j - j * m).norm() > 1e-10 * std::max(1.0, m.norm()))
      throw DomainError("generator does not commute with the block rotation");
  }
}

}  // namespace

SemigroupModel::SemigroupModel(BasisPtr basis, ScalarMode mode, std::vector<Block> blocks,
                               std::optional<Matrix> conjugator)
    : basis_(std::move(basis)), mode_(mode), blocks_(std::move(blocks)) {
  if (!basis_) throw DomainError("model needs a basis");
  for (auto& b : blocks_) {
    if (auto* p = std::get_if<PlainBlock>(&b)) {
      if (p->m.rows() != p->m.cols()) throw DomainError("block generator must be square");
      p->m = in_mode(p->m, mode_);
    } else if (auto* r = std::get_if<RotatingBlock>(&b)) {
      require_same_basis(basis_, r->nu.basis());
      r->m = in_mode(r->m, mode_);
      check_rotating(*r, mode_);
    } else {
      if (std::get<ZeroBlock>(b).dim <= 0) throw DomainError("zero block needs positive dimension");
    }
    dim_ += block_dimension(b);
  }
  check_dimensions(dim_, dim_);
  if (conjugator) {
    if (conjugator->rows() != dim_ || conjugator->cols() != dim_)
      throw DomainError("conjugator dimension does not match the model");
    conj_ = in_mode(*conjugator, mode_);
    conj_inv_ = inverse(*conj_);
    if (!conj_->is_exact()) {
      double cond = conj_->real().norm() * conj_inv_->real().norm();
      if (!std::isfinite(cond) || cond > 1e12) throw DomainError("conjugator is numerically singular");
    }
  }
}

Matrix SemigroupModel::evaluate_blocks(const ModuleElement& x) const {
  require_same_basis(basis_, x.basis());
  std::vector<Matrix> parts;
  const bool origin = x.is_zero();
  for (const auto& b : blocks_) {
    if (const auto* z = std::get_if<ZeroBlock>(&b)) {
      parts.push_back(origin ? identity_matrix(mode_, z->dim) : zero_matrix(mode_, z->dim));
      continue;
    }
    const Matrix& m = std::holds_alternative<PlainBlock>(b) ? std::get<PlainBlock>(b).m
                                                            : std::get<RotatingBlock>(b).m;
    const int k = static_cast<int>(m.rows());
    Matrix e;
    if (mode_ == ScalarMode::exact) {
      if (m.exact().is_zero() || origin) {
        e = RatMatrix::identity(k);
      } else {
        auto v = x.exact_value();
        if (!v) throw DomainError("exact evaluation of exp(Mx) needs a rational point value");
        e = mat_exp(m.exact() * *v);
      }
    } else {
      e = Mat(mat_exp(m.real() * to_double(x.value())));
    }
    if (const auto* r = std::get_if<RotatingBlock>(&b)) {
      if (mode_ == ScalarMode::exact) {
        Rational n = r->nu.evaluate_exact(x);
        if (n.get_den() != 1)
          throw DomainError("exact rotation angle is not an integral multiple of the unit at " +
                            x.to_string());
        e = Matrix(rotation_block_exact(k, r->unit->cos, r->unit->sin, n.get_num())) * e;
      } else {
        e = Matrix(Mat(rotation_block(k, r->nu.evaluate(x)))) * e;
      }
    }
    parts.push_back(std::move(e));
  }
  return block_diagonal(parts);
}

Matrix SemigroupModel::evaluate(const ModuleElement& x) const {
  Matrix g = evaluate_blocks(x);
  if (!conj_) return g;
  return (*conj_) * g * (*conj_inv_);
}

SemigroupModel build_elementary(BasisPtr basis, const Matrix& m,
                                const std::optional<CauchySolution>& nu,
                                const std::optional<Matrix>& conjugator,
                                const std::optional<AngleUnit>& unit) {
  ScalarMode mode = m.mode();
  if (conjugator && !conjugator->is_exact()) mode = ScalarMode::real;
  if (nu && nu->mode() != ScalarMode::exact) mode = ScalarMode::real;
  if (!nu) return SemigroupModel(basis, mode, {PlainBlock{m}}, conjugator);
  if (m.rows() % 2 != 0) throw DomainError("rotating block needs even dimension");
  if (mode == ScalarMode::real && is_linear(*nu)) {
    // Q(cx) = exp(c x L): a linear angle is part of the generator.
    const int k = static_cast<int>(m.rows());
    Mat j = skew_unit(k);
    Mat mr = m.to_real();
    if ((mr * j - j * mr).norm() > 1e-10 * std::max(1.0, mr.norm()))
      throw DomainError("generator does not commute with the block rotation");
    Real slope = nu->value_at(0) / nu->basis()->value(0);
    Mat folded = mr + to_double(slope) * j;
    return SemigroupModel(basis, mode, {PlainBlock{Matrix(folded)}}, conjugator);
  }
  return SemigroupModel(basis, mode, {RotatingBlock{m, *nu, unit}}, conjugator);
}

SemigroupModel zero_model(BasisPtr basis, ScalarMode mode, int k) {
  return SemigroupModel(std::move(basis), mode, {ZeroBlock{k}});
}

SemigroupModel direct_sum(const std::vector<SemigroupModel>& models) {
  if (models.empty()) throw DomainError("direct sum of no models");
  BasisPtr basis = models.front().basis();
  ScalarMode mode = ScalarMode::exact;
  bool any_conj = false;
  for (const auto& m : models) {
    require_same_basis(basis, m.basis());
    if (m.mode() == ScalarMode::real) mode = ScalarMode::real;
    any_conj = any_conj || m.conjugator().has_value();
  }
  std::vector<Block> blocks;
  std::vector<Matrix> conj;
  for (const auto& m : models) {
    blocks.insert(blocks.end(), m.blocks().begin(), m.blocks().end());
    conj.push_back(m.conjugator() ? *m.conjugator() : identity_matrix(m.mode(), m.dimension()));
  }
  std::optional<Matrix> a;
  if (any_conj) a = block_diagonal(conj);
  return SemigroupModel(basis, mode, std::move(blocks), a);
}

SemigroupModel with_zero_block(const SemigroupModel& model, int k) {
  return direct_sum({model, zero_model(model.basis(), model.mode(), k)});
}

SemigroupModel conjugate(const SemigroupModel& model, const Matrix& a) {
  Matrix c = model.conjugator() ? a * (*model.conjugator()) : a;
  return SemigroupModel(model.basis(), model.mode(), model.blocks(), c);
}

// ---------------------------------------------------------------------------
// Samples

std::optional<size_t> SampleSet::find(const ModuleElement& x) const {
  for (size_t i = 0; i < points.size(); ++i)
    if (points[i] == x) return i;
  return std::nullopt;
}

size_t SampleSet::origin() const {
  for (size_t i = 0; i < points.size(); ++i)
    if (points[i].is_zero()) return i;
  throw DomainError("sample set does not contain the point 0");
}

void SampleSet::validate() const {
  if (!basis) throw DomainError("sample set without basis");
  if (points.size() != samples.size()) throw DomainError("points and samples differ in number");
  if (points.empty()) throw DomainError("empty sample set");
  origin();
  const long d = samples.front().rows();
  for (size_t i = 0; i < points.size(); ++i) {
    require_same_basis(basis, points[i].basis());
    if (points[i].value() < 0) throw DomainError("sample point with negative value");
    if (samples[i].rows() != d || samples[i].cols() != d)
      throw DomainError("samples differ in dimension");
    if (samples[i].mode() != mode) throw DomainError("samples differ in scalar mode");
  }
}

SampleSet SampleSet::restricted(const Mat& b) const {
  SampleSet out;
  out.basis = basis;
  out.mode = ScalarMode::real;
  out.points = points;
  out.bound = bound;
  for (const auto& g : samples) out.samples.emplace_back(Mat(b.transpose() * g.to_real() * b));
  return out;
}

std::vector<ModuleElement> default_points(const BasisPtr& basis) {
  std::vector<ModuleElement> pts{ModuleElement::zero(basis)};
  const size_t n = basis->size();
  for (size_t i = 0; i < n; ++i)
    for (int k = 1; k <= 8; ++k) pts.push_back(ModuleElement::generator(basis, i) * Rational(k, 8));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i; j < n; ++j) {
      ModuleElement s = ModuleElement::generator(basis, i) + ModuleElement::generator(basis, j);
      if (std::find(pts.begin(), pts.end(), s) == pts.end()) pts.push_back(s);
    }
  return pts;
}

SampleSet sample(const SemigroupModel& model, const std::vector<ModuleElement>& points) {
  SampleSet s;
  s.basis = model.basis();
  s.mode = model.mode();
  s.points.push_back(ModuleElement::zero(model.basis()));
  for (const auto& p : points) {
    require_same_basis(model.basis(), p.basis());
    if (p.value() < 0) throw DomainError("sample point " + p.to_string() + " has negative value");
    if (std::find(s.points.begin(), s.points.end(), p) == s.points.end()) s.points.push_back(p);
  }
  for (const auto& p : s.points) s.samples.push_back(model.evaluate(p));
  return s;
}

SampleSet sample(const SemigroupModel& model) { return sample(model, default_points(model.basis())); }

namespace {

double scaled_residual(const Matrix& lhs, const Matrix& rhs, double scale) {
  return difference_norm(lhs, rhs) / std::max(1.0, scale);
}

}  // namespace

SemigroupReport verify_semigroup(const SampleSet& s, double tol) {
  s.validate();
  SemigroupReport rep;
  rep.tol = tol;
  const size_t n = s.size();
  const int d = s.dimension();
  std::map<ModuleElement, size_t> index;
  for (size_t i = 0; i < n; ++i) index.emplace(s.points[i], i);
  std::vector<double> norms(n);
  for (size_t i = 0; i < n; ++i) norms[i] = frobenius_norm(s.samples[i]);
  auto flag = [&](const std::string& kind, std::vector<size_t> pts, double r) {
    rep.violations.push_back({kind, std::move(pts), r});
    rep.pass = false;
  };

  size_t o = s.origin();
  rep.max_identity = difference_norm(s.samples[o], identity_matrix(s.mode, d));
  if (rep.max_identity > tol) flag("identity", {o}, rep.max_identity);

  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      auto it = index.find(s.points[i] + s.points[j]);
      if (it == index.end()) continue;
      ++rep.pairs_checked;
      double r = scaled_residual(s.samples[i] * s.samples[j], s.samples[it->second], norms[i] * norms[j]);
      rep.max_law = std::max(rep.max_law, r);
      if (r > tol) flag("law", {i, j, it->second}, r);
    }

  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      double r = scaled_residual(s.samples[i] * s.samples[j], s.samples[j] * s.samples[i],
                                 norms[i] * norms[j]);
      rep.max_commutation = std::max(rep.max_commutation, r);
      if (r > tol) flag("commutation", {i, j}, r);
    }

  // ker g(x) is the same subspace for every x > 0.
  std::optional<size_t> ref;
  Mat ref_kernel;
  RatMatrix ref_exact;
  for (size_t i = 0; i < n; ++i) {
    if (s.points[i].value() <= 0) continue;
    if (s.mode == ScalarMode::exact) {
      RatMatrix k = nullspace(s.samples[i].exact());
      if (!ref) {
        ref = i;
        ref_exact = k;
        continue;
      }
      bool same = k.cols() == ref_exact.cols();
      if (same && k.cols() > 0) {
        RatMatrix both(d, k.cols() * 2);
        for (int r = 0; r < d; ++r)
          for (int c = 0; c < k.cols(); ++c) {
            both(r, c) = k(r, c);
            both(r, c + k.cols()) = ref_exact(r, c);
          }
        same = rank(both) == k.cols();
      }
      if (!same) {
        rep.max_kernel = std::max(rep.max_kernel, M_PI / 2);
        flag("kernel", {*ref, i}, M_PI / 2);
      }
      continue;
    }
    Mat k = kernel_basis(s.samples[i].real());
    if (!ref) {
      ref = i;
      ref_kernel = k;
      continue;
    }
    double angle = subspace_distance(k, ref_kernel);
    rep.max_kernel = std::max(rep.max_kernel, angle);
    if (angle > std::max(tol, 1e-8)) flag("kernel", {*ref, i}, angle);
  }
  return rep;
}

BoundReport verify_bound(const SampleSet& s, const BoundFunction& f) {
  s.validate();
  BoundReport rep;
  rep.one_at_zero = f.one_at_zero();
  rep.right_continuous = f.right_continuous_at_zero();
  double top = 0.0;
  for (size_t i = 0; i < s.size(); ++i) {
    BoundPoint bp;
    bp.point = i;
    bp.value = to_double(s.points[i].value());
    top = std::max(top, bp.value);
    bp.norm = operator_norm(s.samples[i].to_real());
    bp.bound = f(bp.value);
    bp.margin = bp.bound - bp.norm;
    if (!(bp.norm <= bp.bound + 1e-12)) rep.pass = false;
    rep.points.push_back(bp);
  }
  rep.locally_bounded = f.locally_bounded(top);
  if (!rep.one_at_zero || !rep.locally_bounded || !rep.right_continuous) rep.pass = false;
  return rep;
}

}  // namespace matsg
