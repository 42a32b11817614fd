#include "matsg/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "matsg/error.hpp"

namespace matsg {

namespace mp = boost::multiprecision;

// ---------------------------------------------------------------------------
// Tagged matrix

Matrix::Matrix(Mat m) : data_(std::move(m)) {
  check_dimensions(std::get<Mat>(data_).rows(), std::get<Mat>(data_).cols());
}

Matrix::Matrix(RatMatrix m) : data_(std::move(m)) {}

long Matrix::rows() const {
  return is_exact() ? exact().rows() : real().rows();
}

long Matrix::cols() const {
  return is_exact() ? exact().cols() : real().cols();
}

Mat Matrix::to_real() const { return is_exact() ? exact().to_double() : real(); }

bool Matrix::operator==(const Matrix& o) const {
  if (mode() != o.mode()) return false;
  if (is_exact()) return exact() == o.exact();
  return real().rows() == o.real().rows() && real().cols() == o.real().cols() &&
         real() == o.real();
}

double difference_norm(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DomainError("dimension mismatch");
  if (a.is_exact() && b.is_exact()) {
    RatMatrix d = a.exact() - b.exact();
    if (d.is_zero()) return 0.0;
    return d.to_double().norm();
  }
  return (a.to_real() - b.to_real()).norm();
}

Matrix identity_matrix(ScalarMode mode, int n) {
  if (mode == ScalarMode::exact) return RatMatrix::identity(n);
  return Mat(Mat::Identity(n, n));
}

Matrix zero_matrix(ScalarMode mode, int n) {
  if (mode == ScalarMode::exact) return RatMatrix(n, n);
  return Mat(Mat::Zero(n, n));
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DomainError("matrix product: dimension mismatch");
  if (a.is_exact() && b.is_exact()) return a.exact() * b.exact();
  return Mat(a.to_real() * b.to_real());
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DomainError("matrix sum: dimension mismatch");
  if (a.is_exact() && b.is_exact()) return a.exact() + b.exact();
  return Mat(a.to_real() + b.to_real());
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DomainError("matrix difference: dimension mismatch");
  if (a.is_exact() && b.is_exact()) return a.exact() - b.exact();
  return Mat(a.to_real() - b.to_real());
}

Matrix inverse(const Matrix& a) {
  if (a.rows() != a.cols()) throw DomainError("inverse of a non-square matrix");
  if (a.is_exact()) return inverse(a.exact());
  Eigen::FullPivLU<Mat> lu(a.real());
  if (!lu.isInvertible()) throw DomainError("matrix is singular");
  return Mat(lu.inverse());
}

Matrix transpose(const Matrix& a) {
  if (a.is_exact()) return a.exact().transpose();
  return Mat(a.real().transpose());
}

Matrix block_diagonal(const std::vector<Matrix>& blocks) {
  bool exact = std::all_of(blocks.begin(), blocks.end(), [](const Matrix& m) { return m.is_exact(); });
  if (exact) {
    std::vector<RatMatrix> b;
    for (const auto& m : blocks) b.push_back(m.exact());
    return block_diagonal(b);
  }
  std::vector<Mat> b;
  for (const auto& m : blocks) b.push_back(m.to_real());
  return block_diagonal(b);
}

double frobenius_norm(const Matrix& a) {
  if (a.is_exact()) return a.exact().is_zero() ? 0.0 : a.exact().to_double().norm();
  return a.real().norm();
}

// ---------------------------------------------------------------------------
// Exponential and logarithm

namespace {

void require_square(long r, long c, const char* what) {
  if (r != c) throw DomainError(std::string(what) + " requires a square matrix");
  check_dimensions(r, c);
}

}  // namespace

Mat mat_exp(const Mat& m) {
  require_square(m.rows(), m.cols(), "mat_exp");
  const long n = m.rows();
  if (n == 0) return m;
  constexpr int q = 6;
  double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  if (norm > 0.5) s = std::max(0, static_cast<int>(std::ceil(std::log2(norm / 0.5))));
  Mat a = m / std::ldexp(1.0, s);

  Mat id = Mat::Identity(n, n);
  Mat num = id, den = id, power = id;
  double c = 1.0;
  for (int k = 1; k <= q; ++k) {
    c *= static_cast<double>(q - k + 1) / static_cast<double>(k * (2 * q - k + 1));
    power = power * a;
    num += c * power;
    den += ((k % 2) ? -c : c) * power;
  }
  Mat e = den.partialPivLu().solve(num);
  for (int i = 0; i < s; ++i) e = e * e;
  return e;
}

bool is_nilpotent(const RatMatrix& m) {
  if (!m.square()) return false;
  return m.pow(static_cast<unsigned>(m.rows())).is_zero();
}

RatMatrix mat_exp(const RatMatrix& m) {
  require_square(m.rows(), m.cols(), "mat_exp");
  if (!is_nilpotent(m))
    throw DomainError("exact exponential requires a nilpotent argument");
  const int n = m.rows();
  RatMatrix sum = RatMatrix::identity(n);
  RatMatrix term = RatMatrix::identity(n);
  for (int k = 1; k < n; ++k) {
    term = term * m * Rational(1, k);
    if (term.is_zero()) break;
    sum += term;
  }
  return sum;
}

Mat unipotent_log(const Mat& t, double tol) {
  require_square(t.rows(), t.cols(), "unipotent_log");
  const long n = t.rows();
  if (n == 0) return t;
  Mat x = t - Mat::Identity(n, n);
  double scale = std::max(1.0, x.norm());
  Mat xp = Mat::Identity(n, n);
  for (long k = 0; k < n; ++k) xp = xp * x;
  if (xp.norm() > tol * std::pow(scale, static_cast<double>(n)))
    throw DomainError("unipotent_log: (T - id)^d is not zero (norm " + std::to_string(xp.norm()) +
                      ")");
  Mat sum = Mat::Zero(n, n);
  Mat power = Mat::Identity(n, n);
  for (long k = 1; k < n; ++k) {
    power = power * x;
    sum += ((k % 2) ? 1.0 : -1.0) / static_cast<double>(k) * power;
  }
  double back = (mat_exp(sum) - t).norm();
  if (back > tol * std::max(1.0, t.norm()))
    throw NumericError("unipotent_log: exp round trip residual " + std::to_string(back));
  return sum;
}

RatMatrix unipotent_log(const RatMatrix& t) {
  require_square(t.rows(), t.cols(), "unipotent_log");
  const int n = t.rows();
  RatMatrix x = t - RatMatrix::identity(n);
  if (!is_nilpotent(x)) throw DomainError("unipotent_log: (T - id)^d is not zero");
  RatMatrix sum(n, n);
  RatMatrix power = RatMatrix::identity(n);
  for (int k = 1; k < n; ++k) {
    power = power * x;
    sum += power * Rational((k % 2) ? 1 : -1, k);
  }
  if (mat_exp(sum) != t) throw NumericError("unipotent_log: exact round trip failed");
  return sum;
}

// ---------------------------------------------------------------------------
// Eigenstructure

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int i) {
    while (parent[static_cast<size_t>(i)] != i) i = parent[static_cast<size_t>(i)] = parent[static_cast<size_t>(parent[static_cast<size_t>(i)])];
    return i;
  }
  void unite(int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); }
};

std::vector<std::vector<int>> single_linkage(const std::vector<Complex>& ev, double tol) {
  const int n = static_cast<int>(ev.size());
  UnionFind uf(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(ev[static_cast<size_t>(i)] - ev[static_cast<size_t>(j)]) <= tol) uf.unite(i, j);
  std::vector<std::vector<int>> groups;
  std::vector<int> slot(static_cast<size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    int r = uf.find(i);
    if (slot[static_cast<size_t>(r)] < 0) {
      slot[static_cast<size_t>(r)] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<size_t>(slot[static_cast<size_t>(r)])].push_back(i);
  }
  return groups;
}

// m right singular vectors of (A - lambda)^m with the smallest singular values.
void fill_kernel(const CMat& a, bool real_input, EigenCluster& c) {
  const long d = a.rows();
  const int m = c.multiplicity;
  if (real_input && c.center.imag() == 0.0) {
    Mat shifted = a.real() - c.center.real() * Mat::Identity(d, d);
    Mat p = Mat::Identity(d, d);
    for (int k = 0; k < m; ++k) p = p * shifted;
    Eigen::JacobiSVD<Mat> svd(p, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    c.basis = svd.matrixV().rightCols(m).cast<Complex>();
    double top = std::max(1.0, sv(0));
    c.residual = sv(d - m) / top;
    return;
  }
  CMat shifted = a - c.center * CMat::Identity(d, d);
  CMat p = CMat::Identity(d, d);
  for (int k = 0; k < m; ++k) p = p * shifted;
  Eigen::JacobiSVD<CMat> svd(p, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  c.basis = svd.matrixV().rightCols(m);
  double top = std::max(1.0, sv(0));
  c.residual = sv(d - m) / top;
}

double smallest_singular(const CMat& x) {
  if (x.cols() == 0) return 1.0;
  Eigen::JacobiSVD<CMat> svd(x);
  return svd.singularValues()(x.cols() - 1);
}

std::vector<EigenCluster> cluster_eigenvalues(const CMat& a, const std::vector<Complex>& ev,
                                              bool real_input, double tol) {
  const long d = a.rows();
  double current = tol;
  for (;;) {
    auto groups = single_linkage(ev, current);
    std::vector<EigenCluster> clusters;
    for (const auto& g : groups) {
      EigenCluster c;
      c.multiplicity = static_cast<int>(g.size());
      Complex sum = 0;
      for (int i : g) sum += ev[static_cast<size_t>(i)];
      c.center = sum / static_cast<double>(g.size());
      if (real_input && std::abs(c.center.imag()) <= current) c.center = {c.center.real(), 0.0};
      clusters.push_back(std::move(c));
    }
    if (real_input) {
      // Pair clusters exactly: the lower one takes the conjugate center.
      for (auto& c : clusters) {
        if (c.center.imag() >= 0) continue;
        double best = 1e300;
        const EigenCluster* partner = nullptr;
        for (const auto& o : clusters)
          if (o.center.imag() > 0 && o.multiplicity == c.multiplicity) {
            double dist = std::abs(o.center - std::conj(c.center));
            if (dist < best) {
              best = dist;
              partner = &o;
            }
          }
        if (partner && best <= std::max(current, 1e-12 * std::abs(c.center)))
          c.center = std::conj(partner->center);
      }
    }
    for (auto& c : clusters) fill_kernel(a, real_input, c);
    std::sort(clusters.begin(), clusters.end(), [](const EigenCluster& x, const EigenCluster& y) {
      if (x.center.real() != y.center.real()) return x.center.real() < y.center.real();
      return x.center.imag() < y.center.imag();
    });
    if (clusters.size() <= 1) return clusters;
    CMat all(d, d);
    long col = 0;
    for (const auto& c : clusters) {
      all.middleCols(col, c.multiplicity) = c.basis;
      col += c.multiplicity;
    }
    if (smallest_singular(all) >= 1e-5) return clusters;
    // Dependent generalized eigenspaces: widen to the next linkage distance.
    double next = 1e300;
    for (size_t i = 0; i < clusters.size(); ++i)
      for (size_t j = i + 1; j < clusters.size(); ++j)
        next = std::min(next, std::abs(clusters[i].center - clusters[j].center));
    double min_gap = 1e300;
    for (size_t i = 0; i < ev.size(); ++i)
      for (size_t j = i + 1; j < ev.size(); ++j) {
        double dist = std::abs(ev[i] - ev[j]);
        if (dist > current) min_gap = std::min(min_gap, dist);
      }
    current = std::max(current * 2.0, std::min(next, min_gap) * (1.0 + 1e-12));
  }
}

}  // namespace

std::vector<EigenCluster> eigenclusters(const Mat& a, std::optional<double> tol) {
  require_square(a.rows(), a.cols(), "eigenclusters");
  if (a.rows() == 0) return {};
  Eigen::EigenSolver<Mat> es(a, false);
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigenvalue iteration did not converge (d=" << a.rows() << ", ||A||_F=" << a.norm()
       << ")";
    throw NumericError(os.str());
  }
  std::vector<Complex> ev(es.eigenvalues().data(), es.eigenvalues().data() + a.rows());
  double t = tol.value_or(1e-7 * std::max(a.norm(), 1e-300));
  return cluster_eigenvalues(a.cast<Complex>(), ev, true, t);
}

std::vector<EigenCluster> eigenclusters(const CMat& a, std::optional<double> tol) {
  require_square(a.rows(), a.cols(), "eigenclusters");
  if (a.rows() == 0) return {};
  Eigen::ComplexEigenSolver<CMat> es(a, false);
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << "complex eigenvalue iteration did not converge (d=" << a.rows()
       << ", ||A||_F=" << a.norm() << ")";
    throw NumericError(os.str());
  }
  std::vector<Complex> ev(es.eigenvalues().data(), es.eigenvalues().data() + a.rows());
  double t = tol.value_or(1e-7 * std::max(a.norm(), 1e-300));
  return cluster_eigenvalues(a, ev, false, t);
}

std::vector<CMat> spectral_projectors(const std::vector<EigenCluster>& clusters) {
  if (clusters.empty()) return {};
  long d = 0;
  for (const auto& c : clusters) d += c.multiplicity;
  CMat x(clusters.front().basis.rows(), d);
  long col = 0;
  for (const auto& c : clusters) {
    x.middleCols(col, c.multiplicity) = c.basis;
    col += c.multiplicity;
  }
  CMat y = x.fullPivLu().inverse();
  std::vector<CMat> out;
  col = 0;
  for (const auto& c : clusters) {
    out.push_back(x.middleCols(col, c.multiplicity) * y.middleRows(col, c.multiplicity));
    col += c.multiplicity;
  }
  return out;
}

std::vector<InvariantSubspace> refine_invariant(const std::vector<Mat>& family, double tol) {
  if (family.empty()) return {};
  const long d = family.front().rows();
  for (const auto& a : family) {
    require_square(a.rows(), a.cols(), "refine_invariant");
    if (a.rows() != d) throw DomainError("refine_invariant: family members differ in size");
  }
  for (size_t i = 0; i < family.size(); ++i)
    for (size_t j = i + 1; j < family.size(); ++j) {
      const Mat& a = family[i];
      const Mat& b = family[j];
      double c = (a * b - b * a).norm();
      if (c > tol * std::max(1.0, a.norm() * b.norm()))
        throw PreconditionError("refine_invariant: members " + std::to_string(i) + " and " +
                                std::to_string(j) + " do not commute (residual " +
                                std::to_string(c) + ")");
    }

  std::vector<InvariantSubspace> comps(1);
  comps[0].basis = CMat::Identity(d, d);
  for (const auto& a : family) {
    CMat ac = a.cast<Complex>();
    std::vector<InvariantSubspace> next;
    for (const auto& w : comps) {
      CMat r = w.basis.adjoint() * ac * w.basis;
      auto clusters = eigenclusters(r);
      for (const auto& c : clusters) {
        InvariantSubspace sub;
        CMat raw = w.basis * c.basis;
        Eigen::HouseholderQR<CMat> qr(raw);
        sub.basis = qr.householderQ() * CMat::Identity(raw.rows(), raw.cols());
        sub.eigenvalues = w.eigenvalues;
        sub.eigenvalues.push_back(c.center);
        next.push_back(std::move(sub));
      }
    }
    comps = std::move(next);
  }
  return comps;
}

std::vector<RealInvariantSubspace> real_closure(const std::vector<InvariantSubspace>& components,
                                                double tol) {
  std::vector<RealInvariantSubspace> out;
  std::vector<bool> used(components.size(), false);
  auto track_scale = [](const InvariantSubspace& c) {
    double s = 1.0;
    for (const auto& z : c.eigenvalues) s = std::max(s, std::abs(z));
    return s;
  };
  for (size_t i = 0; i < components.size(); ++i) {
    if (used[i]) continue;
    const auto& ci = components[i];
    double scale = track_scale(ci);
    bool self = std::all_of(ci.eigenvalues.begin(), ci.eigenvalues.end(),
                            [&](const Complex& z) { return std::abs(z.imag()) <= tol * scale; });
    RealInvariantSubspace r;
    r.complex_index = static_cast<int>(i);
    CMat span = ci.basis;
    if (!self) {
      int partner = -1;
      double best = 1e300;
      for (size_t j = 0; j < components.size(); ++j) {
        if (j == i || used[j] || components[j].basis.cols() != ci.basis.cols()) continue;
        double dist = 0;
        for (size_t k = 0; k < ci.eigenvalues.size(); ++k)
          dist = std::max(dist, std::abs(components[j].eigenvalues[k] - std::conj(ci.eigenvalues[k])));
        if (dist < best) {
          best = dist;
          partner = static_cast<int>(j);
        }
      }
      if (partner < 0 || best > tol * scale)
        throw NumericError("real_closure: complex component without conjugate partner");
      used[static_cast<size_t>(partner)] = true;
      r.conjugate_index = partner;
    }
    used[i] = true;
    Mat both(span.rows(), 2 * span.cols());
    both << span.real(), span.imag();
    // The rank is known: k for a self-conjugate component, 2k for a pair.
    long want = self ? span.cols() : 2 * span.cols();
    Eigen::JacobiSVD<Mat> svd(both, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    if (sv(want - 1) < 1e-6 * sv(0) || (want < sv.size() && sv(want) > 1e-6 * sv(0)))
      throw NumericError("real_closure: real span has unexpected dimension");
    r.basis = svd.matrixU().leftCols(want);
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Orthonormalization, norms, subspaces

Orthonormalized orthonormalize(const std::vector<Vec>& vectors, double tol) {
  Orthonormalized out;
  if (vectors.empty()) return out;
  const long d = vectors.front().size();
  std::vector<Vec> kept;
  for (size_t i = 0; i < vectors.size(); ++i) {
    Vec v = vectors[i];
    double orig = v.norm();
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : kept) v -= q.dot(v) * q;
    double nv = v.norm();
    if (orig == 0.0 || nv <= tol * orig) {
      out.dropped.push_back(i);
      continue;
    }
    kept.push_back(v / nv);
  }
  out.basis.resize(d, static_cast<long>(kept.size()));
  for (size_t k = 0; k < kept.size(); ++k) out.basis.col(static_cast<long>(k)) = kept[k];
  return out;
}

Orthonormalized orthonormalize(const Mat& columns, double tol) {
  std::vector<Vec> v;
  for (long j = 0; j < columns.cols(); ++j) v.push_back(columns.col(j));
  auto out = orthonormalize(v, tol);
  if (out.basis.rows() == 0) out.basis.resize(columns.rows(), 0);
  return out;
}

double operator_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

Mat kernel_basis(const Mat& a, double threshold) {
  if (a.cols() == 0) return Mat(a.cols(), 0);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double cut = threshold * std::max(1.0, sv.size() ? sv(0) : 0.0);
  long r = 0;
  for (long i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++r;
  return svd.matrixV().rightCols(a.cols() - r);
}

Mat range_basis(const Mat& a, double threshold) {
  if (a.cols() == 0) return Mat(a.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  double cut = threshold * std::max(1.0, sv.size() ? sv(0) : 0.0);
  long r = 0;
  for (long i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++r;
  return svd.matrixU().leftCols(r);
}

double subspace_distance(const Mat& a, const Mat& b) {
  if (a.cols() != b.cols()) return M_PI / 2;
  if (a.cols() == 0) return 0.0;
  Mat qa = orthonormalize(a, 1e-12).basis;
  Mat qb = orthonormalize(b, 1e-12).basis;
  if (qa.cols() != qb.cols()) return M_PI / 2;
  // sin of the largest principal angle = ||(id - Qa Qa^T) Qb||_2, which
  // stays accurate for small angles where acos does not.
  Mat r = qb - qa * (qa.transpose() * qb);
  return std::asin(std::clamp(operator_norm(r), 0.0, 1.0));
}

// ---------------------------------------------------------------------------
// Rotations

Mat rotation(double theta) {
  Mat q(2, 2);
  q << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  return q;
}

Mat rotation(const Real& theta) {
  Real r = reduce_symmetric(theta, real_pi());
  double c = to_double(mp::cos(r));
  double s = to_double(mp::sin(r));
  Mat q(2, 2);
  q << c, s, -s, c;
  return q;
}

Mat rotation_block(int k, const Real& theta) {
  if (k % 2 != 0) throw DomainError("rotation block needs even dimension");
  Mat q = rotation(theta);
  Mat out = Mat::Zero(k, k);
  for (int i = 0; i < k; i += 2) out.block(i, i, 2, 2) = q;
  return out;
}

RatMatrix rotation_block_exact(int k, const Rational& c, const Rational& s, const Integer& n) {
  if (k % 2 != 0) throw DomainError("rotation block needs even dimension");
  if (c * c + s * s != 1) throw DomainError("exact rotation needs cos^2 + sin^2 = 1");
  RatMatrix q = RatMatrix::from_rows({{c, s}, {-s, c}});
  Integer m = abs(n);
  if (m > 1000000) throw DomainError("exact rotation power too large");
  RatMatrix p = q.pow(static_cast<unsigned>(m.get_ui()));
  if (n < 0) p = p.transpose();
  RatMatrix out(k, k);
  for (int i = 0; i < k; i += 2)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) out(i + a, i + b) = p(a, b);
  return out;
}

RotationBlock::RotationBlock(int k, CauchySolution nu) : k_(k), nu_(std::move(nu)) {
  if (k_ <= 0 || k_ % 2 != 0) throw DomainError("rotation block needs positive even dimension");
}

Mat RotationBlock::realize(const ModuleElement& x) const { return rotation_block(k_, nu_.evaluate(x)); }

Mat block_diagonal(const std::vector<Mat>& blocks) {
  long n = 0;
  for (const auto& b : blocks) n += b.rows();
  Mat out = Mat::Zero(n, n);
  long off = 0;
  for (const auto& b : blocks) {
    out.block(off, off, b.rows(), b.cols()) = b;
    off += b.rows();
  }
  return out;
}

RatMatrix block_diagonal(const std::vector<RatMatrix>& blocks) {
  int n = 0;
  for (const auto& b : blocks) n += b.rows();
  RatMatrix out(n, n);
  int off = 0;
  for (const auto& b : blocks) {
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j) out(off + i, off + j) = b(i, j);
    off += b.rows();
  }
  return out;
}

}  // namespace matsg
