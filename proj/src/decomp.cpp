#include "matsg/decomp.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include "matsg/error.hpp"

namespace matsg {

namespace mp = boost::multiprecision;

namespace {

double scaled(double residual, double scale) { return residual / std::max(1.0, scale); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

std::vector<Mat> real_samples(const SampleSet& s) {
  std::vector<Mat> out;
  out.reserve(s.size());
  for (const auto& g : s.samples) out.push_back(g.to_real());
  return out;
}

std::vector<double> point_values(const SampleSet& s) {
  std::vector<double> v;
  for (const auto& p : s.points) v.push_back(to_double(p.value()));
  return v;
}

// (i, j, k) with points[i] + points[j] == points[k].
std::vector<std::array<size_t, 3>> sum_triples(const SampleSet& s) {
  std::map<ModuleElement, size_t> index;
  for (size_t i = 0; i < s.size(); ++i) index.emplace(s.points[i], i);
  std::vector<std::array<size_t, 3>> out;
  for (size_t i = 0; i < s.size(); ++i)
    for (size_t j = 0; j < s.size(); ++j) {
      auto it = index.find(s.points[i] + s.points[j]);
      if (it != index.end()) out.push_back({i, j, it->second});
    }
  return out;
}

double smallest_singular(const Mat& a) {
  if (a.cols() == 0) return 1.0;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace

// ---------------------------------------------------------------------------
// Kernel split

KernelSplit kernel_split(const SampleSet& s, const Tolerances& tol) {
  s.validate();
  const long d = s.dimension();
  KernelSplit out;
  std::optional<size_t> x0;
  Mat k0;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s.points[i].value() <= 0) continue;
    Mat k = kernel_basis(s.samples[i].to_real());
    if (!x0) {
      x0 = i;
      k0 = k;
      continue;
    }
    double angle = subspace_distance(k, k0);
    out.kernel_angle = std::max(out.kernel_angle, angle);
    if (angle > tol.recover)
      throw InconsistencyError("kernel of g(x) differs between sample points " +
                               std::to_string(*x0) + " and " + std::to_string(i) + " (angle " +
                               fmt(angle) + ")");
  }
  if (!x0) {
    out.v1 = Mat::Identity(d, d);
    out.v2 = Mat(d, 0);
  } else {
    out.v2 = k0;
    out.v1 = range_basis(s.samples[*x0].to_real());
    if (out.v1.cols() + out.v2.cols() != d)
      throw InconsistencyError("range and kernel of g(x) do not span the space");
    Mat both(d, d);
    both << out.v1, out.v2;
    if (d > 0 && smallest_singular(both) < tol.recover)
      throw InconsistencyError("range and kernel of g(x) intersect: g is not zero on its kernel part");
  }
  out.invertible = s.restricted(out.v1);
  return out;
}

// ---------------------------------------------------------------------------
// Primary decompositions

std::string to_string(ComponentType t) { return t == ComponentType::first ? "first" : "second"; }

std::vector<InvariantSubspace> spd(const SampleSet& s, const Tolerances& tol) {
  s.validate();
  if (s.dimension() == 0) return {};
  return refine_invariant(real_samples(s), tol.verify);
}

std::vector<PrimaryComponent> srpd(const SampleSet& s, const Tolerances& tol) {
  auto comps = spd(s, tol);
  auto real = real_closure(comps);
  auto g = real_samples(s);
  std::vector<PrimaryComponent> out;
  for (const auto& r : real) {
    PrimaryComponent pc;
    pc.basis = r.basis;
    const double k = static_cast<double>(r.basis.cols());
    if (r.conjugate_index < 0) {
      pc.type = ComponentType::first;
      pc.complex_basis = r.basis.cast<Complex>();
      for (const auto& gx : g) {
        double lambda = (r.basis.transpose() * gx * r.basis).trace() / k;
        pc.track.emplace_back(lambda, 0.0);
        if (lambda < 0) pc.ambiguous = true;
      }
    } else {
      pc.type = ComponentType::second;
      const CMat& u = comps[static_cast<size_t>(r.complex_index)].basis;
      const double m = static_cast<double>(u.cols());
      std::vector<Complex> track;
      for (const auto& gx : g) track.push_back((u.adjoint() * gx.cast<Complex>() * u).trace() / m);
      bool flip = false;
      for (const auto& z : track)
        if (std::abs(z.imag()) > 1e-7 * std::max(1.0, std::abs(z))) {
          flip = z.imag() < 0;
          break;
        }
      pc.complex_basis = flip ? CMat(comps[static_cast<size_t>(r.conjugate_index)].basis) : u;
      for (auto& z : track) pc.track.push_back(flip ? std::conj(z) : z);
    }
    out.push_back(std::move(pc));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Common eigenvector descent

CommonEigenvector common_eigenvector(const SampleSet& s, const PrimaryComponent& comp,
                                     const Tolerances& tol) {
  if (comp.type != ComponentType::first)
    throw PreconditionError("common_eigenvector needs a component of the first type");
  const Mat& b = comp.basis;
  std::vector<Mat> r;
  for (const auto& g : s.samples) r.push_back(b.transpose() * g.to_real() * b);
  Mat w = Mat::Identity(b.cols(), b.cols());
  CommonEigenvector out;
  for (;;) {
    const long m = w.cols();
    long best_dim = m;
    Mat best;
    for (const auto& rx : r) {
      Mat rw = w.transpose() * rx * w;
      double lambda = rw.trace() / static_cast<double>(m);
      Mat e = kernel_basis(rw - lambda * Mat::Identity(m, m), tol.recover);
      if (e.cols() == 0)
        throw NumericError("common_eigenvector: empty eigenspace (tolerance too tight)");
      if (e.cols() < best_dim) {
        best_dim = e.cols();
        best = e;
      }
    }
    if (best_dim == m) break;
    w = w * best;
    ++out.iterations;
  }
  out.vector = b * w.col(0);
  out.vector.normalize();
  for (const auto& g : s.samples) {
    Mat gx = g.to_real();
    double lambda = out.vector.dot(gx * out.vector);
    out.residual = std::max(out.residual, (gx * out.vector - lambda * out.vector).norm());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Jordan-Chevalley

JCPair jc_multiplicative(const Matrix& a) {
  if (a.rows() != a.cols()) throw DomainError("jc_multiplicative needs a square matrix");
  const int n = static_cast<int>(a.rows());
  if (a.is_exact()) {
    const RatMatrix& x = a.exact();
    if (determinant(x) == 0) throw DomainError("jc_multiplicative: matrix is singular");
    RatPolynomial chi = characteristic_polynomial(x);
    RatPolynomial p = divmod(chi, gcd(chi, chi.derivative())).first.monic();
    RatPolynomial dp = p.derivative();
    RatMatrix d = x;
    // Newton iteration on p(D) = 0; converges in at most log2(n) + 1 steps.
    for (int it = 0; it <= n + 1; ++it) {
      RatMatrix pd = p(d);
      if (pd.is_zero()) {
        RatMatrix t = inverse(d) * x;
        return {Matrix(d), Matrix(t)};
      }
      d = d - pd * inverse(dp(d));
    }
    throw NumericError("jc_multiplicative: semisimple iteration did not terminate");
  }
  const Mat& x = a.real();
  if (n == 0) return {Matrix(Mat(0, 0)), Matrix(Mat(0, 0))};
  auto clusters = eigenclusters(x);
  for (const auto& c : clusters)
    if (std::abs(c.center) <= 1e-12 * std::max(1.0, x.norm()))
      throw DomainError("jc_multiplicative: matrix is singular");
  auto proj = spectral_projectors(clusters);
  CMat dc = CMat::Zero(n, n);
  for (size_t i = 0; i < clusters.size(); ++i) dc += clusters[i].center * proj[i];
  if (dc.imag().norm() > 1e-8 * std::max(1.0, x.norm()))
    throw NumericError("jc_multiplicative: semisimple part of a real matrix is not real");
  Mat d = dc.real();
  Mat t = d.partialPivLu().solve(x);
  return {Matrix(d), Matrix(t)};
}

namespace {

// Principal logarithm of a semisimple matrix with no eigenvalues on (-inf, 0].
Mat semisimple_log(const Mat& d) {
  const long n = d.rows();
  if (n == 0) return d;
  auto clusters = eigenclusters(d);
  auto proj = spectral_projectors(clusters);
  CMat j = CMat::Zero(n, n);
  for (size_t i = 0; i < clusters.size(); ++i) j += std::log(clusters[i].center) * proj[i];
  return j.real();
}

}  // namespace

JCResult semigroup_jc(const SampleSet& s, const Tolerances& tol) {
  s.validate();
  JCResult out;
  const size_t n = s.size();
  auto g = real_samples(s);
  IdentityCheck factor{"DT=TD=g"};
  IdentityCheck unip{"T unipotent"};
  for (size_t i = 0; i < n; ++i) {
    JCPair p = jc_multiplicative(s.samples[i]);
    Mat d = p.d.to_real(), t = p.t.to_real();
    double gn = g[i].norm();
    double r = std::max((d * t - g[i]).norm(), (t * d - g[i]).norm()) / std::max(1.0, gn);
    if (r > factor.max_residual) {
      factor.max_residual = r;
      factor.worst = {i};
    }
    Mat nx;
    try {
      nx = unipotent_log(t, tol.recover);
    } catch (const Error&) {
      unip.pass = false;
      unip.worst = {i};
      unip.max_residual = 1.0;
      nx = Mat::Zero(t.rows(), t.cols());
    }
    out.d.push_back(d);
    out.t.push_back(t);
    out.n.push_back(nx);
    out.j.push_back(semisimple_log(d));
  }
  factor.pass = factor.max_residual <= tol.verify;

  IdentityCheck dd{"D(x)D(y)=D(x+y)"}, tt{"T(x)T(y)=T(x+y)"}, td{"T(x)D(y)=D(y)T(x)"},
      nn{"N(x)+N(y)=N(x+y)"};
  auto note = [](IdentityCheck& c, double r, std::vector<size_t> w) {
    if (r > c.max_residual) {
      c.max_residual = r;
      c.worst = std::move(w);
    }
  };
  for (const auto& [i, j, k] : sum_triples(s)) {
    note(dd, scaled((out.d[i] * out.d[j] - out.d[k]).norm(), out.d[i].norm() * out.d[j].norm()),
         {i, j, k});
    note(tt, scaled((out.t[i] * out.t[j] - out.t[k]).norm(), out.t[i].norm() * out.t[j].norm()),
         {i, j, k});
    note(nn, scaled((out.n[i] + out.n[j] - out.n[k]).norm(), out.n[i].norm() + out.n[j].norm()),
         {i, j, k});
  }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      note(td, scaled((out.t[i] * out.d[j] - out.d[j] * out.t[i]).norm(),
                      out.t[i].norm() * out.d[j].norm()),
           {i, j});
  for (auto* c : {&dd, &tt, &td, &nn}) c->pass = c->max_residual <= tol.verify;
  out.checks = {factor, unip, dd, tt, td, nn};
  out.pass = std::all_of(out.checks.begin(), out.checks.end(), [](const IdentityCheck& c) { return c.pass; });
  return out;
}

// ---------------------------------------------------------------------------
// Generators

std::vector<ComponentGenerators> generators(const SampleSet& s,
                                            const std::vector<PrimaryComponent>& comps,
                                            const JCResult& jc, const BoundFunction* f,
                                            const Tolerances& tol) {
  if (f) {
    BoundReport br = verify_bound(s, *f);
    if (!br.pass) throw PreconditionError("samples violate the bound " + f->text());
  }
  auto v = point_values(s);
  size_t x0 = 0;
  for (size_t i = 0; i < v.size(); ++i)
    if (v[i] > v[x0]) x0 = i;
  std::vector<ComponentGenerators> out;
  for (size_t c = 0; c < comps.size(); ++c) {
    const auto& comp = comps[c];
    ComponentGenerators gen;
    double num = 0, den = 0;
    for (size_t i = 0; i < v.size(); ++i) {
      if (v[i] <= 0) continue;
      num += v[i] * std::log(std::abs(comp.track[i]));
      den += v[i] * v[i];
    }
    gen.a = den > 0 ? num / den : 0.0;
    for (size_t i = 0; i < v.size(); ++i)
      gen.a_residual =
          std::max(gen.a_residual, std::abs(std::log(std::abs(comp.track[i])) - gen.a * v[i]));
    if (gen.a_residual > tol.recover)
      throw InconsistencyError("bound assumption violated or insufficient samples: log|lambda| of "
                               "component " + std::to_string(c) + " is not linear (residual " +
                               fmt(gen.a_residual) + ")");
    const Mat& b = comp.basis;
    const long k = b.cols();
    gen.p = v[x0] > 0 ? Mat(b.transpose() * jc.n[x0] * b / v[x0]) : Mat(Mat::Zero(k, k));
    for (size_t i = 0; i < v.size(); ++i) {
      Mat ni = b.transpose() * jc.n[i] * b;
      gen.p_residual = std::max(gen.p_residual, scaled((ni - gen.p * v[i]).norm(), ni.norm()));
    }
    if (gen.p_residual > tol.recover)
      throw InconsistencyError("bound assumption violated or insufficient samples: nilpotent part "
                               "of component " + std::to_string(c) + " is not linear (residual " +
                               fmt(gen.p_residual) + ")");
    for (const auto& z : comp.track) gen.nu_track.push_back(std::arg(z));
    out.push_back(std::move(gen));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Partition by equivalence of rotation angles

namespace {

struct Lattice {
  std::vector<std::vector<Rational>> rows;  // generator coordinates
  // generator = sum of coeff * point
  std::vector<std::vector<std::pair<size_t, Integer>>> combos;
  size_t rank = 0;  // generators coming from sampled points
};

Lattice sample_lattice(const SampleSet& s) {
  const size_t np = s.size();
  const size_t nb = s.basis->size();
  Integer den = 1;
  for (const auto& p : s.points)
    for (const auto& c : p.coords()) den = lcm(den, Integer(c.get_den()));
  std::vector<std::vector<Integer>> a(np, std::vector<Integer>(nb));
  std::vector<std::vector<Integer>> u(np, std::vector<Integer>(np, 0));
  for (size_t i = 0; i < np; ++i) {
    u[i][i] = 1;
    for (size_t j = 0; j < nb; ++j) {
      Rational q = s.points[i].coord(j) * den;
      a[i][j] = q.get_num();
    }
  }
  auto sub = [&](size_t dst, size_t src, const Integer& q) {
    for (size_t j = 0; j < nb; ++j) a[dst][j] -= q * a[src][j];
    for (size_t j = 0; j < np; ++j) u[dst][j] -= q * u[src][j];
  };
  size_t row = 0;
  for (size_t col = 0; col < nb && row < np; ++col) {
    for (;;) {
      size_t piv = np;
      for (size_t i = row; i < np; ++i)
        if (a[i][col] != 0 && (piv == np || abs(a[i][col]) < abs(a[piv][col]))) piv = i;
      if (piv == np) break;
      std::swap(a[row], a[piv]);
      std::swap(u[row], u[piv]);
      bool done = true;
      for (size_t i = row + 1; i < np; ++i) {
        if (a[i][col] == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), a[i][col].get_mpz_t(), a[row][col].get_mpz_t());
        sub(i, row, q);
        if (a[i][col] != 0) done = false;
      }
      if (done) break;
    }
    if (a[row][col] != 0) ++row;
  }
  Lattice out;
  out.rank = row;
  for (size_t r = 0; r < row; ++r) {
    std::vector<Rational> coords(nb);
    for (size_t j = 0; j < nb; ++j) {
      coords[j] = Rational(a[r][j], den);
      coords[j].canonicalize();
    }
    ModuleElement e(s.basis, coords);
    std::vector<std::pair<size_t, Integer>> combo;
    if (e.value() < 0) {
      e = e * Rational(-1);
      for (auto& c : coords) c = -c;
      for (auto& c : u[r]) c = -c;
    }
    // Prefer a sampled point equal to the generator.
    if (auto hit = s.find(e)) {
      combo.push_back({*hit, Integer(1)});
    } else {
      for (size_t j = 0; j < np; ++j)
        if (u[r][j] != 0) combo.push_back({j, u[r][j]});
    }
    out.rows.push_back(coords);
    out.combos.push_back(std::move(combo));
  }
  // Complete with basis directions the samples never reach.
  for (size_t j = 0; j < nb && out.rows.size() < nb; ++j) {
    RatMatrix m(static_cast<int>(out.rows.size() + 1), static_cast<int>(nb));
    for (size_t r = 0; r < out.rows.size(); ++r)
      for (size_t c = 0; c < nb; ++c) m(static_cast<int>(r), static_cast<int>(c)) = out.rows[r][c];
    m(static_cast<int>(out.rows.size()), static_cast<int>(j)) = 1;
    if (rank(m) == static_cast<int>(out.rows.size() + 1)) {
      std::vector<Rational> coords(nb);
      coords[j] = 1;
      out.rows.push_back(coords);
      out.combos.emplace_back();
    }
  }
  return out;
}

struct Fit {
  bool ok = false;
  Real slope;
};

Fit fit_modulo(const CauchySolution& f, double tol) {
  auto r = linear_modulo(f, 2 * real_pi(), tol);
  if (!r) return {};
  return {true, r->slope};
}

}  // namespace

Partition partitioned_srpd(const SampleSet& s, const std::vector<PrimaryComponent>& comps,
                           const std::vector<ComponentGenerators>& gens, const Tolerances& tol) {
  if (gens.size() != comps.size()) throw DomainError("one generator set per component required");
  Partition out;
  Lattice lat = sample_lattice(s);
  out.lattice = lat.rows;
  const size_t nb = s.basis->size();

  std::vector<BasisEntry> entries;
  for (size_t k = 0; k < lat.rows.size(); ++k) {
    ModuleElement e(s.basis, lat.rows[k]);
    BasisEntry be;
    be.label = "g" + std::to_string(k + 1);
    be.value = e.value();
    be.exact = e.exact_value();
    entries.push_back(std::move(be));
  }
  BasisPtr gbasis = ModuleBasis::make(std::move(entries));
  // Coordinates of the original basis vectors in the generator basis.
  RatMatrix g(static_cast<int>(nb), static_cast<int>(nb));
  for (size_t r = 0; r < nb; ++r)
    for (size_t c = 0; c < nb; ++c) g(static_cast<int>(r), static_cast<int>(c)) = lat.rows[r][c];
  RatMatrix ginv = inverse(g);
  std::vector<std::vector<Rational>> back(nb, std::vector<Rational>(nb));
  for (size_t r = 0; r < nb; ++r)
    for (size_t c = 0; c < nb; ++c) back[r][c] = ginv(static_cast<int>(r), static_cast<int>(c));

  const Real pi = real_pi();
  std::vector<CauchySolution> nu;
  for (size_t c = 0; c < comps.size(); ++c) {
    std::vector<Real> vals;
    for (size_t k = 0; k < lat.rows.size(); ++k) {
      Real th = 0;
      if (comps[c].type == ComponentType::second || comps[c].ambiguous)
        for (const auto& [p, coeff] : lat.combos[k])
          th += Real(gens[c].nu_track[p]) * Real(coeff.get_str());
      vals.push_back(reduce_symmetric(th, pi));
    }
    nu.push_back(CauchySolution::real(gbasis, vals));
  }

  const size_t n = comps.size();
  std::vector<int> cls(n, -1);
  std::vector<Fit> linear(n);
  for (size_t i = 0; i < n; ++i) linear[i] = fit_modulo(nu[i], tol.recover);
  // Classes: linear ones together, others by +-equivalence to a representative.
  std::vector<size_t> reps;
  for (size_t i = 0; i < n; ++i) {
    if (linear[i].ok) continue;
    for (size_t r = 0; r < reps.size() && cls[i] < 0; ++r) {
      size_t j = reps[r];
      bool same = fit_modulo(nu[i] - nu[j], tol.recover).ok || fit_modulo(nu[i] + nu[j], tol.recover).ok;
      if (same) {
        cls[i] = static_cast<int>(r);
      } else if (fit_modulo(nu[i] - nu[j], 100 * tol.recover).ok ||
                 fit_modulo(nu[i] + nu[j], 100 * tol.recover).ok) {
        out.borderline.push_back({j, i});
      }
    }
    if (cls[i] < 0) {
      cls[i] = static_cast<int>(reps.size());
      reps.push_back(i);
    }
  }

  bool any_linear = std::any_of(linear.begin(), linear.end(), [](const Fit& f) { return f.ok; });
  if (any_linear) {
    PartitionBlock b;
    b.linear_class = true;
    b.eta = CauchySolution::zero(s.basis);
    for (size_t i = 0; i < n; ++i)
      if (linear[i].ok) {
        b.components.push_back(i);
        b.offsets.push_back(linear[i].slope);
        b.orientation.push_back(1);
      }
    out.blocks.push_back(std::move(b));
  }
  for (size_t r = 0; r < reps.size(); ++r) {
    PartitionBlock b;
    const CauchySolution& eta = nu[reps[r]];
    b.eta = eta.rebased(s.basis, back);
    for (size_t i = 0; i < n; ++i) {
      if (linear[i].ok || cls[i] != static_cast<int>(r)) continue;
      Fit plus = fit_modulo(nu[i] - eta, 4 * tol.recover);
      Fit minus = plus.ok ? Fit{} : fit_modulo(-nu[i] - eta, 4 * tol.recover);
      if (!plus.ok && !minus.ok)
        throw NumericError("partitioned_srpd: class member not equivalent to its representative");
      b.components.push_back(i);
      b.offsets.push_back(plus.ok ? plus.slope : minus.slope);
      b.orientation.push_back(plus.ok ? 1 : -1);
    }
    out.blocks.push_back(std::move(b));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rotation normal form

NormalForm rotation_normal_form(const std::vector<Mat>& s_samples, const std::vector<Real>& eta,
                                const Tolerances& tol) {
  if (s_samples.size() != eta.size() || s_samples.empty())
    throw DomainError("rotation_normal_form: one angle per sample required");
  const long k = s_samples.front().rows();
  if (k % 2 != 0) throw DomainError("rotation_normal_form: odd block dimension");
  std::vector<double> c, sn;
  size_t best = 0;
  for (size_t i = 0; i < eta.size(); ++i) {
    Real r = reduce_symmetric(eta[i], real_pi());
    c.push_back(to_double(mp::cos(r)));
    sn.push_back(to_double(mp::sin(r)));
    if (std::abs(sn[i]) > std::abs(sn[best])) best = i;
  }
  if (std::abs(sn[best]) < 1e-6)
    throw DegeneracyError("rotation_normal_form: sin(eta) vanishes at every sample; more samples needed");

  NormalForm out;
  out.u = Mat(k, k);
  Mat rest = Mat::Identity(k, k);
  for (long col = 0; col < k; col += 2) {
    Vec v = rest.col(0);
    const Mat& sx = s_samples[best];
    Vec u = (sx * v - c[best] * v) / sn[best];
    for (size_t i = 0; i < s_samples.size(); ++i) {
      if (std::abs(sn[i]) < 1e-3) continue;
      Vec ui = (s_samples[i] * v - c[i] * v) / sn[i];
      out.independence = std::max(out.independence, (ui - u).norm());
    }
    if (std::abs(u.dot(v)) > tol.recover || std::abs(u.norm() - 1.0) > tol.recover)
      throw NumericError("rotation_normal_form: S(x) is not a rotation on the block (<u,v> = " +
                         fmt(u.dot(v)) + ", |u| = " + fmt(u.norm()) + ")");
    u -= u.dot(v) * v;
    u.normalize();
    out.u.col(col) = u;
    out.u.col(col + 1) = v;
    std::vector<Vec> span;
    for (long q = 0; q <= col + 1; ++q) span.push_back(out.u.col(q));
    for (long j = 0; j < rest.cols(); ++j) span.push_back(rest.col(j));
    Mat all = orthonormalize(span, 1e-6).basis;
    if (all.cols() != k)
      throw NumericError("rotation_normal_form: complement lost dimension");
    rest = all.rightCols(k - col - 2);
  }
  out.orthogonality = (out.u * out.u.transpose() - Mat::Identity(k, k)).norm();
  for (size_t i = 0; i < s_samples.size(); ++i) {
    Mat q = rotation_block(static_cast<int>(k), eta[i]);
    out.reconstruction =
        std::max(out.reconstruction, (out.u * q * out.u.transpose() - s_samples[i]).norm());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structure and classification

namespace {

// Real complex structure i(P1 - P2) of a second-type component, in the
// component's real basis.
Mat complex_structure(const PrimaryComponent& comp) {
  CMat uc = comp.basis.transpose().cast<Complex>() * comp.complex_basis;
  const long m = uc.cols();
  CMat x(uc.rows(), 2 * m);
  x << uc, uc.conjugate();
  CMat sign = CMat::Zero(2 * m, 2 * m);
  for (long i = 0; i < m; ++i) {
    sign(i, i) = Complex(0, 1);
    sign(m + i, m + i) = Complex(0, -1);
  }
  CMat k = x * sign * x.inverse();
  return k.real();
}

double track_law(const SampleSet& s, const PrimaryComponent& comp) {
  double worst = 0;
  for (const auto& [i, j, k] : sum_triples(s)) {
    Complex lhs = comp.track[i] * comp.track[j];
    worst = std::max(worst, std::abs(lhs - comp.track[k]) / std::max(std::abs(comp.track[k]), 1e-300));
  }
  return worst;
}

}  // namespace

StructureResult structure(const SampleSet& s, const BoundFunction& f, const Tolerances& tol) {
  s.validate();
  StructureResult res;
  const long dim = s.dimension();
  res.m = Mat::Zero(dim, dim);
  auto fail = [&](Stage& st, const std::string& kind, const std::string& msg, double value = 0) {
    st.pass = false;
    st.message = msg;
    res.pass = false;
    res.violations.push_back({st.name, kind, msg, value});
  };
  auto g = real_samples(s);
  auto v = point_values(s);
  if (dim == 0) {
    for (size_t i = 0; i < s.size(); ++i) res.s.push_back(Mat(0, 0));
    return res;
  }

  Stage st_srpd{"srpd"};
  try {
    res.components = srpd(s, tol);
    double law = 0;
    int ambiguous = 0;
    for (const auto& c : res.components) {
      law = std::max(law, track_law(s, c));
      ambiguous += c.ambiguous ? 1 : 0;
    }
    st_srpd.residuals["components"] = static_cast<double>(res.components.size());
    st_srpd.residuals["track_law"] = law;
    st_srpd.residuals["ambiguous"] = ambiguous;
    if (law > tol.verify) fail(st_srpd, "track_law", "eigenvalue track is not multiplicative", law);
    if (ambiguous > 0)
      fail(st_srpd, "ambiguous",
           "component with real negative eigenvalue at every sample: rotation by pi cannot be told "
           "apart from a real eigenvalue at this sampling");
  } catch (const Error& e) {
    fail(st_srpd, "error", e.what());
  }
  res.stages.push_back(st_srpd);
  if (!st_srpd.pass) return res;

  Stage st_jc{"jc"};
  JCResult jc;
  try {
    jc = semigroup_jc(s, tol);
    for (const auto& c : jc.checks) {
      st_jc.residuals[c.name] = c.max_residual;
      if (!c.pass) fail(st_jc, "identity", c.name + " violated", c.max_residual);
    }
  } catch (const Error& e) {
    fail(st_jc, "error", e.what());
  }
  res.stages.push_back(st_jc);
  if (!st_jc.pass) return res;

  Stage st_gen{"generators"};
  try {
    res.generators = generators(s, res.components, jc, &f, tol);
    double ar = 0, pr = 0;
    for (const auto& gen : res.generators) {
      ar = std::max(ar, gen.a_residual);
      pr = std::max(pr, gen.p_residual);
    }
    st_gen.residuals["a_fit"] = ar;
    st_gen.residuals["p_fit"] = pr;
  } catch (const Error& e) {
    fail(st_gen, "error", e.what());
  }
  res.stages.push_back(st_gen);
  if (!st_gen.pass) return res;

  Stage st_part{"partition"};
  Partition part;
  try {
    part = partitioned_srpd(s, res.components, res.generators, tol);
    st_part.residuals["blocks"] = static_cast<double>(part.blocks.size());
    st_part.residuals["borderline"] = static_cast<double>(part.borderline.size());
    st_part.residuals["lattice_rank"] = static_cast<double>(part.lattice.size());
    st_part.residuals["sample_points"] = static_cast<double>(s.size());
  } catch (const Error& e) {
    fail(st_part, "error", e.what());
  }
  res.stages.push_back(st_part);
  if (!st_part.pass) return res;

  // Assemble S(x) and M in component coordinates.
  Stage st_struct{"structure"};
  const size_t nc = res.components.size();
  Mat cmat(dim, dim);
  std::vector<long> offset(nc);
  long col = 0;
  for (size_t i = 0; i < nc; ++i) {
    offset[i] = col;
    cmat.middleCols(col, res.components[i].basis.cols()) = res.components[i].basis;
    col += res.components[i].basis.cols();
  }
  Mat cinv = cmat.inverse();
  Mat mloc = Mat::Zero(dim, dim);
  std::vector<Mat> sloc(s.size(), Mat::Identity(dim, dim));
  for (const auto& blk : part.blocks) {
    for (size_t q = 0; q < blk.components.size(); ++q) {
      size_t i = blk.components[q];
      const auto& comp = res.components[i];
      const long k = comp.basis.cols();
      Mat kmat = Mat::Zero(k, k);
      if (comp.type == ComponentType::second) kmat = blk.orientation[q] * complex_structure(comp);
      Mat mi = res.generators[i].a * Mat::Identity(k, k) + res.generators[i].p +
               to_double(blk.offsets[q]) * kmat;
      mloc.block(offset[i], offset[i], k, k) = mi;
      if (!blk.linear_class)
        for (size_t x = 0; x < s.size(); ++x) {
          Real e = reduce_symmetric(blk.eta.evaluate(s.points[x]), real_pi());
          sloc[x].block(offset[i], offset[i], k, k) =
              to_double(mp::cos(e)) * Mat::Identity(k, k) + to_double(mp::sin(e)) * kmat;
        }
    }
  }
  res.m = cmat * mloc * cinv;
  for (auto& sx : sloc) res.s.push_back(cmat * sx * cinv);

  double recon = 0, commute = 0;
  for (size_t x = 0; x < s.size(); ++x) {
    Mat rebuilt = res.s[x] * mat_exp(res.m * v[x]);
    recon = std::max(recon, scaled((rebuilt - g[x]).norm(), g[x].norm()));
    commute = std::max(commute, scaled((res.m * res.s[x] - res.s[x] * res.m).norm(), res.m.norm()));
  }
  res.reconstruction = recon;
  st_struct.residuals["reconstruction"] = recon;
  st_struct.residuals["commutation"] = commute;
  if (recon > tol.recover) fail(st_struct, "reconstruction", "S(x) exp(Mx) does not reproduce the samples", recon);
  if (commute > tol.recover) fail(st_struct, "commutation", "M does not commute with S(x)", commute);

  // Blocks: orthonormal bases, orthogonality, isometry, normal form.
  std::vector<Mat> wb;
  for (const auto& blk : part.blocks) {
    std::vector<Vec> cols;
    for (size_t i : blk.components)
      for (long c = 0; c < res.components[i].basis.cols(); ++c) cols.push_back(res.components[i].basis.col(c));
    wb.push_back(orthonormalize(cols, 1e-8).basis);
  }
  double gram = 0, iso = 0, nf_orth = 0, nf_rec = 0, nf_ind = 0;
  for (size_t l = 0; l < wb.size(); ++l)
    for (size_t m = l + 1; m < wb.size(); ++m)
      gram = std::max(gram, (wb[l].transpose() * wb[m]).cwiseAbs().maxCoeff());
  st_struct.residuals["gram_offdiag"] = gram;
  if (gram > tol.recover)
    fail(st_struct, "orthogonality", "blocks are not pairwise orthogonal: the bound must be violated", gram);

  for (size_t l = 0; l < part.blocks.size(); ++l) {
    const auto& blk = part.blocks[l];
    StructureBlock sb;
    sb.dim = static_cast<int>(wb[l].cols());
    sb.basis = wb[l];
    for (size_t i : blk.components) sb.a.push_back(res.generators[i].a);
    sb.m = Mat(wb[l].transpose() * res.m * wb[l]);
    if (blk.linear_class) {
      sb.tag = "elementary-plain";
    } else {
      sb.tag = "elementary-rotating";
      sb.nu = blk.eta;
      std::vector<Mat> sl;
      std::vector<Real> eta;
      for (size_t x = 0; x < s.size(); ++x) {
        Mat b = wb[l].transpose() * res.s[x] * wb[l];
        iso = std::max(iso, (b.transpose() * b - Mat::Identity(b.rows(), b.cols())).cwiseAbs().maxCoeff());
        sl.push_back(b);
        eta.push_back(blk.eta.evaluate(s.points[x]));
      }
      try {
        NormalForm nf = rotation_normal_form(sl, eta, tol);
        nf_orth = std::max(nf_orth, nf.orthogonality);
        nf_rec = std::max(nf_rec, nf.reconstruction);
        nf_ind = std::max(nf_ind, nf.independence);
        sb.u = Mat(wb[l] * nf.u);
      } catch (const Error& e) {
        fail(st_struct, "normal_form", e.what());
      }
    }
    res.blocks.push_back(std::move(sb));
  }
  st_struct.residuals["isometry"] = iso;
  st_struct.residuals["normal_form_orthogonality"] = nf_orth;
  st_struct.residuals["normal_form_reconstruction"] = nf_rec;
  st_struct.residuals["normal_form_independence"] = nf_ind;
  if (iso > tol.verify) fail(st_struct, "isometry", "S(x) is not an isometry on its block", iso);
  if (nf_orth > 1e-10) fail(st_struct, "normal_form", "U is not orthogonal", nf_orth);
  if (nf_rec > tol.recover) fail(st_struct, "normal_form", "U Q(x) U^T differs from S(x)", nf_rec);
  res.stages.push_back(st_struct);
  return res;
}

StructureResult classify(const SampleSet& s, const BoundFunction& f, const Tolerances& tol) {
  s.validate();
  StructureResult res;
  const long d = s.dimension();
  auto fail = [&](Stage& st, const std::string& kind, const std::string& msg, double value = 0) {
    st.pass = false;
    st.message = st.message.empty() ? msg : st.message;
    res.pass = false;
    res.violations.push_back({st.name, kind, msg, value});
  };

  Stage st_sg{"semigroup"};
  SemigroupReport sg = verify_semigroup(s, s.mode == ScalarMode::exact ? 0.0 : tol.verify);
  st_sg.residuals = {{"identity", sg.max_identity}, {"law", sg.max_law},
                     {"commutation", sg.max_commutation}, {"kernel", sg.max_kernel},
                     {"pairs_checked", static_cast<double>(sg.pairs_checked)}};
  for (const auto& vio : sg.violations) {
    std::string pts;
    for (size_t p : vio.points) pts += (pts.empty() ? "" : ",") + std::to_string(p);
    fail(st_sg, vio.kind, vio.kind + " violated at points [" + pts + "]", vio.residual);
  }
  res.stages.push_back(st_sg);
  if (!st_sg.pass) return res;

  Stage st_bd{"bound"};
  BoundReport br = verify_bound(s, f);
  double worst_margin = 0;
  for (const auto& bp : br.points) worst_margin = std::min(worst_margin, bp.margin);
  st_bd.residuals["worst_margin"] = worst_margin;
  if (!br.one_at_zero) fail(st_bd, "bound", "f(0) != 1");
  if (!br.right_continuous) fail(st_bd, "bound", "f is not right-continuous at 0");
  if (!br.locally_bounded) fail(st_bd, "bound", "f is not locally bounded on the sampled range");
  for (const auto& bp : br.points)
    if (!(bp.norm <= bp.bound + 1e-12))
      fail(st_bd, "bound", "||g(x)|| = " + fmt(bp.norm) + " exceeds f(" + fmt(bp.value) +
                               ") = " + fmt(bp.bound) + " at point " + std::to_string(bp.point),
           bp.norm - bp.bound);
  res.stages.push_back(st_bd);

  Stage st_ks{"kernel_split"};
  KernelSplit ks;
  try {
    ks = kernel_split(s, tol);
    st_ks.residuals["kernel_angle"] = ks.kernel_angle;
    st_ks.residuals["zero_dim"] = static_cast<double>(ks.v2.cols());
  } catch (const Error& e) {
    fail(st_ks, "error", e.what());
  }
  res.stages.push_back(st_ks);
  if (!st_ks.pass) return res;

  Stage st_or{"orthogonality"};
  double gram = (ks.v1.cols() && ks.v2.cols()) ? (ks.v1.transpose() * ks.v2).cwiseAbs().maxCoeff() : 0.0;
  st_or.residuals["gram_offdiag"] = gram;
  if (gram > tol.recover) {
    // Witness: v in V1 with the largest component in V2, w = v - p(v).
    Eigen::JacobiSVD<Mat> svd(ks.v2.transpose() * ks.v1, Eigen::ComputeFullV);
    Vec v = ks.v1 * svd.matrixV().col(0);
    Vec w = v - ks.v2 * (ks.v2.transpose() * v);
    double limit = v.norm() / w.norm();
    st_or.residuals["limit_ratio"] = limit;
    size_t smallest = s.size();
    for (size_t i = 0; i < s.size(); ++i)
      if (s.points[i].value() > 0 && (smallest == s.size() || s.points[i].value() < s.points[smallest].value()))
        smallest = i;
    std::string detail = "V1 and V2 are not orthogonal; w = v - p_V2(v) has ||g(x)w||/||w|| -> " +
                         fmt(limit) + " > 1 as x -> 0, contradicting ||g(x)|| <= f(x) with f(0+) = 1";
    if (smallest < s.size()) {
      double x = to_double(s.points[smallest].value());
      double ratio = (s.samples[smallest].to_real() * w).norm() / w.norm();
      st_or.residuals["witness_ratio"] = ratio;
      st_or.residuals["witness_bound"] = f(x);
      detail += "; at x = " + fmt(x) + " the ratio is " + fmt(ratio) + " against f(x) = " + fmt(f(x));
    }
    fail(st_or, "bound-violation", detail, limit);
  }
  res.stages.push_back(st_or);
  if (!res.pass) return res;

  StructureResult inner = structure(ks.invertible, f, tol);
  for (auto& st : inner.stages) res.stages.push_back(st);
  for (auto& vio : inner.violations) res.violations.push_back(vio);
  res.pass = res.pass && inner.pass;
  res.components = inner.components;
  res.generators = inner.generators;

  const Mat& v1 = ks.v1;
  res.m = v1 * inner.m * v1.transpose();
  for (size_t x = 0; x < s.size(); ++x) {
    Mat sx = v1 * (x < inner.s.size() ? inner.s[x] : Mat::Identity(v1.cols(), v1.cols())) * v1.transpose();
    res.s.push_back(sx);
  }
  for (auto& b : inner.blocks) {
    b.basis = v1 * b.basis;
    if (b.u) b.u = Mat(v1 * *b.u);
    res.blocks.push_back(std::move(b));
  }
  if (ks.v2.cols() > 0) {
    StructureBlock z;
    z.tag = "zero";
    z.dim = static_cast<int>(ks.v2.cols());
    z.basis = ks.v2;
    res.blocks.push_back(std::move(z));
  }
  if (!inner.pass || inner.s.empty()) {
    if (inner.s.empty() && v1.cols() == 0) {
      // Pure zero part: reconstruction is g(0) = id and 0 elsewhere.
    } else {
      return res;
    }
  }
  double recon = 0;
  for (size_t x = 0; x < s.size(); ++x) {
    double val = to_double(s.points[x].value());
    Mat rebuilt = res.s[x] * mat_exp(res.m * val);
    if (s.points[x].is_zero()) rebuilt = Mat::Identity(d, d);
    else rebuilt = v1 * (v1.transpose() * rebuilt * v1) * v1.transpose();
    Mat gx = s.samples[x].to_real();
    recon = std::max(recon, scaled((rebuilt - gx).norm(), gx.norm()));
  }
  res.reconstruction = recon;
  Stage st_all{"reconstruction"};
  st_all.residuals["max"] = recon;
  if (recon > tol.recover) fail(st_all, "reconstruction", "classification does not reproduce the samples", recon);
  res.stages.push_back(st_all);
  return res;
}

}  // namespace matsg
