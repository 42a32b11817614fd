#include "matsg/generate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "matsg/error.hpp"

namespace matsg {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// Truncate to a short decimal so that models written as JSON read back
// bit-identically.
double tidy(double v) { return std::round(v * 1e6) / 1e6; }

// Rates at least `gap` apart in [-1, 1].
double fresh_rate(Rng& rng, std::vector<double>& used, double gap = 0.1) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    double a = tidy(uniform(rng, -1.0, 1.0));
    if (std::all_of(used.begin(), used.end(), [&](double u) { return std::abs(u - a) >= gap; })) {
      used.push_back(a);
      return a;
    }
  }
  throw Error("could not draw separated rates");
}

// Real 2x2 form of z: Re z * id + Im z * L.
Mat complex_form(double re, double im) {
  Mat m(2, 2);
  m << re, im, -im, re;
  return m;
}


}  // namespace

Mat random_orthogonal(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal;
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) *= -1;
  return q;
}

GeneratedModel random_model(std::uint64_t seed, const GeneratorOptions& opt) {
  Rng rng(seed);
  BasisPtr basis = ModuleBasis::from_expressions({"1", "sqrt(2)", "sqrt(3)"});
  const int d = uniform_int(rng, opt.min_dim, opt.max_dim);
  std::vector<double> rates;
  std::vector<Block> blocks;
  int remaining = d, zero_dim = 0, plain_dim = 0;
  std::vector<int> rot_dims;
  while (remaining > 0) {
    int choice = uniform_int(rng, 0, 9);
    if (choice == 0 && opt.allow_zero && zero_dim == 0) {
      zero_dim = std::min(remaining, uniform_int(rng, 1, 2));
      blocks.push_back(ZeroBlock{zero_dim});
      remaining -= zero_dim;
    } else if (choice <= 4 && opt.allow_rotating && remaining >= 2) {
      int k = (remaining >= 4 && uniform_int(rng, 0, 2) == 0) ? 4 : 2;
      double a = fresh_rate(rng, rates);
      double c = tidy(uniform(rng, -1.0, 1.0));
      Mat m = Mat::Zero(k, k);
      m.block(0, 0, 2, 2) = complex_form(a, c);
      if (k == 4) {
        m.block(2, 2, 2, 2) = complex_form(a, c);
        m.block(0, 2, 2, 2) = complex_form(tidy(uniform(rng, 0.3, 1.0)), tidy(uniform(rng, -1.0, 1.0)));
      }
      std::vector<Real> nu;
      for (size_t i = 0; i < basis->size(); ++i) nu.push_back(Real(tidy(uniform(rng, -3.0, 3.0))));
      CauchySolution sol = CauchySolution::real(basis, nu);
      if (is_linear(sol)) continue;
      blocks.push_back(RotatingBlock{Matrix(m), sol, std::nullopt});
      rot_dims.push_back(k);
      remaining -= k;
    } else if (opt.allow_plain) {
      int kind = uniform_int(rng, 0, 2);
      if (remaining < 2) kind = 0;
      double a = fresh_rate(rng, rates);
      Mat m;
      if (kind == 0) {
        m = Mat::Constant(1, 1, a);
      } else if (kind == 1) {
        m = a * Mat::Identity(2, 2);
        m(0, 1) = tidy(uniform(rng, 0.3, 1.0));
      } else {
        m = complex_form(a, tidy(uniform(rng, 0.2, 1.0) * (uniform_int(rng, 0, 1) ? 1 : -1)));
      }
      blocks.push_back(PlainBlock{Matrix(m)});
      plain_dim += static_cast<int>(m.rows());
      remaining -= static_cast<int>(m.rows());
    }
  }
  Mat q = random_orthogonal(d, seed ^ 0x9e3779b97f4a7c15ULL);
  GeneratedModel out{SemigroupModel(basis, ScalarMode::real, std::move(blocks), Matrix(q)), zero_dim, {}, {}};
  if (plain_dim > 0) out.block_dims.push_back(plain_dim);
  for (int k : rot_dims) out.block_dims.push_back(k);
  if (zero_dim > 0) out.block_dims.push_back(zero_dim);
  std::sort(out.block_dims.begin(), out.block_dims.end());
  out.rates = rates;
  std::sort(out.rates.begin(), out.rates.end());
  return out;
}

GeneratedModel random_exact_model(std::uint64_t seed, bool rotating) {
  Rng rng(seed);
  BasisPtr basis = rotating ? ModuleBasis::from_expressions({"1", "sqrt(2)"})
                            : ModuleBasis::from_expressions({"1"});
  AngleUnit unit{Rational(3, 5), Rational(4, 5)};
  const int d = uniform_int(rng, 2, 6);
  std::vector<Block> blocks;
  int remaining = d, zero_dim = 0;
  std::vector<int> dims;
  while (remaining > 0) {
    int choice = uniform_int(rng, 0, 5);
    if (choice == 0 && zero_dim == 0) {
      zero_dim = 1;
      blocks.push_back(ZeroBlock{1});
      remaining -= 1;
    } else if (rotating && choice <= 3 && remaining >= 2) {
      std::vector<Rational> nu;
      for (size_t i = 0; i < basis->size(); ++i) nu.push_back(Rational(8 * uniform_int(rng, -3, 3)));
      if (nu[0] == 0 && nu[1] == 0) nu[1] = 8;
      blocks.push_back(RotatingBlock{Matrix(RatMatrix(2, 2)),
                                     CauchySolution::exact(basis, nu, unit.angle(), "atan(4/3)"), unit});
      dims.push_back(2);
      remaining -= 2;
    } else {
      int k = std::min(remaining, uniform_int(rng, 1, 3));
      RatMatrix m(k, k);
      if (!rotating)
        for (int i = 0; i < k; ++i)
          for (int j = i + 1; j < k; ++j) m(i, j) = Rational(uniform_int(rng, -4, 4), uniform_int(rng, 1, 3));
      blocks.push_back(PlainBlock{Matrix(m)});
      dims.push_back(k);
      remaining -= k;
    }
  }
  RatMatrix a(d, d);
  if (rotating || zero_dim > 0) {
    // Signed permutation: rotating and zero blocks must stay orthogonal.
    std::vector<int> perm(d);
    for (int i = 0; i < d; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < d; ++i) a(i, perm[i]) = Rational(uniform_int(rng, 0, 1) ? 1 : -1);
  } else {
    a = RatMatrix::identity(d);
  }
  // Unimodular shears within the single unipotent component.
  for (int step = 0; !(rotating || zero_dim > 0) && step < 2 * d; ++step) {
    int i = uniform_int(rng, 0, d - 1), j = uniform_int(rng, 0, d - 1);
    if (i == j) continue;
    int c = uniform_int(rng, -2, 2);
    for (int col = 0; col < d; ++col) a(i, col) += Rational(c) * a(j, col);
  }
  GeneratedModel out{SemigroupModel(basis, ScalarMode::exact, std::move(blocks), Matrix(a)), zero_dim, dims, {}};
  std::sort(out.block_dims.begin(), out.block_dims.end());
  return out;
}

}  // namespace matsg
