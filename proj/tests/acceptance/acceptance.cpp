// One line per acceptance criterion; exit status 1 when any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>

#include "../oracles/jc_oracle.hpp"
#include "matsg/decomp.hpp"
#include "matsg/gaussmarkov.hpp"
#include "matsg/generate.hpp"

using namespace matsg;
namespace mp = boost::multiprecision;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& title, const std::string& detail) {
  std::printf("%s  %d. %s: %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Runs a criterion; an escaping exception counts as a failure.
void criterion(int id, const std::string& title, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    auto [ok, detail] = body();
    report(id, ok, title, detail);
  } catch (const std::exception& e) {
    report(id, false, title, std::string("exception: ") + e.what());
  }
}

constexpr int kModels = 50;

struct RoundTrip {
  GeneratedModel gen;
  SampleSet samples;
  StructureResult result;
  double seconds = 0;
};

std::vector<RoundTrip> round_trips;

// exp(kx) with k an integer above the largest sampled log-norm rate.
BoundFunction growth_bound(const SampleSet& s) {
  double rate = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    double x = to_double(s.points[i].value());
    if (x > 0) rate = std::max(rate, std::log(std::max(operator_norm(s.samples[i].to_real()), 1e-300)) / x);
  }
  return BoundFunction::from_expression("exp(" + std::to_string(static_cast<int>(std::ceil(rate)) + 1) + "x)");
}

void run_round_trips() {
  for (int seed = 0; seed < kModels; ++seed) {
    RoundTrip rt{random_model(static_cast<std::uint64_t>(seed)), {}, {}, 0};
    auto t0 = Clock::now();
    rt.samples = sample(rt.gen.model);
    rt.result = classify(rt.samples, growth_bound(rt.samples));
    rt.seconds = seconds_since(t0);
    round_trips.push_back(std::move(rt));
  }
}

// Largest Gram entry between the zero block and the other blocks.
double zero_gram(const StructureResult& r) {
  double worst = 0;
  for (const auto& z : r.blocks) {
    if (z.tag != "zero") continue;
    for (const auto& b : r.blocks)
      if (b.tag != "zero" && b.basis.cols() > 0)
        worst = std::max(worst, (z.basis.transpose() * b.basis).cwiseAbs().maxCoeff());
  }
  return worst;
}

RatMatrix from_oracle(const oracle::QMat& q) {
  std::vector<std::vector<Rational>> rows;
  for (const auto& r : q) rows.emplace_back(r.begin(), r.end());
  return RatMatrix::from_rows(rows);
}

}  // namespace

int main() {
  // 1. Round-trip classification.
  criterion(1, "round-trip classification of 50 random models", [] {
    auto t0 = Clock::now();
    run_round_trips();
    double total = seconds_since(t0);
    int bad = 0;
    double worst_a = 0, worst_recon = 0;
    size_t min_points = SIZE_MAX;
    std::string first_bad;
    for (size_t i = 0; i < round_trips.size(); ++i) {
      const auto& rt = round_trips[i];
      const auto& r = rt.result;
      min_points = std::min(min_points, rt.samples.size());
      int zero = 0;
      std::vector<int> dims;
      for (const auto& b : r.blocks) {
        dims.push_back(b.dim);
        if (b.tag == "zero") zero = b.dim;
      }
      std::sort(dims.begin(), dims.end());
      std::vector<int> want = rt.gen.block_dims;
      std::sort(want.begin(), want.end());
      std::vector<double> rates;
      for (const auto& g : r.generators) rates.push_back(g.a);
      std::sort(rates.begin(), rates.end());
      bool rates_ok = rates.size() == rt.gen.rates.size();
      for (size_t k = 0; rates_ok && k < rates.size(); ++k) {
        double e = std::abs(rates[k] - rt.gen.rates[k]);
        worst_a = std::max(worst_a, e);
        rates_ok = e <= 1e-8;
      }
      worst_recon = std::max(worst_recon, r.reconstruction);
      bool ok = r.pass && zero == rt.gen.zero_dim && dims == want && rates_ok && r.reconstruction <= 1e-8 &&
                rt.samples.size() >= 12;
      if (!ok) {
        ++bad;
        if (first_bad.empty()) first_bad = " first failing seed " + std::to_string(i);
      }
    }
    bool ok = bad == 0 && total < 60.0;
    return std::make_pair(ok, std::to_string(kModels - bad) + "/" + std::to_string(kModels) +
                                  " recovered, max |a error| " + num(worst_a) + ", max reconstruction " +
                                  num(worst_recon) + ", min points " + std::to_string(min_points) + ", " +
                                  num(total) + " s (limit 60 s)" + first_bad);
  });

  // 2. Semigroup law exactness and fault detection.
  criterion(2, "semigroup law exact at tol 0 (exact) and 1e-9 (real); 1e-3 faults detected", [] {
    int exact_pass = 0, exact_total = 0, real_pass = 0, real_total = 0, faults = 0, caught = 0;
    std::mt19937_64 rng(2024);
    auto inject = [&](SampleSet s, double tol) {
      std::uniform_int_distribution<size_t> pick(0, s.size() - 1);
      size_t i = pick(rng);
      int d = s.dimension();
      std::uniform_int_distribution<int> ent(0, d - 1);
      int r = ent(rng), c = ent(rng);
      if (s.samples[i].is_exact())
        s.samples[i].exact()(r, c) += Rational(1, 1000);
      else
        s.samples[i].real()(r, c) += 1e-3;
      ++faults;
      if (!verify_semigroup(s, tol).pass) ++caught;
    };
    for (int seed = 0; seed < 40; ++seed) {
      auto gm = random_exact_model(static_cast<std::uint64_t>(seed), seed % 2 == 0);
      auto s = sample(gm.model);
      ++exact_total;
      if (verify_semigroup(s, 0.0).pass) ++exact_pass;
      for (int k = 0; k < 5; ++k) inject(s, 0.0);
    }
    for (const auto& rt : round_trips) {
      ++real_total;
      if (verify_semigroup(rt.samples, 1e-9).pass) ++real_pass;
      for (int k = 0; k < 5; ++k) inject(rt.samples, 1e-9);
    }
    bool ok = exact_pass == exact_total && real_pass == real_total && caught == faults;
    return std::make_pair(ok, "exact " + std::to_string(exact_pass) + "/" + std::to_string(exact_total) +
                                  ", real " + std::to_string(real_pass) + "/" + std::to_string(real_total) +
                                  ", faults detected " + std::to_string(caught) + "/" + std::to_string(faults));
  });

  // 3. JC against the exact interpolation oracle.
  criterion(3, "exact Jordan-Chevalley matches the interpolation oracle on 100 matrices", [] {
    int agree = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      auto inst = oracle::random_instance(seed, 5);
      RatMatrix a = from_oracle(inst.a);
      RatMatrix want = from_oracle(oracle::semisimple_part(inst.a, inst.eigen));
      auto p = jc_multiplicative(Matrix(a));
      const RatMatrix& d = p.d.exact();
      const RatMatrix& t = p.t.exact();
      RatMatrix x = t - RatMatrix::identity(a.rows());
      bool ok = d == want && d * t == a && t * d == a && x.pow(static_cast<unsigned>(a.rows())).is_zero();
      if (ok) ++agree;
    }
    return std::make_pair(agree == 100, std::to_string(agree) + "/100 exact agreements");
  });

  // 4. Jordan-Chevalley semigroup identities.
  criterion(4, "D, T and N identities on sampled pairs at most 1e-9", [] {
    std::map<std::string, double> worst;
    int models = 0;
    auto absorb = [&](const SampleSet& s) {
      auto inv = kernel_split(s).invertible;
      if (inv.dimension() == 0) return;
      auto jc = semigroup_jc(inv);
      ++models;
      for (const auto& c : jc.checks) worst[c.name] = std::max(worst[c.name], c.max_residual);
    };
    for (const auto& rt : round_trips) absorb(rt.samples);
    for (int seed = 0; seed < 10; ++seed) absorb(sample(random_exact_model(static_cast<std::uint64_t>(seed), seed % 2).model));
    bool ok = models > 0;
    std::string detail = std::to_string(models) + " models;";
    for (const char* name : {"D(x)D(y)=D(x+y)", "T(x)T(y)=T(x+y)", "T(x)D(y)=D(y)T(x)", "N(x)+N(y)=N(x+y)"}) {
      auto it = worst.find(name);
      double v = it == worst.end() ? -1 : it->second;
      ok = ok && v >= 0 && v <= 1e-9;
      detail += std::string(" ") + name + " " + num(v);
    }
    return std::make_pair(ok, detail);
  });

  // 5. Rotation normal form.
  criterion(5, "rotation normal form on 20 orthogonal conjugations", [] {
    auto b = ModuleBasis::from_expressions({"1", "sqrt(2)", "sqrt(3)"});
    double worst_orth = 0, worst_rec = 0;
    int good = 0;
    std::mt19937_64 rng(55);
    std::normal_distribution<double> nd;
    for (int k = 0; k < 20; ++k) {
      int d = 2 * (1 + k % 3);
      auto nu = CauchySolution::real(b, {Real(nd(rng)), Real(nd(rng)), Real(nd(rng))});
      Mat r = random_orthogonal(d, 1000 + static_cast<std::uint64_t>(k));
      auto s = sample(build_elementary(b, Matrix(Mat(Mat::Zero(d, d))), nu, Matrix(r)));
      std::vector<Mat> sx;
      std::vector<Real> eta;
      for (size_t i = 0; i < s.size(); ++i) {
        sx.push_back(s.samples[i].real());
        eta.push_back(nu.evaluate(s.points[i]));
      }
      auto nf = rotation_normal_form(sx, eta);
      double orth = (nf.u * nf.u.transpose() - Mat::Identity(d, d)).norm();
      double rec = 0;
      for (size_t i = 0; i < sx.size(); ++i)
        rec = std::max(rec, (nf.u * rotation_block(d, eta[i]) * nf.u.transpose() - sx[i]).norm());
      worst_orth = std::max(worst_orth, orth);
      worst_rec = std::max(worst_rec, rec);
      if (orth <= 1e-10 && rec <= 1e-8) ++good;
    }
    return std::make_pair(good == 20, std::to_string(good) + "/20, max ||UU^T - id|| " + num(worst_orth) +
                                          ", max reconstruction " + num(worst_rec));
  });

  // 6. pi_sequence.
  criterion(6, "pi_sequence on 10 non-equivalent pairs, 20 terms each", [] {
    auto b = ModuleBasis::from_expressions({"1", "sqrt(2)", "sqrt(3)"});
    std::mt19937_64 rng(66);
    std::uniform_real_distribution<double> ud(-3, 3);
    auto t0 = Clock::now();
    int good = 0;
    Real worst_theta = 0;
    for (int k = 0; k < 10; ++k) {
      auto f = CauchySolution::real(b, {Real(ud(rng)), Real(ud(rng)), Real(ud(rng))});
      auto g = CauchySolution::real(b, {Real(ud(rng)), Real(ud(rng)), Real(ud(rng))});
      auto seq = pi_sequence(f, g, 20);
      const auto& fp = seq.swapped ? g : f;
      bool ok = seq.terms.size() == 20;
      for (int n = 1; ok && n <= 20; ++n) {
        const auto& x = seq.terms[static_cast<size_t>(n - 1)];
        Real bound = Real(1) / n;
        ok = mp::abs(x.value()) <= bound && mp::abs(fp.evaluate(x) - real_pi()) <= bound;
      }
      worst_theta = std::max(worst_theta, Real(mp::abs(seq.theta)));
      ok = ok && mp::abs(seq.theta) < real_pi() - Real("1e-3");
      if (ok) ++good;
    }
    double secs = seconds_since(t0);
    return std::make_pair(good == 10 && secs < 5.0, std::to_string(good) + "/10 sequences within bounds, max |theta| " +
                                                          num(to_double(worst_theta)) + ", " + num(secs) +
                                                          " s (limit 5 s)");
  });

  // 7. Orthogonality of the zero split.
  criterion(7, "zero split orthogonal; oblique split rejected as a bound violation", [] {
    double worst = 0;
    int with_zero = 0;
    for (const auto& rt : round_trips)
      if (rt.gen.zero_dim > 0) {
        ++with_zero;
        worst = std::max(worst, zero_gram(rt.result));
      }
    auto b = ModuleBasis::from_expressions({"1", "sqrt(2)"});
    Mat a(2, 2);
    a << 1, 1, 0, 1;
    auto oblique = conjugate(with_zero_block(build_elementary(b, Matrix(Mat(Mat::Zero(1, 1)))), 1), Matrix(a));
    auto r = classify(sample(oblique), BoundFunction::unit());
    bool rejected = false;
    for (const auto& v : r.violations) rejected = rejected || (v.stage == "orthogonality" && v.kind == "bound-violation");
    bool ok = with_zero > 0 && worst <= 1e-8 && !r.pass && rejected;
    return std::make_pair(ok, std::to_string(with_zero) + " models with a zero block, max Gram " + num(worst) +
                                  ", oblique split " + (rejected ? "rejected with bound-violation" : "NOT rejected"));
  });

  // 8. Gauss-Markov consistency.
  criterion(8, "Markov criterion and semigroup reduction agree", [] {
    std::mt19937_64 rng(88);
    std::uniform_real_distribution<double> ud(0.05, 5.0);
    std::vector<std::array<double, 3>> triples;
    for (int k = 0; k < 100; ++k) {
      std::array<double, 3> t{ud(rng), ud(rng), ud(rng)};
      std::sort(t.begin(), t.end());
      triples.push_back(t);
    }
    auto b = ModuleBasis::from_expressions({"1"});
    auto pts = default_points(b);
    auto min_rep = markov_check(CovarianceModel::min(), triples, 1e-12);
    bool min_sg = verify_semigroup(to_semigroup(CovarianceModel::min(), b, pts), 1e-9).pass;
    auto frac_rep = markov_check(CovarianceModel::fractional(0.7), triples, 1e-9);
    bool frac_sg = verify_semigroup(to_semigroup(CovarianceModel::fractional(0.7), b, pts), 1e-9).pass;
    auto law = markov_triples(pts);
    int agree = 0, total = 0;
    for (const auto& [name, r] : kernel_registry()) {
      ++total;
      if (markov_check(r, law, 1e-9).pass == verify_semigroup(to_semigroup(r, b, pts), 1e-9).pass) ++agree;
    }
    bool ok = min_rep.pass && min_rep.max_residual <= 1e-12 && min_sg && !frac_rep.pass &&
              frac_rep.max_residual > 1e-3 && !frac_sg && agree == total;
    return std::make_pair(ok, "min max residual " + num(min_rep.max_residual) + (min_sg ? ", reduction passes" : ", reduction FAILS") +
                                  "; H=0.7 max residual " + num(frac_rep.max_residual) +
                                  (frac_sg ? ", reduction PASSES" : ", reduction fails") + "; registry verdicts agree " +
                                  std::to_string(agree) + "/" + std::to_string(total));
  });

  // 9. Eigen-track multiplicativity.
  criterion(9, "eigen-track law on every component of the round-trip models", [] {
    double worst = 0;
    size_t comps = 0;
    for (const auto& rt : round_trips) {
      auto inv = kernel_split(rt.samples).invertible;
      for (const auto& c : rt.result.components) {
        ++comps;
        for (size_t i = 0; i < inv.size(); ++i)
          for (size_t j = 0; j < inv.size(); ++j) {
            auto k = inv.find(inv.points[i] + inv.points[j]);
            if (!k) continue;
            Complex rhs = c.track[*k];
            worst = std::max(worst, std::abs(c.track[i] * c.track[j] - rhs) / std::abs(rhs));
          }
      }
    }
    return std::make_pair(comps > 0 && worst <= 1e-9,
                          std::to_string(comps) + " components, max relative error " + num(worst));
  });

  std::printf("%s\n", failures == 0 ? "all acceptance criteria pass" : "some acceptance criteria fail");
  return failures == 0 ? 0 : 1;
}
