#include <CLI11.hpp>
#include <iostream>

#include "matsg/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Matrix semigroup models: generate, verify, classify, markov"};
  app.require_subcommand(1, 1);
  matsg::RunConfig cfg;
  std::optional<double> tol_verify, tol_recover;
  std::optional<std::string> mode, bound;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--in", cfg.in, "input JSON file");
    sub->add_option("--out", cfg.out, "report file (default: stdout)");
    sub->add_option("--tol-verify", tol_verify, "verification tolerance");
    sub->add_option("--tol-recover", tol_recover, "recovery tolerance");
    sub->add_option("--mode", mode, "exact | real")->check(CLI::IsMember({"exact", "real"}));
    sub->add_option("--seed", cfg.seed, "seed for random constructions");
    sub->add_option("--bound", bound, "growth bound f(x), e.g. \"exp(2x)\"");
  };
  common(app.add_subcommand("generate", "random model and its samples"));
  common(app.add_subcommand("verify", "check the semigroup law (and bound) on samples"));
  common(app.add_subcommand("classify", "recover g(x) = S(x) exp(Mx) from samples"));
  common(app.add_subcommand("markov", "Markov criterion of a covariance kernel"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : matsg::kExitUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  cfg.tol_verify = tol_verify;
  cfg.tol_recover = tol_recover;
  cfg.mode = mode;
  cfg.bound = bound;
  return matsg::run(cfg, std::cout, std::cerr);
}
