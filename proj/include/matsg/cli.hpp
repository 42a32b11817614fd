#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace matsg {

struct RunConfig {
  std::string command;  // generate | verify | classify | markov
  std::string in, out;  // empty out: report goes to the output stream
  std::optional<double> tol_verify, tol_recover;
  std::optional<std::string> mode;  // exact | real
  std::uint64_t seed = 0;
  std::optional<std::string> bound;
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFail = 2;

// Runs one command. Returns 0 on pass, 2 on a failed verification or
// classification, 1 on usage, I/O or parse errors (diagnostic on err).
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace matsg
