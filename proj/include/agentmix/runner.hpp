#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "agentmix/scenario.hpp"

namespace agentmix {

enum class OutputFormat { Json, Csv };

struct RunOptions {
  EvalOptions eval = default_eval_options();
  /// Overrides the scenario-level seed.
  std::optional<std::uint64_t> seed;
  OutputFormat format = OutputFormat::Json;
};

struct CheckOutcome {
  std::string name;
  Verdict verdict = Verdict::Pass;
  ojson report;
};

/// Runs one declared check. Never throws for failures inside the check:
/// those become an "error" verdict carrying the error code and message.
CheckOutcome run_check(const Scenario& s, const ojson& check, const RunOptions& options);

/// Runs every check in declaration order (or only the named one), writing
/// one compact JSON object per line (or CSV rows). Returns 0 when every
/// check passes, 1 otherwise. Throws UnknownName for an unknown `only`.
int run_scenario(const Scenario& s, const RunOptions& options, std::ostream& out,
                 const std::optional<std::string>& only = std::nullopt);

/// Exit code for an Error escaping validation or lookup: always 2.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInvalid = 2;

}  // namespace agentmix
