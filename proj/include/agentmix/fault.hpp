#pragma once

#include <optional>
#include <string_view>

namespace agentmix::fault {

/// Catalogued implementation defects that can be seeded into freshly built
/// combinators. Used by mutation tests to show the law checkers have teeth.
/// Objects capture the active defect at construction; later changes do not
/// affect them.
enum class Defect {
  None,
  NonUniformFallback,       // mixture fallback puts all mass on the first symbol
  UnnormalizedWeights,      // weight vectors skip the sum-to-one validation
  MissingBayesDenominator,  // mixture act skips the division by w.P(h)
  DualSkipsNegation,        // dual agents/environments forget to negate rewards
  TailBoundHalved,          // environment families report half their tail bound
};

Defect active();

std::string_view to_string(Defect d);
std::optional<Defect> parse_defect(std::string_view name);

/// Sets the active defect for the current thread for the lifetime of the
/// object.
class ScopedDefect {
 public:
  explicit ScopedDefect(Defect d);
  ~ScopedDefect();
  ScopedDefect(const ScopedDefect&) = delete;
  ScopedDefect& operator=(const ScopedDefect&) = delete;

 private:
  Defect previous_;
};

}  // namespace agentmix::fault
