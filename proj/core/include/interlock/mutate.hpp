#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "interlock/appdata.hpp"

namespace interlock {

/// Error classes injected into application data.
enum class MutationType {
  a,  // condition removed from a route request
  b,  // point command flipped in a route request
  c,  // subroute lock removed from a route request
  d,  // condition removed from a subroute release
  e,  // condition removed from an immobilisation zone release
  f,  // condition added to a release rule
};

std::string_view to_string(MutationType type);
/// Throws ConfigError for anything but a single letter a..f.
MutationType parse_mutation_type(std::string_view text);
std::vector<MutationType> parse_mutation_types(std::string_view comma_list);

/// `rule:index`. For b and c the index counts only the point commands or
/// subroute locks of the rule; for f it is ignored.
struct RuleLocator {
  std::string rule;
  std::size_t index = 0;

  bool operator==(const RuleLocator&) const = default;
};

std::string to_string(const RuleLocator& locator);
RuleLocator parse_locator(std::string_view text);

/// Parses a single condition `NAME tag`, e.g. `U_CGC_20C f`. Throws
/// ConfigError for an unknown tag or one that does not fit the component.
Condition parse_condition(std::string_view text);

struct MutationSpec {
  MutationType type = MutationType::a;
  RuleLocator target;
  /// Condition added by type f. Defaults to the release target being free,
  /// which can never hold while the target is locked.
  std::optional<Condition> payload;

  bool operator==(const MutationSpec&) const = default;
};

/// Returns a copy of `data` differing only at the target.
/// Throws IncompatibleTarget or NothingToRemove.
ApplicationData apply_mutation(const ApplicationData& data, const MutationSpec& spec);

/// Every applicable spec of `type`, ordered by rule name then index.
std::vector<MutationSpec> enumerate_mutations(const ApplicationData& data, MutationType type);

/// One-line human description, e.g. `a R_CGC_011:3 drops "U_KXC_20C f"`.
std::string describe(const MutationSpec& spec, const ApplicationData& data);

}  // namespace interlock
