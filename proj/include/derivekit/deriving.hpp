// Common result type for the three derivation plugins.
#pragma once

#include <string>
#include <variant>
#include <vector>

#include "derivekit/env.hpp"

namespace derivekit {

// A named derivation output: a checked definition or inductive, any
// auxiliary inductives it forced into the environment (registered before
// the main payload), and non-fatal warnings.
struct derived_def {
	std::string dname;
	std::variant<std::monostate, definition, inductive_decl> payload;
	bool checked = false;
	std::vector<inductive_decl> forced;
	std::vector<std::string> warnings;
	// one (constructor, argument position) entry per generated subterm rule
	std::vector<std::pair<std::string, std::size_t>> rule_provenance;
};

} // namespace derivekit
