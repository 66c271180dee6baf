#pragma once

// The `pruw` command line. Lives in the library so tests can drive it.
// Exit codes: 0 ok, 2 input error, 3 invariant violation, 4 privacy failure.

#include <iosfwd>
#include <string>
#include <vector>

#include "pruw/error.hpp"
#include "pruw/rational.hpp"

namespace pruw {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInvariant = 3;
inline constexpr int kExitPrivacy = 4;

int exit_code_for(ErrorCode code);

// Tokens such as "0.37", "37/100" or "0.37x5" (five copies); tokens may
// also be comma separated.
std::vector<Rational> parse_mu_list(const std::vector<std::string>& tokens);

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pruw
