#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "compmodel/zoo.hpp"

namespace compmodel {

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

// Runs one command; `args` excludes the program name. Results go to `out`
// as JSON (render without --out writes DOT instead).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// A path to a model file, or a fixture name looked up in $COMPMODEL_FIXTURES,
// then ./fixtures, then among the built-in fixtures.
ZooModel resolve_model(const std::string& ref);

}  // namespace compmodel
