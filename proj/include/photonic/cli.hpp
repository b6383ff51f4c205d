#pragma once

#include <string>
#include <vector>

// Command-line front end. Exit codes: 0 success, 1 domain/runtime error
// from the library, 2 usage error.
namespace photonic::cli {

int run(int argc, const char* const* argv);

/// Same entry point on pre-split arguments (no program name).
int run(const std::vector<std::string>& args);

}  // namespace photonic::cli
