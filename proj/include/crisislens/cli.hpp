#pragma once

namespace crisislens {

// Command-line entry point. Returns 0 on success, 1 on configuration or
// runtime failure (one diagnostic line on stderr), 2 on usage errors.
int run(int argc, const char* const* argv);

}  // namespace crisislens
