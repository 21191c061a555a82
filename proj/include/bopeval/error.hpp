#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bopeval {

// Bad or inconsistent input data (files, arguments, submissions). Maps to
// exit code 1 in the CLI.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A broken internal invariant. Maps to exit code 2 in the CLI.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Warnings go through a process-wide sink so the CLI can route them to stderr
// and tests can capture them.
using WarningSink = std::function<void(std::string_view)>;

void warn(std::string_view message);

// Installs a new sink and returns the previous one. An empty sink restores
// the default (stderr).
WarningSink set_warning_sink(WarningSink sink);

}  // namespace bopeval
