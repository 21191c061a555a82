#include "bopeval/error.hpp"

#include <iostream>
#include <mutex>

namespace bopeval {
namespace {

std::mutex g_sink_mutex;
WarningSink g_sink;

}  // namespace

void warn(std::string_view message) {
  std::lock_guard lock(g_sink_mutex);
  if (g_sink) {
    g_sink(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

WarningSink set_warning_sink(WarningSink sink) {
  std::lock_guard lock(g_sink_mutex);
  WarningSink previous = std::move(g_sink);
  g_sink = std::move(sink);
  return previous;
}

}  // namespace bopeval
