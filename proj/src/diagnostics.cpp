#include "gaussbv/diagnostics.hpp"

#include <iostream>

namespace gaussbv {

namespace {

WarningHandler& handler() {
  static WarningHandler h = [](const std::string& msg) {
    std::cerr << "gaussbv: warning: " << msg << '\n';
  };
  return h;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler next) {
  WarningHandler prev = std::move(handler());
  handler() = std::move(next);
  return prev;
}

void warn(const std::string& message) {
  if (handler()) handler()(message);
}

}  // namespace gaussbv
