#pragma once

#include <functional>
#include <string>

namespace gaussbv {

using WarningHandler = std::function<void(const std::string&)>;

/// Replaces the warning sink (default: one line on stderr). Returns the
/// previous handler. Not thread-safe; set it once at startup.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(const std::string& message);

}  // namespace gaussbv
