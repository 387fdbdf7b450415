#pragma once

#include <functional>
#include <string_view>

namespace keygest {

using WarningHandler = std::function<void(std::string_view)>;

// Default handler prints "keygest: warning: ..." to stderr. Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(std::string_view message);

}  // namespace keygest
