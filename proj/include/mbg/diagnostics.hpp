#pragma once

#include <functional>
#include <string>

namespace mbg {

// Soft precondition warnings ("outside the regime where the bound is proved")
// go through here. Default sink writes to stderr.
using WarningSink = std::function<void(const std::string&)>;

void warn(const std::string& message);
WarningSink set_warning_sink(WarningSink sink);

}  // namespace mbg
