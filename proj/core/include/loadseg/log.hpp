#pragma once

#include <functional>
#include <string_view>

namespace loadseg {

using WarningSink = std::function<void(std::string_view)>;

// Installs the sink that receives library warnings; the default writes to
// stderr. Passing an empty function silences warnings.
void set_warning_sink(WarningSink sink);

void warn(std::string_view message);

}  // namespace loadseg
