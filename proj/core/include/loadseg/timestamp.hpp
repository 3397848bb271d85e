#pragma once

#include <string>
#include <string_view>

#include "loadseg/types.hpp"

namespace loadseg {

// Parses "YYYY-MM-DDTHH:MM[:SS]" with an optional trailing "Z" or a space
// instead of the "T". Offsets other than UTC are not supported. Throws
// DataError on malformed input.
Timestamp parse_timestamp(std::string_view text);

// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_timestamp(Timestamp t);

}  // namespace loadseg
