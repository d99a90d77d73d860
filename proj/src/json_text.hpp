#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace teaming::detail {

// Parses text, mapping syntax errors to ParseError with a 1-based line and
// column. `what` names the input in the message.
nlohmann::ordered_json parse_json_text(std::string_view text, const std::string& what);

}  // namespace teaming::detail
