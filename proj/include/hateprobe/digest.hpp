#pragma once

#include <string>
#include <string_view>

namespace hateprobe {

std::string sha256_hex(std::string_view data);

// Content hash of (prompt text, model id, temperature). Fields are length
// prefixed so no two distinct inputs share an encoding.
std::string prompt_digest(std::string_view prompt_text, std::string_view model_id, double temperature);

}  // namespace hateprobe
