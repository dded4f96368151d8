// UTF-8 helpers backed by ICU.
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace emocnn::detail {

/// Extended grapheme clusters, as views into `text`.
std::vector<std::string_view> grapheme_clusters(std::string_view text);

/// Full Unicode lowercase mapping.
std::string to_lower_utf8(std::string_view text);

/// Code points of `text`; malformed bytes decode to U+FFFD.
std::vector<char32_t> decode_utf8(std::string_view text);
void append_utf8(std::string& out, char32_t cp);

}  // namespace emocnn::detail
