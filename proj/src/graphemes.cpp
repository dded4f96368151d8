#include "graphemes.hpp"

#include <memory>
#include <stdexcept>

#include <unicode/ubrk.h>
#include <unicode/ucasemap.h>
#include <unicode/utext.h>
#include <unicode/utf8.h>

namespace emocnn::detail {

namespace {

struct BreakIteratorCloser {
  void operator()(UBreakIterator* bi) const { ubrk_close(bi); }
};
struct UTextCloser {
  void operator()(UText* ut) const { utext_close(ut); }
};
struct CaseMapCloser {
  void operator()(UCaseMap* map) const { ucasemap_close(map); }
};

void check(UErrorCode status, const char* what) {
  if (U_FAILURE(status)) {
    throw std::runtime_error(std::string(what) + ": " + u_errorName(status));
  }
}

}  // namespace

std::vector<std::string_view> grapheme_clusters(std::string_view text) {
  std::vector<std::string_view> clusters;
  if (text.empty()) return clusters;

  UErrorCode status = U_ZERO_ERROR;
  std::unique_ptr<UText, UTextCloser> ut(
      utext_openUTF8(nullptr, text.data(), static_cast<int64_t>(text.size()), &status));
  check(status, "utext_openUTF8");
  std::unique_ptr<UBreakIterator, BreakIteratorCloser> bi(
      ubrk_open(UBRK_CHARACTER, "en", nullptr, 0, &status));
  check(status, "ubrk_open");
  ubrk_setUText(bi.get(), ut.get(), &status);
  check(status, "ubrk_setUText");

  int32_t start = ubrk_first(bi.get());
  for (int32_t end = ubrk_next(bi.get()); end != UBRK_DONE; end = ubrk_next(bi.get())) {
    clusters.push_back(text.substr(static_cast<std::size_t>(start),
                                   static_cast<std::size_t>(end - start)));
    start = end;
  }
  return clusters;
}

std::string to_lower_utf8(std::string_view text) {
  if (text.empty()) return {};
  UErrorCode status = U_ZERO_ERROR;
  std::unique_ptr<UCaseMap, CaseMapCloser> map(ucasemap_open("en", 0, &status));
  check(status, "ucasemap_open");

  std::string out(text.size() + 16, '\0');
  for (int attempt = 0; attempt < 2; ++attempt) {
    status = U_ZERO_ERROR;
    const int32_t len = ucasemap_utf8ToLower(map.get(), out.data(), static_cast<int32_t>(out.size()),
                                             text.data(), static_cast<int32_t>(text.size()), &status);
    if (status == U_BUFFER_OVERFLOW_ERROR) {
      out.assign(static_cast<std::size_t>(len) + 1, '\0');
      continue;
    }
    check(status, "ucasemap_utf8ToLower");
    out.resize(static_cast<std::size_t>(len));
    return out;
  }
  throw std::runtime_error("ucasemap_utf8ToLower: buffer sizing failed");
}

std::vector<char32_t> decode_utf8(std::string_view text) {
  std::vector<char32_t> cps;
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const int32_t length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    cps.push_back(c < 0 ? U'�' : static_cast<char32_t>(c));
  }
  return cps;
}

void append_utf8(std::string& out, char32_t cp) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
  if (error) return;
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

}  // namespace emocnn::detail
