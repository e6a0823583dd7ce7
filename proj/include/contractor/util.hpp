#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/evp.h>

namespace contractor {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  // Machine-readable error class, e.g. "MalformedTemplate".
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define CONTRACTOR_ERROR(Name)                                      \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  }

CONTRACTOR_ERROR(MalformedTemplate);
CONTRACTOR_ERROR(UnknownSection);
CONTRACTOR_ERROR(InternalInconsistency);
CONTRACTOR_ERROR(PathViolation);
CONTRACTOR_ERROR(StalePatch);
CONTRACTOR_ERROR(ContextOverflow);
CONTRACTOR_ERROR(ParseError);
CONTRACTOR_ERROR(SynthesisFailure);
CONTRACTOR_ERROR(MissingTranscriptEntry);
CONTRACTOR_ERROR(ScoreRangeError);
CONTRACTOR_ERROR(RatioUndefined);
CONTRACTOR_ERROR(ConfigError);

#undef CONTRACTOR_ERROR

class BackendError : public Error {
 public:
  explicit BackendError(const std::string& message) : Error("BackendError", message) {}

 protected:
  BackendError(std::string kind, const std::string& message) : Error(std::move(kind), message) {}
};

// Raised by a backend when a request exceeds its deadline.
class BackendTimeout : public BackendError {
 public:
  explicit BackendTimeout(const std::string& message) : BackendError("BackendTimeout", message) {}
};

namespace text {

// Splits on '\n'. A trailing newline does not produce an empty last line;
// carriage returns before the newline are dropped.
inline std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto nl = s.find('\n', pos);
    auto end = nl == std::string_view::npos ? s.size() : nl;
    auto line = s.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.emplace_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

inline std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

inline std::string_view trim_view(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::string trim(std::string_view s) { return std::string(trim_view(s)); }

inline std::string rtrim(std::string_view s) {
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return std::string(s);
}

inline bool is_blank(std::string_view s) { return trim_view(s).empty(); }

inline bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

inline std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  if (from.empty()) return s;
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

// Drops blank lines from both ends.
inline std::vector<std::string> trim_blank_edges(std::vector<std::string> lines) {
  auto first = std::find_if(lines.begin(), lines.end(), [](const auto& l) { return !is_blank(l); });
  lines.erase(lines.begin(), first);
  while (!lines.empty() && is_blank(lines.back())) lines.pop_back();
  return lines;
}

inline bool is_ident_start(char c) { return c == '_' || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
inline bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !is_ident_start(s.front())) return false;
  return std::all_of(s.begin(), s.end(), is_ident_char);
}

// Strict UTF-8 well-formedness check (no overlongs, no surrogates).
inline bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t n = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) { ++i; continue; }
    if ((c & 0xE0) == 0xC0) { n = 1; cp = c & 0x1F; }
    else if ((c & 0xF0) == 0xE0) { n = 2; cp = c & 0x0F; }
    else if ((c & 0xF8) == 0xF0) { n = 3; cp = c & 0x07; }
    else return false;
    for (std::size_t k = 1; k <= n; ++k) {
      if (i + k >= s.size()) return false;
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if ((n == 1 && cp < 0x80) || (n == 2 && cp < 0x800) || (n == 3 && cp < 0x10000)) return false;
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += n + 1;
  }
  return true;
}

}  // namespace text

inline std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
    throw Error("HashError", "sha256 computation failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

// Default token estimator: bytes / 4, rounded up.
inline std::size_t estimate_tokens(std::string_view s) { return (s.size() + 3) / 4; }

}  // namespace contractor
