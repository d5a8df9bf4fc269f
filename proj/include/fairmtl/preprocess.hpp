#pragma once

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fairmtl {

namespace detail {

inline bool is_space_byte(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (is_space_byte(c)) {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace detail

// Normalizes raw text for featurization:
//   1. ASCII-lowercase.
//   2. Strip http:// and https:// URLs (scheme up to the next whitespace).
//   3. Drop @-mention tokens.
//   4. Keep only ASCII letters, digits, apostrophes, and spaces.
//   5. Drop leading "rt" retweet-marker tokens.
//   6. Collapse whitespace to single spaces and trim.
//
// The mention drop runs before the character filter (step 4 erases '@'),
// and the retweet drop after it (the filter can surface a leading "rt",
// e.g. from "#RT"). With that ordering the function is idempotent.
inline std::string preprocess(std::string_view raw) {
  std::string lower;
  lower.reserve(raw.size());
  for (char c : raw) {
    lower.push_back(static_cast<char>(
        std::tolower(static_cast<unsigned char>(c))));
  }

  // URL removal: erase from "http://"/"https://" through the next space.
  std::string no_urls;
  no_urls.reserve(lower.size());
  for (std::size_t i = 0; i < lower.size();) {
    const std::string_view rest(lower.data() + i, lower.size() - i);
    if (rest.starts_with("http://") || rest.starts_with("https://")) {
      while (i < lower.size() && !detail::is_space_byte(lower[i])) ++i;
      continue;
    }
    no_urls.push_back(lower[i]);
    ++i;
  }

  std::vector<std::string> tokens = detail::split_ws(no_urls);

  std::string filtered;
  for (const std::string& tok : tokens) {
    if (tok.front() == '@') continue;  // mention
    std::string kept;
    for (char c : tok) {
      const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'';
      if (ok) kept.push_back(c);
    }
    if (kept.empty()) continue;
    if (!filtered.empty()) filtered.push_back(' ');
    filtered += kept;
  }

  std::vector<std::string> final_tokens = detail::split_ws(filtered);
  std::size_t start = 0;
  while (start < final_tokens.size() && final_tokens[start] == "rt") ++start;

  std::string out;
  for (std::size_t i = start; i < final_tokens.size(); ++i) {
    if (!out.empty()) out.push_back(' ');
    out += final_tokens[i];
  }
  return out;
}

// Maps a raw annotation score in [0,1] to a binary label; ties at the 0.5
// threshold go to the positive class.
inline int binarize(double raw_score) {
  if (!(raw_score >= 0.0 && raw_score <= 1.0)) {
    throw std::invalid_argument("binarize: score out of [0,1]");
  }
  return raw_score >= 0.5 ? 1 : 0;
}

}  // namespace fairmtl
