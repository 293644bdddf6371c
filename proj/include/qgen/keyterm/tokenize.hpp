#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace qgen::keyterm {

struct Token {
  std::string text;        // case-folded
  std::size_t begin = 0;   // byte span in the source text
  std::size_t end = 0;
  bool joined = false;     // separated from the previous token by whitespace only
};

// Maximal runs of letters/digits, case-folded, with their source spans.
std::vector<Token> tokenize_terms(std::string_view text);

using StopwordSet = std::unordered_set<std::string>;

const StopwordSet& default_stopwords();

// One word per line; '#' starts a comment.
StopwordSet load_stopwords(const std::filesystem::path& path);

}  // namespace qgen::keyterm
