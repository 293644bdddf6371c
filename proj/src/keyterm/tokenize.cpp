#include "qgen/keyterm/tokenize.hpp"

#include "qgen/chunkstore/store.hpp"
#include "qgen/common/text.hpp"

#include <sstream>

namespace qgen::keyterm {

std::vector<Token> tokenize_terms(std::string_view s) {
  std::vector<Token> out;
  std::size_t pos = 0;
  std::size_t run_begin = 0;
  bool in_run = false;
  bool gap_is_space = false;
  auto close = [&](std::size_t end) {
    Token t;
    t.begin = run_begin;
    t.end = end;
    t.text = text::fold_case(s.substr(run_begin, end - run_begin));
    t.joined = !out.empty() && gap_is_space;
    out.push_back(std::move(t));
    in_run = false;
    gap_is_space = true;
  };
  while (pos < s.size()) {
    const std::size_t start = pos;
    const char32_t cp = text::next_codepoint(s, pos);
    if (text::is_alnum(cp)) {
      if (!in_run) {
        in_run = true;
        run_begin = start;
      }
      continue;
    }
    if (in_run) close(start);
    if (!text::is_space(cp)) gap_is_space = false;
  }
  if (in_run) close(s.size());
  return out;
}

const StopwordSet& default_stopwords() {
  static const StopwordSet words = {
      "a", "about", "above", "after", "again", "against", "all", "also", "am", "an", "and",
      "any", "are", "as", "at", "be", "because", "been", "before", "being", "below",
      "between", "both", "but", "by", "can", "could", "did", "do", "does", "doing", "down",
      "during", "each", "either", "etc", "few", "for", "from", "further", "had", "has",
      "have", "having", "he", "her", "here", "hers", "herself", "him", "himself", "his",
      "how", "however", "i", "if", "in", "into", "is", "it", "its", "itself", "just", "may",
      "me", "might", "more", "most", "must", "my", "myself", "no", "nor", "not", "now", "of",
      "off", "on", "once", "one", "only", "or", "other", "our", "ours", "ourselves", "out",
      "over", "own", "same", "she", "should", "so", "some", "such", "than", "that", "the",
      "their", "theirs", "them", "themselves", "then", "there", "these", "they", "this",
      "those", "through", "thus", "to", "too", "under", "until", "up", "upon", "us", "very",
      "via", "was", "we", "were", "what", "when", "where", "whether", "which", "while",
      "who", "whom", "whose", "why", "will", "with", "within", "without", "would", "yet",
      "you", "your", "yours", "yourself", "yourselves"};
  return words;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::istringstream in(chunkstore::read_file(path));
  StopwordSet out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string word = text::trim(line);
    if (!word.empty()) out.insert(text::fold_case(word));
  }
  return out;
}

}  // namespace qgen::keyterm
