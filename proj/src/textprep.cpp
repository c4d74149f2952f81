#include "crisislens/textprep.hpp"

#include <algorithm>
#include <map>

#include "crisislens/common.hpp"
#include "crisislens/io.hpp"

namespace crisislens {

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::set<std::string> words;
  for (const auto& w : read_word_list(path)) words.insert(to_lower_ascii(w));
  return words;
}

namespace {

bool is_ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool is_word_byte(char c) {
  return is_ascii_alnum(c) || c == '_' || static_cast<unsigned char>(c) >= 0x80;
}

bool starts_with_ci(std::string_view text, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > text.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char c = text[pos + i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != prefix[i]) return false;
  }
  return true;
}

std::string strip_urls(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (starts_with_ci(text, i, "http://") || starts_with_ci(text, i, "https://") ||
        starts_with_ci(text, i, "www.")) {
      while (i < text.size() && !is_space(text[i])) ++i;
      out += ' ';
      continue;
    }
    out += text[i++];
  }
  return out;
}

// Removes `marker` followed by a run of word bytes when the marker starts a
// token (a lone marker, or one inside a word as in an e-mail address, stays).
std::string strip_marked(std::string_view text, char marker) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] == marker && (i == 0 || !is_word_byte(text[i - 1])) && i + 1 < text.size() &&
        is_word_byte(text[i + 1])) {
      ++i;
      while (i < text.size() && is_word_byte(text[i])) ++i;
      out += ' ';
      continue;
    }
    out += text[i++];
  }
  return out;
}

bool all_digits(std::string_view tok) {
  return !tok.empty() && std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

Tokens preprocess(std::string_view text, const PrepConfig& config) {
  std::string s = strip_urls(text);
  if (config.remove_mentions) s = strip_marked(s, '@');
  s = strip_marked(s, '#');
  std::erase_if(s, [](char c) { return static_cast<unsigned char>(c) >= 0x80; });
  for (char& c : s)
    if (!is_ascii_alnum(c) && !is_space(c)) c = ' ';

  Tokens tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i == start) break;
    std::string_view tok(s.data() + start, i - start);
    if (all_digits(tok)) continue;
    std::string lower = to_lower_ascii(tok);
    if (config.stopwords.count(lower)) continue;
    if (lower.size() < config.min_token_len) continue;
    tokens.push_back(std::move(lower));
  }
  return tokens;
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> document_frequency)
    : terms_(std::move(terms)), df_(std::move(document_frequency)) {
  if (terms_.size() != df_.size()) throw DataError("vocabulary terms and frequencies differ in length");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && !(terms_[i - 1] < terms_[i])) throw DataError("vocabulary terms must be sorted and unique");
    index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
  }
}

std::optional<std::uint32_t> Vocabulary::index_of(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocabulary(const std::vector<Tokens>& docs, std::size_t min_df) {
  if (min_df < 1) throw DataError("min_df must be >= 1");
  std::map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    std::vector<std::string_view> distinct(doc.begin(), doc.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (auto t : distinct) ++df[std::string(t)];
  }
  std::vector<std::string> terms;
  std::vector<std::size_t> freqs;
  for (auto& [term, n] : df) {
    if (n < min_df) continue;
    terms.push_back(term);
    freqs.push_back(n);
  }
  return Vocabulary(std::move(terms), std::move(freqs));
}

BowVector vectorize(const Tokens& tokens, const Vocabulary& vocab) {
  std::vector<std::uint32_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens)
    if (auto idx = vocab.index_of(t)) ids.push_back(*idx);
  std::sort(ids.begin(), ids.end());
  BowVector vec;
  for (std::size_t i = 0; i < ids.size();) {
    std::size_t j = i;
    while (j < ids.size() && ids[j] == ids[i]) ++j;
    vec.entries.emplace_back(ids[i], static_cast<std::uint32_t>(j - i));
    i = j;
  }
  return vec;
}

Tokens devectorize(const BowVector& vec, const Vocabulary& vocab) {
  Tokens out;
  for (auto [idx, count] : vec.entries)
    for (std::uint32_t c = 0; c < count; ++c) out.push_back(vocab.term(idx));
  return out;
}

}  // namespace crisislens
