#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace crisislens {

struct PrepConfig {
  std::set<std::string> stopwords;  // lowercase
  bool remove_mentions = true;
  std::size_t min_token_len = 2;
};

// Stopword file: one token per line, '#' comment lines. Entries are lowercased.
std::set<std::string> load_stopwords(const std::filesystem::path& path);

using Tokens = std::vector<std::string>;

// Tweet cleanup, applied in this order: URLs, @mentions (optional), whole
// hashtags, non-ASCII bytes, punctuation to whitespace, all-digit tokens,
// lowercasing, whitespace split, stopwords, short tokens.
Tokens preprocess(std::string_view text, const PrepConfig& config);

class Vocabulary {
public:
  Vocabulary() = default;
  // Terms must be sorted and unique; document_frequency is parallel to terms.
  Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> document_frequency);

  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  std::optional<std::uint32_t> index_of(std::string_view term) const;
  const std::string& term(std::uint32_t index) const { return terms_.at(index); }
  std::size_t document_frequency(std::uint32_t index) const { return df_.at(index); }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::size_t>& document_frequencies() const { return df_; }

private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Keeps terms occurring in at least min_df distinct documents; indices follow
// sorted term order.
Vocabulary build_vocabulary(const std::vector<Tokens>& docs, std::size_t min_df);

struct BowVector {
  // Strictly increasing indices, counts >= 1.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;

  bool empty() const { return entries.empty(); }
  bool operator==(const BowVector&) const = default;
};

BowVector vectorize(const Tokens& tokens, const Vocabulary& vocab);

// Expands a vector back into its token multiset, in index order.
Tokens devectorize(const BowVector& vec, const Vocabulary& vocab);

}  // namespace crisislens
