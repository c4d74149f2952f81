#include "crisislens/sentiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "crisislens/io.hpp"

namespace crisislens {

std::string_view to_string(Sentiment5 label) {
  switch (label) {
    case Sentiment5::very_negative: return "very_negative";
    case Sentiment5::negative: return "negative";
    case Sentiment5::neutral: return "neutral";
    case Sentiment5::positive: return "positive";
    case Sentiment5::very_positive: return "very_positive";
  }
  return "neutral";
}

std::string_view to_string(Sentiment3 label) {
  switch (label) {
    case Sentiment3::negative: return "negative";
    case Sentiment3::neutral: return "neutral";
    case Sentiment3::positive: return "positive";
  }
  return "neutral";
}

Sentiment5 parse_sentiment5(std::string_view name) {
  for (auto l : {Sentiment5::very_negative, Sentiment5::negative, Sentiment5::neutral, Sentiment5::positive,
                 Sentiment5::very_positive})
    if (to_string(l) == name) return l;
  throw DataError("unknown sentiment label '" + std::string(name) + "'");
}

namespace {

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '\'';
}

bool has_alnum(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return is_word_char(c) && c != '\''; });
}

}  // namespace

void SentimentLexicon::add(std::string_view token, double polarity) {
  if (has_alnum(token))
    words[to_lower_ascii(token)] = polarity;
  else
    emoticons[std::string(token)] = polarity;
}

void SentimentLexicon::validate() const {
  auto check = [](const auto& m) {
    for (const auto& [k, v] : m)
      if (!(v >= -1.0 && v <= 1.0)) throw DataError("lexicon polarity for '" + k + "' outside [-1, 1]");
  };
  check(words);
  check(emoticons);
}

SentimentLexicon SentimentLexicon::negated() const {
  SentimentLexicon out = *this;
  for (auto& [k, v] : out.words) v = -v;
  for (auto& [k, v] : out.emoticons) v = -v;
  return out;
}

SentimentLexicon load_lexicon(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  SentimentLexicon lex;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line).front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected token<TAB>polarity");
    std::string token(trim(std::string_view(line).substr(0, tab)));
    std::string_view value = trim(std::string_view(line).substr(tab + 1));
    if (token.empty()) throw DataError(path.string() + ":" + std::to_string(lineno) + ": empty token");
    if (value == "NEG") {
      lex.negations.insert(to_lower_ascii(token));
      continue;
    }
    double polarity = 0;
    auto res = std::from_chars(value.data(), value.data() + value.size(), polarity);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": bad polarity '" + std::string(value) + "'");
    if (!(polarity >= -1.0 && polarity <= 1.0))
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": polarity outside [-1, 1]");
    lex.add(token, polarity);
  }
  return lex;
}

Sentiment5 label_for_score(double s, const ScorerConfig& config) {
  if (s >= config.strong_threshold) return Sentiment5::very_positive;
  if (s >= config.weak_threshold) return Sentiment5::positive;
  if (s <= -config.strong_threshold) return Sentiment5::very_negative;
  if (s <= -config.weak_threshold) return Sentiment5::negative;
  return Sentiment5::neutral;
}

std::vector<std::string> sentiment_tokens(std::string_view text, const SentimentLexicon& lexicon) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i == start) break;
    std::string_view chunk = text.substr(start, i - start);
    if (lexicon.emoticons.count(std::string(chunk))) {
      tokens.emplace_back(chunk);
      continue;
    }
    std::size_t j = 0;
    while (j < chunk.size()) {
      while (j < chunk.size() && !is_word_char(chunk[j])) ++j;
      std::size_t ws = j;
      while (j < chunk.size() && is_word_char(chunk[j])) ++j;
      std::string_view word = chunk.substr(ws, j - ws);
      while (!word.empty() && word.front() == '\'') word.remove_prefix(1);
      while (!word.empty() && word.back() == '\'') word.remove_suffix(1);
      if (!word.empty()) tokens.push_back(to_lower_ascii(word));
    }
  }
  return tokens;
}

LexiconScorer::LexiconScorer(SentimentLexicon lexicon, ScorerConfig config)
    : lexicon_(std::move(lexicon)), config_(config) {
  lexicon_.validate();
  if (!(config_.weak_threshold >= 0 && config_.weak_threshold <= config_.strong_threshold))
    throw ConfigError("sentiment thresholds must satisfy 0 <= weak <= strong");
}

SentimentScore LexiconScorer::score(std::string_view text) const {
  auto tokens = sentiment_tokens(text, lexicon_);
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    double polarity;
    if (auto it = lexicon_.words.find(tokens[i]); it != lexicon_.words.end())
      polarity = it->second;
    else if (auto e = lexicon_.emoticons.find(tokens[i]); e != lexicon_.emoticons.end())
      polarity = e->second;
    else
      continue;
    const std::size_t from = i >= config_.negation_window ? i - config_.negation_window : 0;
    for (std::size_t k = from; k < i; ++k) {
      if (lexicon_.negations.count(tokens[k])) {
        polarity = -polarity;
        break;
      }
    }
    sum += polarity;
    ++hits;
  }
  SentimentScore out;
  out.score = hits ? sum / static_cast<double>(hits) : 0.0;
  out.label = label_for_score(out.score, config_);
  return out;
}

Sentiment3 collapse_sentiment(Sentiment5 label) {
  switch (label) {
    case Sentiment5::very_negative:
    case Sentiment5::negative: return Sentiment3::negative;
    case Sentiment5::neutral: return Sentiment3::neutral;
    case Sentiment5::positive:
    case Sentiment5::very_positive: return Sentiment3::positive;
  }
  return Sentiment3::neutral;
}

std::array<DailySeries, 3> daily_sentiment_distribution(std::span<const Sentiment3> labels,
                                                        const DayBuckets& buckets, const std::string& event) {
  std::array<DailySeries, 3> out;
  const char* names[3] = {"sentiment_negative", "sentiment_neutral", "sentiment_positive"};
  for (int k = 0; k < 3; ++k) {
    out[k].name = names[k];
    out[k].event = event;
    out[k].start = buckets.empty() ? Day{} : buckets.begin()->first;
    out[k].unit = SeriesUnit::percent;
    out[k].values.assign(buckets.size(), 0.0);
  }
  std::size_t d = 0;
  for (const auto& [day, idx] : buckets) {
    std::array<std::size_t, 3> counts{};
    for (auto i : idx) ++counts[static_cast<std::size_t>(labels[i])];
    if (!idx.empty())
      for (int k = 0; k < 3; ++k)
        out[k].values[d] = 100.0 * static_cast<double>(counts[k]) / static_cast<double>(idx.size());
    ++d;
  }
  return out;
}

}  // namespace crisislens
