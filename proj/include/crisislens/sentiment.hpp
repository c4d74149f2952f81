#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "crisislens/corpus.hpp"
#include "crisislens/series.hpp"

namespace crisislens {

// Ordered from most negative to most positive.
enum class Sentiment5 : std::uint8_t { very_negative, negative, neutral, positive, very_positive };
enum class Sentiment3 : std::uint8_t { negative, neutral, positive };

std::string_view to_string(Sentiment5 label);
std::string_view to_string(Sentiment3 label);
Sentiment5 parse_sentiment5(std::string_view name);

struct SentimentScore {
  Sentiment5 label = Sentiment5::neutral;
  double score = 0.0;  // in [-1, 1]
};

// Word and emoticon polarities in [-1, 1] plus negation cues.
struct SentimentLexicon {
  std::unordered_map<std::string, double> words;  // lowercase
  std::unordered_map<std::string, double> emoticons;
  std::set<std::string> negations;

  // Entries without letters or digits are treated as emoticons.
  void add(std::string_view token, double polarity);
  void validate() const;
  SentimentLexicon negated() const;
};

// Tab-separated `token<TAB>polarity`; polarity `NEG` marks a negation cue.
SentimentLexicon load_lexicon(const std::filesystem::path& path);

struct ScorerConfig {
  std::size_t negation_window = 3;
  double weak_threshold = 0.05;
  double strong_threshold = 0.5;
};

Sentiment5 label_for_score(double s, const ScorerConfig& config = {});

class SentimentScorer {
public:
  virtual ~SentimentScorer() = default;
  virtual SentimentScore score(std::string_view text) const = 0;
};

// Mean polarity of lexicon hits; a hit is sign-flipped when a negation cue
// occurs among the preceding `negation_window` tokens.
class LexiconScorer final : public SentimentScorer {
public:
  LexiconScorer(SentimentLexicon lexicon, ScorerConfig config = {});
  SentimentScore score(std::string_view text) const override;

  const SentimentLexicon& lexicon() const { return lexicon_; }

private:
  SentimentLexicon lexicon_;
  ScorerConfig config_;
};

// Light tokenizer: whitespace chunks that are known emoticons stay whole,
// everything else splits into lowercase word tokens.
std::vector<std::string> sentiment_tokens(std::string_view text, const SentimentLexicon& lexicon);

inline SentimentScore score_sentiment(std::string_view text, const SentimentLexicon& lexicon,
                                      const ScorerConfig& config = {}) {
  return LexiconScorer(lexicon, config).score(text);
}

Sentiment3 collapse_sentiment(Sentiment5 label);

// Three percent series (negative, neutral, positive); labels indexed by record.
std::array<DailySeries, 3> daily_sentiment_distribution(std::span<const Sentiment3> labels,
                                                        const DayBuckets& buckets, const std::string& event);

}  // namespace crisislens
