#include <gtest/gtest.h>

#include "crisislens/sentiment.hpp"
#include "support.hpp"

using namespace crisislens;

namespace {

SentimentLexicon small_lexicon() {
  SentimentLexicon lex;
  lex.add("good", 1.0);
  lex.add("bad", -0.6);
  lex.add("ok", 0.2);
  lex.add(":)", 0.8);
  lex.negations = {"not", "never"};
  return lex;
}

Sentiment5 mirror(Sentiment5 s) { return static_cast<Sentiment5>(4 - static_cast<int>(s)); }

}  // namespace

TEST(Sentiment, LexiconExamples) {
  SentimentLexicon lex;
  lex.add("good", 1.0);
  auto s = score_sentiment("good", lex);
  EXPECT_EQ(s.label, Sentiment5::very_positive);
  EXPECT_EQ(s.score, 1.0);
  lex.negations = {"not"};
  s = score_sentiment("not good", lex);
  EXPECT_EQ(s.label, Sentiment5::very_negative);
  EXPECT_EQ(s.score, -1.0);
  s = score_sentiment("nothing here", lex);
  EXPECT_EQ(s.label, Sentiment5::neutral);
  EXPECT_EQ(s.score, 0.0);
}

TEST(Sentiment, NegationWindowAndEmoticons) {
  const auto lex = small_lexicon();
  EXPECT_EQ(score_sentiment("not a b c good", lex).score, 1.0);  // cue 4 tokens back
  EXPECT_EQ(score_sentiment("not a b good", lex).score, -1.0);
  EXPECT_DOUBLE_EQ(score_sentiment("good :) bad", lex).score, (1.0 + 0.8 - 0.6) / 3);
  EXPECT_EQ(sentiment_tokens("Great :) day!", lex), (std::vector<std::string>{"great", ":)", "day"}));
}

TEST(Sentiment, Thresholds) {
  EXPECT_EQ(label_for_score(0.5), Sentiment5::very_positive);
  EXPECT_EQ(label_for_score(0.05), Sentiment5::positive);
  EXPECT_EQ(label_for_score(0.049), Sentiment5::neutral);
  EXPECT_EQ(label_for_score(-0.05), Sentiment5::negative);
  EXPECT_EQ(label_for_score(-0.5), Sentiment5::very_negative);
}

TEST(Sentiment, CollapseTable) {
  EXPECT_EQ(collapse_sentiment(Sentiment5::very_positive), Sentiment3::positive);
  EXPECT_EQ(collapse_sentiment(Sentiment5::positive), Sentiment3::positive);
  EXPECT_EQ(collapse_sentiment(Sentiment5::neutral), Sentiment3::neutral);
  EXPECT_EQ(collapse_sentiment(Sentiment5::negative), Sentiment3::negative);
  EXPECT_EQ(collapse_sentiment(Sentiment5::very_negative), Sentiment3::negative);
  // Order preserving along the polarity scale.
  for (int a = 0; a < 5; ++a)
    for (int b = a; b < 5; ++b)
      EXPECT_LE(static_cast<int>(collapse_sentiment(static_cast<Sentiment5>(a))),
                static_cast<int>(collapse_sentiment(static_cast<Sentiment5>(b))));
  for (int a = 0; a < 5; ++a) EXPECT_EQ(parse_sentiment5(to_string(static_cast<Sentiment5>(a))), static_cast<Sentiment5>(a));
}

TEST(Sentiment, Antisymmetry) {
  Rng rng(44);
  const std::vector<std::string> words{"good", "bad", "fine", "awful", "ok", "sad", "glad", "x", "not", "never", ":)", ":("};
  for (int trial = 0; trial < 1000; ++trial) {
    SentimentLexicon lex;
    for (const auto& w : words) {
      if (w == "not" || w == "never") continue;
      if (rng.below(3)) lex.add(w, std::round((rng.uniform() * 2 - 1) * 100) / 100);
    }
    lex.negations = {"not", "never"};
    std::string text;
    const auto n = rng.below(10);
    for (std::size_t i = 0; i < n; ++i) text += words[rng.below(words.size())] + " ";
    const auto a = score_sentiment(text, lex);
    const auto b = score_sentiment(text, lex.negated());
    ASSERT_EQ(b.score, -a.score) << text;
    ASSERT_EQ(b.label, mirror(a.label)) << text;
    ASSERT_TRUE(a.score >= -1.0 && a.score <= 1.0);
  }
}

TEST(Sentiment, LexiconFile) {
  const auto dir = testsupport::fresh_dir("lexicon");
  write_text_file(dir / "l.tsv", "# c\nGood\t0.5\nnot\tNEG\n:-(\t-0.7\n");
  const auto lex = load_lexicon(dir / "l.tsv");
  EXPECT_EQ(lex.words.at("good"), 0.5);
  EXPECT_EQ(lex.emoticons.at(":-("), -0.7);
  EXPECT_TRUE(lex.negations.count("not"));
  write_text_file(dir / "bad.tsv", "good\t3\n");
  EXPECT_THROW(load_lexicon(dir / "bad.tsv"), DataError);
  const auto shipped = load_lexicon(std::filesystem::path(CRISISLENS_DATA_DIR) / "lexicon.tsv");
  EXPECT_NO_THROW(shipped.validate());
  EXPECT_FALSE(shipped.negations.empty());
}

TEST(Sentiment, DailyDistribution) {
  using S = Sentiment3;
  DayBuckets buckets{{parse_day("2017-08-25"), {0, 1, 2, 3}}, {parse_day("2017-08-26"), {}}};
  const std::vector<S> labels{S::negative, S::negative, S::positive, S::neutral};
  const auto d = daily_sentiment_distribution(labels, buckets, "e");
  EXPECT_EQ(d[0].values, (std::vector<double>{50, 0}));
  EXPECT_EQ(d[1].values, (std::vector<double>{25, 0}));
  EXPECT_EQ(d[2].values, (std::vector<double>{25, 0}));
}

TEST(Sentiment, DailyDistributionMatchesRecount) {
  Rng rng(45);
  std::vector<Sentiment3> labels(500);
  for (auto& l : labels) l = static_cast<Sentiment3>(rng.below(3));
  DayBuckets buckets;
  for (int d = 0; d < 5; ++d) buckets[parse_day("2017-09-01") + std::chrono::days{d}];
  for (std::size_t i = 0; i < labels.size(); ++i)
    buckets[parse_day("2017-09-01") + std::chrono::days{static_cast<int>(rng.below(4))}].push_back(i);
  const auto d = daily_sentiment_distribution(labels, buckets, "e");
  std::size_t day = 0;
  for (const auto& [k, idx] : buckets) {
    std::array<double, 3> c{};
    for (auto i : idx) c[static_cast<int>(labels[i])] += 1;
    for (int s = 0; s < 3; ++s) ASSERT_NEAR(d[s].values[day], idx.empty() ? 0.0 : 100.0 * c[s] / idx.size(), 1e-12);
    if (!idx.empty()) ASSERT_NEAR(d[0].values[day] + d[1].values[day] + d[2].values[day], 100.0, 1e-9);
    ++day;
  }
}
