#include <gtest/gtest.h>

#include "crisislens/categories.hpp"
#include "support.hpp"

using namespace crisislens;

namespace {

// Per-category vocabulary; every category is separable by its words.
const std::array<std::vector<std::string>, 10> kWords = {{
    {"killed", "dead", "injured", "bodies"},
    {"bridge", "collapsed", "power", "outage"},
    {"warning", "evacuate", "advisory", "shelter"},
    {"donate", "blood", "volunteer", "donations"},
    {"displaced", "homeless", "lost", "everything"},
    {"missing", "found", "searching", "trapped"},
    {"prayers", "thoughts", "praying", "strength"},
    {"mom", "safe", "brother", "grandma"},
    {"update", "map", "hotline", "info"},
    {"football", "movie", "pizza", "concert"},
}};

std::vector<LabeledText> planted_texts(std::size_t per_class, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledText> out;
  for (std::size_t i = 0; i < per_class; ++i)
    for (std::uint32_t c = 0; c < 10; ++c) {
      std::string text;
      for (int w = 0; w < 3; ++w) text += kWords[c][rng.below(4)] + " ";
      text += "harvey houston ";
      text += std::to_string(rng.below(100));
      out.push_back({text, c});
    }
  return out;
}

Corpus corpus_of(const std::vector<std::string>& texts, const std::vector<int>& day_offsets) {
  Corpus c;
  c.window = {"e", {"x"}, parse_day("2017-08-25"), parse_day("2017-08-27")};
  for (std::size_t i = 0; i < texts.size(); ++i) {
    TweetRecord r;
    r.id = "t" + std::to_string(i);
    r.created_at = Timestamp(c.window.start_day) + std::chrono::days{day_offsets[i]} + std::chrono::hours{1};
    r.text = texts[i];
    c.records.push_back(r);
  }
  return c;
}

}  // namespace

TEST(Taxonomy, FixedNamesAndAliases) {
  EXPECT_EQ(taxonomy_names().size(), 10u);
  EXPECT_EQ(taxonomy_names()[kNotRelated], "not_related");
  EXPECT_EQ(category_index("Personal"), 7u);
  EXPECT_EQ(category_index("Personal updates"), 7u);
  EXPECT_EQ(category_index("Not related or irrelevant"), kNotRelated);
  EXPECT_EQ(category_index("donation_volunteering"), 3u);
  EXPECT_FALSE(category_index("weather"));
}

TEST(Taxonomy, LabeledFileLoads) {
  const auto dir = testsupport::fresh_dir("labeled");
  write_text_file(dir / "a.csv", "label,text\nPersonal updates,\"safe, at home\"\nirrelevant,pizza\n");
  const auto rows = load_labeled_texts(dir / "a.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].text, "safe, at home");
  EXPECT_EQ(rows[0].category, 7u);
  write_text_file(dir / "b.csv", "text,label\nx,unknown_label\n");
  EXPECT_THROW(load_labeled_texts(dir / "b.csv"), DataError);
}

TEST(Taxonomy, PlantedFixtureIsLearned) {
  PrepConfig prep;
  ForestParams params;
  params.n_trees = 40;
  params.seed = 5;
  const auto model = train_taxonomy_model(planted_texts(60, 1), prep, params, 2);
  EXPECT_TRUE(model.warnings.empty());
  const auto dev = planted_texts(20, 2);
  std::vector<std::uint32_t> gold, pred;
  for (const auto& t : dev) {
    gold.push_back(t.category);
    const auto row = to_row(vectorize(preprocess(t.text, model.prep), model.vocab));
    pred.push_back(predict(model.forest, row).label);
  }
  EXPECT_GE(evaluate(pred, gold, taxonomy_names()).macro_f1, 0.95);

  const auto corpus = corpus_of({"please donate blood at the center", "zzz qqq", "please donate blood at the center"},
                                {0, 0, 1});
  const auto a = classify_corpus(model, corpus);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[0].category, 3u);
  EXPECT_EQ(a[0].category, a[2].category);
  EXPECT_EQ(a[0].confidence, a[2].confidence);
  // An all-OOV tweet still gets the forest's verdict for the empty vector.
  EXPECT_EQ(a[1].category, predict(model.forest, SparseRow{}).label);
  EXPECT_EQ(a[1].confidence, predict(model.forest, SparseRow{}).confidence);
  for (const auto& x : a) EXPECT_TRUE(x.confidence >= 0.0 && x.confidence <= 1.0);
  EXPECT_EQ(classify_corpus(model, corpus, 3).size(), 3u);

  const auto round = taxonomy_model_from_json(taxonomy_model_to_json(model));
  EXPECT_EQ(taxonomy_model_to_json(round).dump(), taxonomy_model_to_json(model).dump());
  EXPECT_EQ(round.vocab.terms(), model.vocab.terms());
}

TEST(Taxonomy, MissingCategoryWarnsEmptyThrows) {
  auto texts = planted_texts(5, 3);
  std::erase_if(texts, [](const LabeledText& t) { return t.category == 4; });
  ForestParams params;
  params.n_trees = 3;
  EXPECT_FALSE(train_taxonomy_model(texts, PrepConfig{}, params).warnings.empty());
  EXPECT_THROW(train_taxonomy_model({}, PrepConfig{}, params), DataError);
}

TEST(Assignments, CsvRoundTrip) {
  const auto dir = testsupport::fresh_dir("assign");
  std::vector<CategoryAssignment> a{{"1", 3, 0.75}, {"x,2", 9, 1.0}};
  write_text_file(dir / "a.csv", assignments_to_csv(a));
  const auto back = assignments_from_csv(dir / "a.csv");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].tweet_id, "x,2");
  EXPECT_EQ(back[1].category, 9u);
  EXPECT_EQ(back[0].confidence, 0.75);
  EXPECT_EQ(read_text_file(dir / "a.csv").substr(0, 30).find("tweet_id,category,confidence"), 0u);
}

TEST(Distribution, DayArithmetic) {
  DayBuckets buckets{{parse_day("2017-08-25"), {0, 1, 2, 3}}, {parse_day("2017-08-26"), {}}};
  const std::vector<std::uint32_t> cats{3, 3, 6, kNotRelated};
  const auto series = daily_category_distribution(cats, buckets, "e");
  ASSERT_EQ(series.size(), 10u);
  EXPECT_EQ(series[3].values, (std::vector<double>{50, 0}));
  EXPECT_EQ(series[6].values, (std::vector<double>{25, 0}));
  EXPECT_EQ(series[kNotRelated].values, (std::vector<double>{25, 0}));
  EXPECT_EQ(series[0].values, (std::vector<double>{0, 0}));
  EXPECT_EQ(series[3].unit, SeriesUnit::percent);
}

TEST(Distribution, Rollup) {
  DayBuckets buckets{{parse_day("2017-08-25"), {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}}, {parse_day("2017-08-26"), {10, 11}}};
  std::vector<std::uint32_t> cats{1, 2, 3, 4, 5, 6, 7, 9, 9, 9, 9, 9};
  const auto r = relevance_rollup(cats, buckets, "e");
  EXPECT_DOUBLE_EQ(r.relevant.values[0], 0.7);
  EXPECT_EQ(r.relevant.values[1], 0.0);
  EXPECT_EQ(r.irrelevant.values[1], 1.0);
}

TEST(Distribution, MatchesRecountAndSumsTo100) {
  Rng rng(9);
  DayBuckets buckets;
  std::vector<std::uint32_t> cats(1000);
  for (auto& c : cats) c = static_cast<std::uint32_t>(rng.below(10));
  for (int d = 0; d < 7; ++d) buckets[parse_day("2017-08-25") + std::chrono::days{d}];
  for (std::size_t i = 0; i < cats.size(); ++i)
    if (rng.below(10)) buckets[parse_day("2017-08-25") + std::chrono::days{static_cast<int>(rng.below(6))}].push_back(i);
  const auto series = daily_category_distribution(cats, buckets, "e");
  const auto rollup = relevance_rollup(cats, buckets, "e");
  std::size_t day = 0;
  for (const auto& [d, idx] : buckets) {
    std::array<std::size_t, 10> counts{};
    for (auto i : idx) ++counts[cats[i]];
    double sum = 0;
    for (std::size_t c = 0; c < 10; ++c) {
      const double expected = idx.empty() ? 0.0 : 100.0 * counts[c] / idx.size();
      ASSERT_NEAR(series[c].values[day], expected, 1e-12);
      sum += series[c].values[day];
    }
    if (!idx.empty()) ASSERT_NEAR(sum, 100.0, 1e-9);
    if (idx.empty()) {
      ASSERT_EQ(rollup.relevant.values[day], 0.0);
      ASSERT_EQ(rollup.irrelevant.values[day], 0.0);
    } else {
      ASSERT_EQ(rollup.relevant.values[day], 1.0 - rollup.irrelevant.values[day]);
    }
    ++day;
  }
}
