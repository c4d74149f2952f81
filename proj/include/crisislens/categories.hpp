#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "crisislens/corpus.hpp"
#include "crisislens/learn.hpp"
#include "crisislens/series.hpp"
#include "crisislens/textprep.hpp"

namespace crisislens {

// Humanitarian information categories, in fixed order.
inline constexpr std::array<std::string_view, 10> kTaxonomy = {
    "injured_or_dead",  "infrastructure_damage", "caution_advice", "donation_volunteering",
    "affected_individual", "missing_found",      "sympathy_support", "personal",
    "other_useful",     "not_related"};

inline constexpr std::uint32_t kNotRelated = 9;

std::vector<std::string> taxonomy_names();

// Accepts the canonical names plus the long-form labels used by common
// annotated crisis datasets ("Personal updates" -> personal, ...).
std::optional<std::uint32_t> category_index(std::string_view label);

struct LabeledText {
  std::string text;
  std::uint32_t category = 0;
};

// Labeled training file: CSV with a header row naming `text` and `label`.
std::vector<LabeledText> load_labeled_texts(const std::filesystem::path& path);

// Bag-of-words forest plus everything needed to featurize new text the
// same way it was trained.
struct TaxonomyModel {
  PrepConfig prep;
  Vocabulary vocab;
  ForestModel forest;
  std::string text_input = "preprocessed";
  std::vector<std::string> warnings;  // not serialized
};

LabeledDataset featurize(const std::vector<LabeledText>& data, const PrepConfig& prep, const Vocabulary& vocab);

// Builds the vocabulary from `train`, then fits the forest. Missing
// categories produce a warning; an empty training set throws DataError.
TaxonomyModel train_taxonomy_model(const std::vector<LabeledText>& train, const PrepConfig& prep,
                                   const ForestParams& params, std::size_t min_df = 1, std::size_t jobs = 1);

nlohmann::json taxonomy_model_to_json(const TaxonomyModel& model);
TaxonomyModel taxonomy_model_from_json(const nlohmann::json& j);

struct CategoryAssignment {
  std::string tweet_id;
  std::uint32_t category = 0;
  double confidence = 0.0;
};

// One assignment per record, in record order. Tweets without any
// in-vocabulary token still get the forest's verdict for an empty vector.
std::vector<CategoryAssignment> classify_corpus(const TaxonomyModel& model, const Corpus& corpus,
                                                std::size_t jobs = 1);

std::string assignments_to_csv(const std::vector<CategoryAssignment>& assignments);
std::vector<CategoryAssignment> assignments_from_csv(const std::filesystem::path& path);

// Per-category percentage of each day's tweets (10 series, taxonomy order).
// `category_of` is indexed by record index.
std::vector<DailySeries> daily_category_distribution(std::span<const std::uint32_t> category_of,
                                                     const DayBuckets& buckets, const std::string& event);

struct RelevanceSeries {
  DailySeries relevant;    // 1 - irrelevant, per day
  DailySeries irrelevant;  // not_related share
};

RelevanceSeries relevance_rollup(std::span<const std::uint32_t> category_of, const DayBuckets& buckets,
                                 const std::string& event);

// Convenience overloads; assignments must be in record order.
std::vector<std::uint32_t> categories_of(const std::vector<CategoryAssignment>& assignments);
inline std::vector<DailySeries> daily_category_distribution(const std::vector<CategoryAssignment>& assignments,
                                                            const DayBuckets& buckets, const std::string& event) {
  return daily_category_distribution(categories_of(assignments), buckets, event);
}
inline RelevanceSeries relevance_rollup(const std::vector<CategoryAssignment>& assignments,
                                        const DayBuckets& buckets, const std::string& event) {
  return relevance_rollup(categories_of(assignments), buckets, event);
}

}  // namespace crisislens
