#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crisislens/corpus.hpp"
#include "crisislens/imagery.hpp"
#include "crisislens/learn.hpp"
#include "crisislens/sentiment.hpp"
#include "crisislens/textprep.hpp"
#include "crisislens/topics.hpp"

namespace crisislens {

struct EventConfig {
  EventWindow window;
  std::filesystem::path corpus;
  std::filesystem::path images;
};

// INI configuration; relative paths resolve against the config file's
// directory. Every referenced input is checked to exist at load time.
struct PipelineConfig {
  std::filesystem::path source;
  std::string source_text;

  std::filesystem::path out = "out";
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::vector<EventConfig> events;

  std::filesystem::path stopwords;
  std::filesystem::path lexicon;
  std::filesystem::path persons;
  std::filesystem::path organizations;
  std::filesystem::path locations;
  std::optional<std::filesystem::path> curation;

  std::filesystem::path taxonomy_train;
  std::filesystem::path image_train_dir;
  std::filesystem::path relevancy_labels;
  std::filesystem::path damage_labels;
  std::size_t min_df = 2;

  ForestParams forest;
  LdaConfig lda;
  std::size_t topic_terms = 30;
  DedupConfig dedup;
  std::optional<std::filesystem::path> calibration_pairs;
  std::filesystem::path calibration_dir;  // defaults to image_train_dir
  bool remove_mentions = true;
  std::size_t min_token_len = 2;
  ScorerConfig sentiment;
  bool sentiment_on_preprocessed = false;
  std::size_t entity_top_k = 10;
  std::vector<std::pair<std::string, std::string>> extra_correlations;

  // Covers the config text and the effective seed; output location and
  // worker count do not change results and are left out.
  std::string digest() const;
  const EventConfig& event(const std::string& name) const;
};

// Throws ConfigError (or IoError when the file cannot be read).
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);

// Stage entry points; each reads its inputs from files and writes its
// outputs under config.out. Stages for every configured event run in
// configuration order.
void stage_ingest(const PipelineConfig& config);
void stage_train_taxonomy(const PipelineConfig& config);
void stage_train_relevancy(const PipelineConfig& config);
void stage_train_damage(const PipelineConfig& config);
void stage_classify(const PipelineConfig& config);
void stage_sentiment(const PipelineConfig& config);
void stage_topics(const PipelineConfig& config);
void stage_entities(const PipelineConfig& config);
void stage_images(const PipelineConfig& config);
void stage_report(const PipelineConfig& config);
void stage_all(const PipelineConfig& config);

// Per-day image counts recomputed from an images.csv intermediate.
std::map<Day, DailyImageStats> image_stats_from_csv(const std::filesystem::path& path, const std::vector<Day>& days,
                                                    std::size_t* missing = nullptr);

}  // namespace crisislens
