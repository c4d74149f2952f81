#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "crisislens/common.hpp"

namespace crisislens {

struct TweetRecord {
  std::string id;
  Timestamp created_at;
  std::string text;
  std::vector<std::string> image_refs;  // no duplicates
  bool is_retweet = false;

  bool has_images() const { return !image_refs.empty(); }
  bool operator==(const TweetRecord&) const = default;
};

struct EventWindow {
  std::string name;
  std::vector<std::string> keywords;  // lowercase
  Day start_day;
  Day end_day;  // inclusive

  // Throws ConfigError when the window is malformed.
  void validate() const;
  bool contains(Day day) const { return day >= start_day && day <= end_day; }
  std::size_t day_count() const;
  std::vector<Day> days() const { return day_range(start_day, end_day); }
  bool matches(std::string_view text) const;
};

// Immutable once loaded; records are ordered by created_at.
struct Corpus {
  EventWindow window;
  std::vector<TweetRecord> records;
  std::size_t skipped_count = 0;
};

struct CorpusStats {
  std::size_t total = 0;
  std::map<Day, std::size_t> per_day;
  std::size_t image_tweets = 0;
  std::map<Day, std::size_t> image_tweets_per_day;
  double mean_image_tweets_per_day = 0.0;
};

// Every window day is present, possibly with an empty list.
using DayBuckets = std::map<Day, std::vector<std::size_t>>;

// Parses one input line; throws DataError when the line is not a valid record.
TweetRecord parse_record(std::string_view line);
std::string serialize_record(const TweetRecord& record);

// Reads line-delimited JSON records. Malformed lines and duplicate ids are
// counted in skipped_count; out-of-window or non-matching records are
// dropped silently.
Corpus load_corpus(std::istream& in, const EventWindow& window);
Corpus load_corpus(const std::filesystem::path& path, const EventWindow& window);

// Writes records in the input wire format, one per line.
void write_corpus(std::ostream& out, const Corpus& corpus);

DayBuckets bucket_by_day(const Corpus& corpus);

// Canonical form used to count unique messages: leading "RT @handle:"
// markers and URLs removed, whitespace collapsed, lowercased.
std::string normalize_for_dedup(std::string_view text);

CorpusStats corpus_stats(const Corpus& corpus);

}  // namespace crisislens
