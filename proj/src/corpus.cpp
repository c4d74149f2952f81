#include "crisislens/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <unordered_set>

namespace crisislens {

using nlohmann::json;

void EventWindow::validate() const {
  if (name.empty()) throw ConfigError("event window has no name");
  if (keywords.empty()) throw ConfigError("event '" + name + "' has no keywords");
  for (const auto& k : keywords)
    if (k.empty()) throw ConfigError("event '" + name + "' has an empty keyword");
  if (start_day > end_day) throw ConfigError("event '" + name + "' starts after it ends");
}

std::size_t EventWindow::day_count() const {
  return static_cast<std::size_t>((end_day - start_day).count() + 1);
}

bool EventWindow::matches(std::string_view text) const {
  std::string lower = to_lower_ascii(text);
  return std::any_of(keywords.begin(), keywords.end(), [&](const std::string& k) {
    return lower.find(to_lower_ascii(k)) != std::string::npos;
  });
}

TweetRecord parse_record(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("record is not a JSON object");
  auto require_string = [&](const char* key) -> std::string {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) throw DataError(std::string("missing string field '") + key + "'");
    return it->get<std::string>();
  };
  TweetRecord rec;
  rec.id = require_string("id");
  if (rec.id.empty()) throw DataError("empty id");
  rec.created_at = parse_timestamp(require_string("created_at"));
  rec.text = require_string("text");
  if (auto it = j.find("images"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw DataError("'images' is not an array");
    std::unordered_set<std::string> seen;
    for (const auto& img : *it) {
      if (!img.is_string()) throw DataError("non-string image reference");
      auto ref = img.get<std::string>();
      if (ref.empty()) throw DataError("empty image reference");
      if (seen.insert(ref).second) rec.image_refs.push_back(std::move(ref));
    }
  }
  if (auto it = j.find("retweet"); it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) throw DataError("'retweet' is not a boolean");
    rec.is_retweet = it->get<bool>();
  }
  return rec;
}

std::string serialize_record(const TweetRecord& record) {
  // Key order is fixed so ingested files are byte-stable.
  json j = json::object();
  j["id"] = record.id;
  j["created_at"] = format_timestamp(record.created_at);
  j["text"] = record.text;
  j["images"] = record.image_refs;
  j["retweet"] = record.is_retweet;
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

Corpus load_corpus(std::istream& in, const EventWindow& window) {
  window.validate();
  Corpus corpus;
  corpus.window = window;
  std::unordered_set<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    TweetRecord rec;
    try {
      rec = parse_record(line);
    } catch (const DataError&) {
      ++corpus.skipped_count;
      continue;
    }
    if (!window.contains(day_of(rec.created_at)) || !window.matches(rec.text)) continue;
    if (!ids.insert(rec.id).second) {
      ++corpus.skipped_count;
      continue;
    }
    corpus.records.push_back(std::move(rec));
  }
  std::stable_sort(corpus.records.begin(), corpus.records.end(),
                   [](const TweetRecord& a, const TweetRecord& b) { return a.created_at < b.created_at; });
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, const EventWindow& window) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus " + path.string());
  return load_corpus(in, window);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& rec : corpus.records) out << serialize_record(rec) << '\n';
}

DayBuckets bucket_by_day(const Corpus& corpus) {
  DayBuckets buckets;
  for (Day d : corpus.window.days()) buckets[d];
  for (std::size_t i = 0; i < corpus.records.size(); ++i)
    buckets[day_of(corpus.records[i].created_at)].push_back(i);
  return buckets;
}

namespace {

bool starts_with_ci(std::string_view text, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > text.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char c = text[pos + i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != prefix[i]) return false;
  }
  return true;
}

bool is_handle_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

// Length of a leading "RT @handle:" marker, or 0.
std::size_t retweet_marker_length(std::string_view text) {
  if (!starts_with_ci(text, 0, "rt")) return 0;
  std::size_t pos = 2;
  if (pos >= text.size() || !is_space(text[pos])) return 0;
  while (pos < text.size() && is_space(text[pos])) ++pos;
  if (pos >= text.size() || text[pos] != '@') return 0;
  ++pos;
  std::size_t handle_start = pos;
  while (pos < text.size() && is_handle_char(text[pos])) ++pos;
  if (pos == handle_start || pos >= text.size() || text[pos] != ':') return 0;
  return pos + 1;
}

}  // namespace

std::string normalize_for_dedup(std::string_view text) {
  // URLs first: a URL runs to the next whitespace.
  std::string no_urls;
  no_urls.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (starts_with_ci(text, i, "http://") || starts_with_ci(text, i, "https://")) {
      while (i < text.size() && !is_space(text[i])) ++i;
      no_urls += ' ';
      continue;
    }
    no_urls += text[i++];
  }
  std::string collapsed;
  collapsed.reserve(no_urls.size());
  for (char c : no_urls) {
    if (is_space(c)) {
      if (!collapsed.empty() && collapsed.back() != ' ') collapsed += ' ';
    } else {
      collapsed += c;
    }
  }
  std::string_view rest = trim(collapsed);
  while (std::size_t n = retweet_marker_length(rest)) rest = trim(rest.substr(n));
  return to_lower_ascii(rest);
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  for (Day d : corpus.window.days()) {
    stats.per_day[d] = 0;
    stats.image_tweets_per_day[d] = 0;
  }
  for (const auto& rec : corpus.records) {
    Day d = day_of(rec.created_at);
    ++stats.total;
    ++stats.per_day[d];
    if (rec.has_images()) {
      ++stats.image_tweets;
      ++stats.image_tweets_per_day[d];
    }
  }
  if (!stats.per_day.empty())
    stats.mean_image_tweets_per_day =
        static_cast<double>(stats.image_tweets) / static_cast<double>(stats.per_day.size());
  return stats;
}

}  // namespace crisislens
