#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "crisislens/common.hpp"
#include "crisislens/image.hpp"
#include "crisislens/learn.hpp"
#include "crisislens/series.hpp"

namespace crisislens {

struct PerceptualHash {
  std::uint64_t bits = 0;

  bool operator==(const PerceptualHash&) const = default;
  std::string hex() const { return hex64(bits); }
  static PerceptualHash from_hex(std::string_view hex);
};

// DCT hash: luma, antialiased bilinear resize to 32x32, 2-D DCT-II, the 63 lowest
// non-DC coefficients of the 8x8 corner compared against their median.
// Bit i (LSB first) is coefficient i in row-major order skipping DC; bit 63
// is always 0. Throws DataError for images smaller than 8x8.
PerceptualHash compute_phash(const Image& image);

int hamming(PerceptualHash a, PerceptualHash b);

struct DedupConfig {
  int tau = 10;  // Hamming threshold, inclusive

  void validate() const;
};

// Metric tree over retained hashes; lookups prune children by the
// triangle inequality.
class BkTree {
public:
  void insert(PerceptualHash hash, std::size_t id);
  // Ids of all stored hashes within `radius` of `query`, ascending.
  std::vector<std::size_t> within(PerceptualHash query, int radius) const;
  // Smallest id within `radius`, if any.
  std::optional<std::size_t> earliest_within(PerceptualHash query, int radius) const;
  std::size_t size() const { return nodes_.size(); }

private:
  struct Node {
    PerceptualHash hash;
    std::size_t id;
    std::vector<std::pair<int, std::size_t>> children;  // (distance, node)
  };
  template <typename Visit>
  void search(PerceptualHash query, int radius, Visit&& visit) const;
  std::vector<Node> nodes_;
};

// Per position: nullopt when retained, otherwise the position of the
// earliest retained hash within tau.
std::vector<std::optional<std::size_t>> dedup_stream(std::span<const PerceptualHash> hashes,
                                                     const DedupConfig& config);

struct LabeledPair {
  PerceptualHash a;
  PerceptualHash b;
  bool duplicate = false;
};

struct RocPoint {
  int tau = 0;
  double tpr = 0.0;
  double fpr = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

struct Calibration {
  int tau = 0;
  std::vector<RocPoint> roc;  // tau = 0..64
};

// Sweeps tau over 0..64 and picks the largest Youden J = TPR - FPR,
// smallest tau on ties. Needs both positive and negative pairs.
Calibration calibrate_threshold(std::span<const LabeledPair> pairs);

inline constexpr std::size_t kImageFeatureDims = 79;

// 64-bin luma histogram (L1 normalized), mean Sobel magnitude over a 3x3
// grid, per-channel mean and standard deviation.
std::vector<double> extract_image_features(const Image& image);

enum class DamageLevel : std::uint8_t { none, mild, severe };

std::string_view to_string(DamageLevel level);
std::optional<DamageLevel> parse_damage(std::string_view name);

inline const std::vector<std::string> kRelevancyClasses = {"irrelevant", "relevant"};
inline const std::vector<std::string> kDamageClasses = {"none", "mild", "severe"};

bool classify_relevancy(const ForestModel& model, std::span<const double> features);
DamageLevel classify_damage(const ForestModel& model, std::span<const double> features);

// Image training labels: CSV `id,label` with ids resolved against a directory.
struct ImageLabel {
  std::string id;
  std::string label;
};
std::vector<ImageLabel> load_image_labels(const std::filesystem::path& path);

// Trains a forest on image features. Unknown labels throw DataError.
ForestModel train_image_model(const std::vector<std::vector<double>>& features,
                              const std::vector<std::string>& labels, const std::vector<std::string>& classes,
                              const ForestParams& params, std::size_t jobs = 1);

struct ImageAnalysis {
  PerceptualHash hash;
  std::vector<double> features;
};

ImageAnalysis analyze_image(const Image& image);

// One image occurrence in arrival order; `analysis` is empty when the file
// was missing or did not decode.
struct ImageItem {
  std::string image_id;
  std::string tweet_id;
  Day day;
  std::optional<ImageAnalysis> analysis;
};

struct ImageVerdict {
  std::string image_id;
  std::string tweet_id;
  Day day;
  bool missing = false;
  bool relevant = false;
  std::optional<std::size_t> duplicate_of;  // position in the item stream
  std::optional<DamageLevel> damage;        // only for relevant, unique images
};

struct DailyImageStats {
  std::size_t total = 0;  // excludes missing
  std::size_t missing = 0;
  std::size_t relevant = 0;
  std::size_t unique = 0;   // relevant and unique
  std::size_t damaged = 0;  // relevant, unique, damage != none
  std::size_t severe = 0, mild = 0, none = 0;

  double relevant_ratio() const;
  double unique_ratio() const;
  double damage_ratio() const;
};

struct ImagePipelineResult {
  std::vector<ImageVerdict> verdicts;
  std::map<Day, DailyImageStats> per_day;
  std::size_t missing = 0;

  // Retention ratios and damage breakdown as daily series.
  std::vector<DailySeries> series(const std::string& event) const;
};

// Relevancy filter, then de-duplication over the whole stream in arrival
// order (relevant images only), then damage assessment of the survivors.
ImagePipelineResult run_image_pipeline(const std::vector<ImageItem>& items, const std::vector<Day>& days,
                                       const ForestModel& relevancy, const ForestModel& damage,
                                       const DedupConfig& config);

std::string verdicts_to_csv(const ImagePipelineResult& result, const std::vector<ImageItem>& items);

}  // namespace crisislens
