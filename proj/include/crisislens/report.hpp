#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "crisislens/categories.hpp"
#include "crisislens/corpus.hpp"
#include "crisislens/learn.hpp"
#include "crisislens/series.hpp"

namespace crisislens {

struct TrendEntry {
  std::string series;
  TrendLine line;
};

struct CorrelationEntry {
  std::string x;
  std::string y;
  std::optional<CorrelationResult> result;
  std::string error;  // "undefined_correlation" when result is empty
};

struct ReportMetadata {
  std::uint64_t seed = 0;
  std::string config_digest;
  std::string correlation_basis = "daily_ratio";
};

struct Report {
  std::string event;
  std::vector<Day> days;
  std::vector<DailySeries> series;
  std::vector<TrendEntry> trends;
  std::vector<CorrelationEntry> correlations;
  ReportMetadata metadata;
  std::size_t skipped_records = 0;
  std::size_t missing_images = 0;
  double mean_image_tweets_per_day = 0.0;

  // nullptr when absent.
  const DailySeries* find(std::string_view name) const;
};

// The correlations every report carries, in order.
inline const std::vector<std::pair<std::string, std::string>> kDefaultCorrelations = {
    {"image_relevant_ratio", "image_damage_ratio"}, {"image_unique_ratio", "image_damage_ratio"}};

// Outputs of the individual analyses for one event. Each optional is one
// analysis; build_report names the first one that is missing.
struct ReportInputs {
  std::string event;
  std::optional<CorpusStats> corpus;
  std::vector<Day> days;
  std::size_t skipped_records = 0;
  std::optional<std::array<DailySeries, 3>> sentiment;
  std::optional<std::vector<DailySeries>> categories;
  std::optional<RelevanceSeries> relevance;
  std::optional<std::vector<DailySeries>> images;
  std::size_t missing_images = 0;
  std::vector<std::pair<std::string, std::string>> extra_correlations;
  ReportMetadata metadata;
};

// Throws DataError naming the absent analysis, or when a series does not
// span the window.
Report build_report(const ReportInputs& inputs);

// "r = 0.71, p < 0.01": r to two decimals; p binned at 0.001, 0.01 and 0.05,
// otherwise printed to two decimals.
std::string format_correlation(const CorrelationResult& result);

nlohmann::json report_manifest(const Report& report);

std::string series_to_csv(const DailySeries& series);
// Reads back a `day,value` file written by emit_tabular.
DailySeries series_from_csv(const std::filesystem::path& path, const std::string& name, const std::string& event,
                            SeriesUnit unit);

// Writes <dir>/<event>/series/<name>.csv and <dir>/<event>/manifest.json.
// Throws IoError when the directory is not writable.
void emit_tabular(const Report& report, const std::filesystem::path& dir);

enum class ChartKind { stacked_bars, bars_with_trend };

struct ChartLayout {
  double plot_height = 400.0;
  double bar_width = 24.0;
  double bar_gap = 8.0;
  double margin = 40.0;
};

// Stacked bars need percent or fraction series and stack each day to the
// full plot height; days whose values are all zero render as an empty bar.
// Bars-with-trend scales to the largest value and overlays each series'
// least-squares line. Values are carried in data-* attributes.
// Throws DataError on length mismatch.
std::string emit_svg_chart(std::span<const DailySeries> series, ChartKind kind, const std::string& title,
                           const ChartLayout& layout = {}, std::optional<double> mean_line = std::nullopt);

// Writes the fixed chart set under <dir>/<event>/charts/.
void emit_charts(const Report& report, const std::filesystem::path& dir);

}  // namespace crisislens
