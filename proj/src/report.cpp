#include "crisislens/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "crisislens/io.hpp"

namespace crisislens {

const DailySeries* Report::find(std::string_view name) const {
  for (const auto& s : series)
    if (s.name == name) return &s;
  return nullptr;
}

namespace {

DailySeries count_series(const std::string& name, const std::string& event, const std::vector<Day>& days,
                         const std::map<Day, std::size_t>& counts) {
  DailySeries s{name, event, days.front(), {}, SeriesUnit::count};
  for (Day d : days) {
    auto it = counts.find(d);
    s.values.push_back(it == counts.end() ? 0.0 : static_cast<double>(it->second));
  }
  return s;
}

void check_span(const DailySeries& s, const std::vector<Day>& days) {
  if (s.size() != days.size() || s.start != days.front())
    throw DataError("series '" + s.name + "' does not span the event window");
  s.validate();
}

}  // namespace

Report build_report(const ReportInputs& in) {
  if (in.days.empty()) throw DataError("report needs a non-empty event window");
  if (!in.corpus) throw DataError("report is missing the tweet volume analysis (ingest)");
  if (!in.sentiment) throw DataError("report is missing the sentiment analysis");
  if (!in.categories) throw DataError("report is missing the category classification");
  if (!in.relevance) throw DataError("report is missing the relevance rollup (classify)");
  if (!in.images) throw DataError("report is missing the image analysis");

  Report r;
  r.event = in.event;
  r.days = in.days;
  r.metadata = in.metadata;
  r.skipped_records = in.skipped_records;
  r.missing_images = in.missing_images;
  r.mean_image_tweets_per_day = in.corpus->mean_image_tweets_per_day;

  r.series.push_back(count_series("tweet_count", in.event, in.days, in.corpus->per_day));
  r.series.push_back(count_series("image_tweet_count", in.event, in.days, in.corpus->image_tweets_per_day));
  for (const auto& s : *in.sentiment) r.series.push_back(s);
  for (const auto& s : *in.categories) r.series.push_back(s);
  r.series.push_back(in.relevance->relevant);
  r.series.push_back(in.relevance->irrelevant);
  for (const auto& s : *in.images) r.series.push_back(s);
  for (auto& s : r.series) {
    s.event = in.event;
    check_span(s, in.days);
  }
  for (std::size_t i = 0; i < r.series.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (r.series[i].name == r.series[j].name) throw DataError("duplicate series '" + r.series[i].name + "'");

  if (in.days.size() >= 2)
    for (const char* name : {"tweet_count", "image_tweet_count"}) r.trends.push_back({name, ols_trend(r.find(name)->values)});

  auto pairs = kDefaultCorrelations;
  pairs.insert(pairs.end(), in.extra_correlations.begin(), in.extra_correlations.end());
  for (const auto& [x, y] : pairs) {
    const auto* sx = r.find(x);
    const auto* sy = r.find(y);
    if (!sx) throw DataError("correlation references unknown series '" + x + "'");
    if (!sy) throw DataError("correlation references unknown series '" + y + "'");
    CorrelationEntry e{x, y, std::nullopt, {}};
    try {
      e.result = pearson(sx->values, sy->values);
    } catch (const UndefinedCorrelation&) {
      e.error = "undefined_correlation";
    } catch (const DataError&) {
      e.error = "insufficient_points";
    }
    r.correlations.push_back(std::move(e));
  }
  return r;
}

std::string format_correlation(const CorrelationResult& result) {
  auto fixed2 = [](double v) {
    if (std::abs(v) < 0.005) v = 0.0;
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
  };
  std::string p;
  if (result.p < 0.001) p = "p < 0.001";
  else if (result.p < 0.01) p = "p < 0.01";
  else if (result.p < 0.05) p = "p < 0.05";
  else p = "p = " + fixed2(result.p);
  return "r = " + fixed2(result.r) + ", " + p;
}

nlohmann::json report_manifest(const Report& report) {
  using nlohmann::json;
  json series = json::array();
  for (const auto& s : report.series)
    series.push_back({{"name", s.name}, {"unit", unit_name(s.unit)}, {"file", "series/" + s.name + ".csv"}});
  json trends = json::array();
  for (const auto& t : report.trends)
    trends.push_back({{"series", t.series}, {"slope", t.line.slope}, {"intercept", t.line.intercept}});
  json corr = json::array();
  for (const auto& c : report.correlations) {
    json e = {{"x", c.x}, {"y", c.y}};
    if (c.result) {
      e["r"] = c.result->r;
      e["p"] = c.result->p;
      e["n"] = c.result->n;
      e["summary"] = format_correlation(*c.result);
    } else {
      e["error"] = c.error;
    }
    corr.push_back(std::move(e));
  }
  return {
      {"event", report.event},
      {"window",
       {{"start", format_day(report.days.front())}, {"end", format_day(report.days.back())}, {"days", report.days.size()}}},
      {"metadata",
       {{"seed", report.metadata.seed},
        {"config_digest", report.metadata.config_digest},
        {"correlation_basis", report.metadata.correlation_basis}}},
      {"summary",
       {{"skipped_records", report.skipped_records},
        {"missing_images", report.missing_images},
        {"mean_image_tweets_per_day", report.mean_image_tweets_per_day}}},
      {"series", std::move(series)},
      {"trends", std::move(trends)},
      {"correlations", std::move(corr)},
  };
}

std::string series_to_csv(const DailySeries& series) {
  std::string out = "day,value\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    out += format_day(series.day(i)) + ',' + format_double(series.values[i]) + '\n';
  return out;
}

DailySeries series_from_csv(const std::filesystem::path& path, const std::string& name, const std::string& event,
                            SeriesUnit unit) {
  auto rows = read_csv_file(path);
  if (rows.empty() || rows[0] != CsvRow{"day", "value"}) throw DataError(path.string() + ": not a series file");
  DailySeries s{name, event, {}, {}, unit};
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 2) throw DataError(path.string() + ": malformed row " + std::to_string(r + 1));
    Day d = parse_day(rows[r][0]);
    if (r == 1) s.start = d;
    if (d != s.day(r - 1)) throw DataError(path.string() + ": days are not consecutive");
    const auto& v = rows[r][1];
    double value = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), value);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) throw DataError(path.string() + ": bad value '" + v + "'");
    s.values.push_back(value);
  }
  return s;
}

void emit_tabular(const Report& report, const std::filesystem::path& dir) {
  const auto root = dir / report.event;
  for (const auto& s : report.series) write_text_file(root / "series" / (s.name + ".csv"), series_to_csv(s));
  write_text_file(root / "manifest.json", report_manifest(report).dump(2) + "\n");
}

namespace {

std::string fixed3(double v) {
  if (std::abs(v) < 0.0005) v = 0.0;  // no "-0.000"
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
  return std::string(buf, res.ptr);
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

const char* colour(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

}  // namespace

std::string emit_svg_chart(std::span<const DailySeries> series, ChartKind kind, const std::string& title,
                           const ChartLayout& layout, std::optional<double> mean_line) {
  if (series.empty()) throw DataError("chart needs at least one series");
  const std::size_t n = series.front().size();
  for (const auto& s : series)
    if (s.size() != n) throw DataError("chart series '" + s.name + "' has a different length");
  if (n == 0) throw DataError("chart series are empty");

  const double H = layout.plot_height;
  const double m = layout.margin;
  const std::size_t per_day = kind == ChartKind::stacked_bars ? 1 : series.size();
  const double slot = layout.bar_width * static_cast<double>(per_day) + layout.bar_gap;
  const double width = 2 * m + slot * static_cast<double>(n);
  const double legend_h = 16.0 * static_cast<double>(series.size());
  const double height = 2 * m + H + 24.0 + legend_h;
  const double base = m + H;

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed3(width) + "\" height=\"" + fixed3(height) +
         "\" viewBox=\"0 0 " + fixed3(width) + ' ' + fixed3(height) + "\" data-kind=\"" +
         (kind == ChartKind::stacked_bars ? "stacked_bars" : "bars_with_trend") + "\" data-plot-height=\"" +
         fixed3(H) + "\" data-baseline=\"" + fixed3(base) + "\" data-days=\"" + std::to_string(n) + "\">\n";
  out += "  <title>" + xml_escape(title) + "</title>\n";
  out += "  <text x=\"" + fixed3(m) + "\" y=\"" + fixed3(m / 2) + "\" font-size=\"14\">" + xml_escape(title) + "</text>\n";
  out += "  <line class=\"axis\" x1=\"" + fixed3(m) + "\" y1=\"" + fixed3(base) + "\" x2=\"" + fixed3(width - m) +
         "\" y2=\"" + fixed3(base) + "\" stroke=\"#333\"/>\n";

  auto day_x = [&](std::size_t i) { return m + slot * static_cast<double>(i) + layout.bar_gap / 2; };

  if (kind == ChartKind::stacked_bars) {
    double scale = 0;
    for (const auto& s : series) {
      if (s.unit == SeriesUnit::count) throw DataError("stacked chart needs percent or fraction series");
      const double sc = s.unit == SeriesUnit::percent ? 100.0 : 1.0;
      if (scale != 0 && sc != scale) throw DataError("stacked chart mixes percent and fraction series");
      scale = sc;
    }
    for (std::size_t i = 0; i < n; ++i) {
      double total = 0;
      for (const auto& s : series) total += s.values[i];
      const std::string x = fixed3(day_x(i));
      out += "  <g class=\"day\" data-day=\"" + format_day(series.front().day(i)) + "\" data-index=\"" +
             std::to_string(i) + "\"" + (total == 0 ? " data-empty=\"1\"" : "") + ">\n";
      // Segments are placed from rounded cumulative edges so they tile
      // the bar without gaps.
      double acc = 0;
      double lower = 0;
      for (std::size_t k = 0; k < series.size(); ++k) {
        const double v = series[k].values[i];
        acc += v;
        const double upper = std::round(acc / scale * H * 1000.0) / 1000.0;
        out += "    <rect class=\"segment\" data-series=\"" + xml_escape(series[k].name) + "\" data-value=\"" +
               format_double(v) + "\" x=\"" + x + "\" y=\"" + fixed3(base - upper) + "\" width=\"" +
               fixed3(layout.bar_width) + "\" height=\"" + fixed3(upper - lower) + "\" fill=\"" + colour(k) + "\"/>\n";
        lower = upper;
      }
      out += "  </g>\n";
    }
  } else {
    double vmax = 0;
    for (const auto& s : series)
      for (double v : s.values) vmax = std::max(vmax, v);
    if (mean_line) vmax = std::max(vmax, *mean_line);
    if (vmax <= 0) vmax = 1;
    out += "  <g class=\"scale\" data-max=\"" + format_double(vmax) + "\"/>\n";
    for (std::size_t i = 0; i < n; ++i) {
      out += "  <g class=\"day\" data-day=\"" + format_day(series.front().day(i)) + "\" data-index=\"" +
             std::to_string(i) + "\">\n";
      for (std::size_t k = 0; k < series.size(); ++k) {
        const double v = series[k].values[i];
        const double h = v / vmax * H;
        out += "    <rect class=\"bar\" data-series=\"" + xml_escape(series[k].name) + "\" data-value=\"" +
               format_double(v) + "\" x=\"" + fixed3(day_x(i) + layout.bar_width * static_cast<double>(k)) +
               "\" y=\"" + fixed3(base - h) + "\" width=\"" + fixed3(layout.bar_width) + "\" height=\"" + fixed3(h) +
               "\" fill=\"" + colour(k) + "\"/>\n";
      }
      out += "  </g>\n";
    }
    if (n >= 2) {
      for (std::size_t k = 0; k < series.size(); ++k) {
        const auto t = ols_trend(series[k].values);
        const double xc = layout.bar_width * (static_cast<double>(k) + 0.5);
        const double last = static_cast<double>(n - 1);
        out += "  <line class=\"trend\" data-series=\"" + xml_escape(series[k].name) + "\" data-slope=\"" +
               format_double(t.slope) + "\" data-intercept=\"" + format_double(t.intercept) + "\" x1=\"" +
               fixed3(day_x(0) + xc) + "\" y1=\"" + fixed3(base - t.intercept / vmax * H) + "\" x2=\"" +
               fixed3(day_x(n - 1) + xc) + "\" y2=\"" + fixed3(base - (t.intercept + t.slope * last) / vmax * H) +
               "\" stroke=\"#6a3d9a\" stroke-width=\"2\"/>\n";
      }
    }
    if (mean_line) {
      const double y = base - *mean_line / vmax * H;
      out += "  <line class=\"mean\" data-value=\"" + format_double(*mean_line) + "\" x1=\"" + fixed3(m) +
             "\" y1=\"" + fixed3(y) + "\" x2=\"" + fixed3(width - m) + "\" y2=\"" + fixed3(y) +
             "\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n";
    }
  }

  for (std::size_t k = 0; k < series.size(); ++k) {
    const double y = base + 24.0 + 16.0 * static_cast<double>(k);
    out += "  <rect class=\"legend\" x=\"" + fixed3(m) + "\" y=\"" + fixed3(y) + "\" width=\"10.000\" height=\"10.000\" fill=\"" +
           colour(k) + "\"/>\n";
    out += "  <text x=\"" + fixed3(m + 14) + "\" y=\"" + fixed3(y + 9) + "\" font-size=\"11\">" +
           xml_escape(series[k].name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

void emit_charts(const Report& report, const std::filesystem::path& dir) {
  auto pick = [&](std::initializer_list<std::string_view> names) {
    std::vector<DailySeries> out;
    for (auto name : names) {
      const auto* s = report.find(name);
      if (!s) throw DataError("chart needs missing series '" + std::string(name) + "'");
      out.push_back(*s);
    }
    return out;
  };
  std::vector<DailySeries> categories;
  for (const auto& s : report.series)
    if (s.name.starts_with("category_")) categories.push_back(s);

  const auto root = dir / report.event / "charts";
  auto write = [&](const std::string& name, const std::vector<DailySeries>& s, ChartKind kind,
                   std::optional<double> mean = std::nullopt) {
    write_text_file(root / (name + ".svg"), emit_svg_chart(s, kind, report.event + ": " + name, {}, mean));
  };
  write("tweet_volume", pick({"tweet_count"}), ChartKind::bars_with_trend);
  write("image_tweets", pick({"image_tweet_count"}), ChartKind::bars_with_trend, report.mean_image_tweets_per_day);
  write("sentiment", pick({"sentiment_negative", "sentiment_neutral", "sentiment_positive"}), ChartKind::stacked_bars);
  write("categories", categories, ChartKind::stacked_bars);
  write("relevance", pick({"relevant_fraction", "irrelevant_fraction"}), ChartKind::stacked_bars);
  write("image_retention", pick({"image_relevant_ratio", "image_unique_ratio", "image_damage_ratio"}),
        ChartKind::bars_with_trend);
  write("damage_breakdown", pick({"damage_severe", "damage_mild", "damage_none"}), ChartKind::stacked_bars);
}

}  // namespace crisislens
