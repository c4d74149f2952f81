#include "crisislens/imagery.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <numbers>

#include "crisislens/io.hpp"

namespace crisislens {

PerceptualHash PerceptualHash::from_hex(std::string_view hex) {
  PerceptualHash h;
  auto res = std::from_chars(hex.data(), hex.data() + hex.size(), h.bits, 16);
  if (hex.size() != 16 || res.ec != std::errc{} || res.ptr != hex.data() + hex.size())
    throw DataError("invalid hash '" + std::string(hex) + "'");
  return h;
}

namespace {

std::vector<double> luma(const Image& image) {
  std::vector<double> g(image.width * image.height);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto* p = &image.rgb[i * 3];
    g[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
  }
  return g;
}

// Triangle (bilinear) resampling weights along one axis, half-pixel
// centred. When shrinking, the kernel widens by the scale factor so every
// source pixel contributes; weights for each output sum to 1.
struct Taps {
  std::size_t first = 0;
  std::vector<double> weights;
};

std::vector<Taps> bilinear_taps(std::size_t src, std::size_t dst) {
  const double scale = static_cast<double>(src) / static_cast<double>(dst);
  const double support = std::max(scale, 1.0);
  std::vector<Taps> taps(dst);
  for (std::size_t o = 0; o < dst; ++o) {
    const double centre = (static_cast<double>(o) + 0.5) * scale;
    const auto lo = static_cast<std::size_t>(std::max(0.0, std::floor(centre - support)));
    const auto hi = std::min(src, static_cast<std::size_t>(std::ceil(centre + support)));
    auto& t = taps[o];
    t.first = lo;
    double total = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double w = std::max(0.0, 1.0 - std::abs((static_cast<double>(i) + 0.5 - centre) / support));
      t.weights.push_back(w);
      total += w;
    }
    for (auto& w : t.weights) w /= total;
  }
  return taps;
}

constexpr std::size_t kHashSide = 32;
constexpr std::size_t kLowFreq = 8;

}  // namespace

PerceptualHash compute_phash(const Image& image) {
  if (image.width < 8 || image.height < 8) throw DataError("image too small to hash (needs 8x8)");
  if (image.rgb.size() != image.width * image.height * 3) throw DataError("image buffer size mismatch");
  const auto gray = luma(image);
  const auto tx = bilinear_taps(image.width, kHashSide);
  const auto ty = bilinear_taps(image.height, kHashSide);
  // Separable: rows first, then columns.
  std::vector<double> wide(image.height * kHashSide, 0.0);
  for (std::size_t y = 0; y < image.height; ++y)
    for (std::size_t x = 0; x < kHashSide; ++x) {
      double v = 0;
      for (std::size_t k = 0; k < tx[x].weights.size(); ++k) v += gray[y * image.width + tx[x].first + k] * tx[x].weights[k];
      wide[y * kHashSide + x] = v;
    }
  std::vector<double> small(kHashSide * kHashSide, 0.0);
  for (std::size_t y = 0; y < kHashSide; ++y)
    for (std::size_t x = 0; x < kHashSide; ++x) {
      double v = 0;
      for (std::size_t k = 0; k < ty[y].weights.size(); ++k) v += wide[(ty[y].first + k) * kHashSide + x] * ty[y].weights[k];
      small[y * kHashSide + x] = v;
    }

  // Orthonormal DCT-II, only the low-frequency corner.
  double basis[kLowFreq][kHashSide];
  for (std::size_t u = 0; u < kLowFreq; ++u) {
    const double scale = u == 0 ? std::sqrt(1.0 / kHashSide) : std::sqrt(2.0 / kHashSide);
    for (std::size_t x = 0; x < kHashSide; ++x)
      basis[u][x] = scale * std::cos(std::numbers::pi * static_cast<double>((2 * x + 1) * u) / (2.0 * kHashSide));
  }
  double rows[kHashSide][kLowFreq];
  for (std::size_t y = 0; y < kHashSide; ++y)
    for (std::size_t u = 0; u < kLowFreq; ++u) {
      double s = 0;
      for (std::size_t x = 0; x < kHashSide; ++x) s += small[y * kHashSide + x] * basis[u][x];
      rows[y][u] = s;
    }
  double coef[kLowFreq][kLowFreq];
  for (std::size_t v = 0; v < kLowFreq; ++v)
    for (std::size_t u = 0; u < kLowFreq; ++u) {
      double s = 0;
      for (std::size_t y = 0; y < kHashSide; ++y) s += rows[y][u] * basis[v][y];
      coef[v][u] = s;
    }

  // Cosine sums of a flat signal are zero only up to rounding; snap that
  // noise so flat images hash to all zeros.
  const double noise = 1e-9 * (1.0 + std::abs(coef[0][0]));
  std::vector<double> ac;
  ac.reserve(63);
  for (std::size_t v = 0; v < kLowFreq; ++v)
    for (std::size_t u = 0; u < kLowFreq; ++u) {
      if (u == 0 && v == 0) continue;
      double c = coef[v][u];
      ac.push_back(std::abs(c) <= noise ? 0.0 : c);
    }
  auto sorted = ac;
  std::nth_element(sorted.begin(), sorted.begin() + 31, sorted.end());
  const double median = sorted[31];
  PerceptualHash h;
  for (std::size_t i = 0; i < ac.size(); ++i)
    if (ac[i] > median) h.bits |= std::uint64_t{1} << i;
  return h;
}

int hamming(PerceptualHash a, PerceptualHash b) { return std::popcount(a.bits ^ b.bits); }

void DedupConfig::validate() const {
  if (tau < 0 || tau > 64) throw ConfigError("dedup tau must be within [0, 64]");
}

template <typename Visit>
void BkTree::search(PerceptualHash query, int radius, Visit&& visit) const {
  if (nodes_.empty()) return;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const auto& node = nodes_[stack.back()];
    stack.pop_back();
    const int d = hamming(query, node.hash);
    if (d <= radius) visit(node.id);
    for (const auto& [edge, child] : node.children)
      if (edge >= d - radius && edge <= d + radius) stack.push_back(child);
  }
}

void BkTree::insert(PerceptualHash hash, std::size_t id) {
  if (nodes_.empty()) {
    nodes_.push_back({hash, id, {}});
    return;
  }
  std::size_t cur = 0;
  for (;;) {
    const int d = hamming(hash, nodes_[cur].hash);
    auto& children = nodes_[cur].children;
    auto it = std::find_if(children.begin(), children.end(), [d](const auto& c) { return c.first == d; });
    if (it == children.end()) {
      children.emplace_back(d, nodes_.size());
      nodes_.push_back({hash, id, {}});
      return;
    }
    cur = it->second;
  }
}

std::vector<std::size_t> BkTree::within(PerceptualHash query, int radius) const {
  std::vector<std::size_t> ids;
  search(query, radius, [&](std::size_t id) { ids.push_back(id); });
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::optional<std::size_t> BkTree::earliest_within(PerceptualHash query, int radius) const {
  std::optional<std::size_t> best;
  search(query, radius, [&](std::size_t id) {
    if (!best || id < *best) best = id;
  });
  return best;
}

std::vector<std::optional<std::size_t>> dedup_stream(std::span<const PerceptualHash> hashes,
                                                     const DedupConfig& config) {
  config.validate();
  BkTree retained;
  std::vector<std::optional<std::size_t>> out(hashes.size());
  for (std::size_t i = 0; i < hashes.size(); ++i) {
    out[i] = retained.earliest_within(hashes[i], config.tau);
    if (!out[i]) retained.insert(hashes[i], i);
  }
  return out;
}

Calibration calibrate_threshold(std::span<const LabeledPair> pairs) {
  std::size_t positives = 0, negatives = 0;
  std::vector<std::size_t> pos_at(65, 0), neg_at(65, 0);
  for (const auto& p : pairs) {
    auto d = static_cast<std::size_t>(hamming(p.a, p.b));
    if (p.duplicate) {
      ++positives;
      ++pos_at[d];
    } else {
      ++negatives;
      ++neg_at[d];
    }
  }
  if (positives == 0 || negatives == 0)
    throw DataError("threshold calibration needs both duplicate and distinct pairs");

  Calibration cal;
  std::size_t tp = 0, fp = 0;
  long long best_j = 0;
  bool have_best = false;
  for (int tau = 0; tau <= 64; ++tau) {
    tp += pos_at[static_cast<std::size_t>(tau)];
    fp += neg_at[static_cast<std::size_t>(tau)];
    RocPoint pt;
    pt.tau = tau;
    pt.tp = tp;
    pt.fp = fp;
    pt.fn = positives - tp;
    pt.tn = negatives - fp;
    pt.tpr = static_cast<double>(tp) / static_cast<double>(positives);
    pt.fpr = static_cast<double>(fp) / static_cast<double>(negatives);
    pt.recall = pt.tpr;
    pt.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    cal.roc.push_back(pt);
    // J scaled by positives * negatives stays an exact integer.
    const long long j = static_cast<long long>(tp * negatives) - static_cast<long long>(fp * positives);
    if (!have_best || j > best_j) {
      best_j = j;
      cal.tau = tau;
      have_best = true;
    }
  }
  return cal;
}

std::vector<double> extract_image_features(const Image& image) {
  const std::size_t w = image.width, h = image.height;
  if (w == 0 || h == 0 || image.rgb.size() != w * h * 3) throw DataError("cannot extract features from an empty image");
  const auto gray = luma(image);
  const double n = static_cast<double>(w * h);
  std::vector<double> f(kImageFeatureDims, 0.0);

  for (double g : gray) f[std::min<std::size_t>(63, static_cast<std::size_t>(g / 4.0))] += 1.0;
  for (std::size_t b = 0; b < 64; ++b) f[b] /= n;

  auto at = [&](std::ptrdiff_t x, std::ptrdiff_t y) {
    x = std::clamp<std::ptrdiff_t>(x, 0, static_cast<std::ptrdiff_t>(w) - 1);
    y = std::clamp<std::ptrdiff_t>(y, 0, static_cast<std::ptrdiff_t>(h) - 1);
    return gray[static_cast<std::size_t>(y) * w + static_cast<std::size_t>(x)];
  };
  double cell_sum[9] = {};
  std::size_t cell_n[9] = {};
  for (std::size_t y = 0; y < h; ++y) {
    // Cells are assigned by pixel centre, which keeps the grid mirror-symmetric.
    const std::size_t cy = (6 * y + 3) / (2 * h);
    for (std::size_t x = 0; x < w; ++x) {
      const auto X = static_cast<std::ptrdiff_t>(x), Y = static_cast<std::ptrdiff_t>(y);
      const double gx = (at(X + 1, Y - 1) + 2 * at(X + 1, Y) + at(X + 1, Y + 1)) -
                        (at(X - 1, Y - 1) + 2 * at(X - 1, Y) + at(X - 1, Y + 1));
      const double gy = (at(X - 1, Y + 1) + 2 * at(X, Y + 1) + at(X + 1, Y + 1)) -
                        (at(X - 1, Y - 1) + 2 * at(X, Y - 1) + at(X + 1, Y - 1));
      const std::size_t cx = (6 * x + 3) / (2 * w);
      cell_sum[cy * 3 + cx] += std::sqrt(gx * gx + gy * gy);
      ++cell_n[cy * 3 + cx];
    }
  }
  for (std::size_t c = 0; c < 9; ++c) f[64 + c] = cell_n[c] ? cell_sum[c] / static_cast<double>(cell_n[c]) : 0.0;

  for (std::size_t ch = 0; ch < 3; ++ch) {
    double mean = 0;
    for (std::size_t i = 0; i < w * h; ++i) mean += image.rgb[i * 3 + ch];
    mean /= n;
    double var = 0;
    for (std::size_t i = 0; i < w * h; ++i) {
      const double d = image.rgb[i * 3 + ch] - mean;
      var += d * d;
    }
    f[73 + ch] = mean;
    f[76 + ch] = std::sqrt(var / n);
  }
  return f;
}

std::string_view to_string(DamageLevel level) {
  switch (level) {
    case DamageLevel::none: return "none";
    case DamageLevel::mild: return "mild";
    case DamageLevel::severe: return "severe";
  }
  return "none";
}

std::optional<DamageLevel> parse_damage(std::string_view name) {
  for (auto l : {DamageLevel::none, DamageLevel::mild, DamageLevel::severe})
    if (to_string(l) == name) return l;
  return std::nullopt;
}

bool classify_relevancy(const ForestModel& model, std::span<const double> features) {
  if (model.class_names != kRelevancyClasses) throw DataError("not a relevancy model");
  return predict(model, to_row(features)).label == 1;
}

DamageLevel classify_damage(const ForestModel& model, std::span<const double> features) {
  if (model.class_names != kDamageClasses) throw DataError("not a damage model");
  return static_cast<DamageLevel>(predict(model, to_row(features)).label);
}

std::vector<ImageLabel> load_image_labels(const std::filesystem::path& path) {
  auto rows = read_csv_file(path);
  std::vector<ImageLabel> out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (r == 0 && row.size() == 2 && row[0] == "id" && row[1] == "label") continue;
    if (row.size() != 2) throw DataError(path.string() + ": row " + std::to_string(r + 1) + " needs id,label");
    out.push_back({std::string(trim(row[0])), std::string(trim(row[1]))});
  }
  return out;
}

ForestModel train_image_model(const std::vector<std::vector<double>>& features,
                              const std::vector<std::string>& labels, const std::vector<std::string>& classes,
                              const ForestParams& params, std::size_t jobs) {
  if (features.size() != labels.size()) throw DataError("image features and labels differ in length");
  LabeledDataset ds;
  ds.class_names = classes;
  ds.n_features = kImageFeatureDims;
  for (std::size_t i = 0; i < features.size(); ++i) {
    auto it = std::find(classes.begin(), classes.end(), labels[i]);
    if (it == classes.end()) throw DataError("unknown image label '" + labels[i] + "'");
    if (features[i].size() != kImageFeatureDims) throw DataError("image feature vector has the wrong length");
    ds.rows.push_back(to_row(features[i]));
    ds.labels.push_back(static_cast<std::uint32_t>(it - classes.begin()));
  }
  return train_random_forest(ds, params, jobs);
}

ImageAnalysis analyze_image(const Image& image) { return {compute_phash(image), extract_image_features(image)}; }

namespace {
double frac(std::size_t num, std::size_t den) {
  return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}
}  // namespace

double DailyImageStats::relevant_ratio() const { return frac(relevant, total); }
double DailyImageStats::unique_ratio() const { return frac(unique, total); }
double DailyImageStats::damage_ratio() const { return frac(damaged, total); }

ImagePipelineResult run_image_pipeline(const std::vector<ImageItem>& items, const std::vector<Day>& days,
                                       const ForestModel& relevancy, const ForestModel& damage,
                                       const DedupConfig& config) {
  config.validate();
  ImagePipelineResult res;
  for (Day d : days) res.per_day[d];
  BkTree retained;
  res.verdicts.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    auto day_it = res.per_day.find(item.day);
    if (day_it == res.per_day.end()) throw DataError("image '" + item.image_id + "' falls outside the event window");
    auto& stats = day_it->second;
    ImageVerdict v{item.image_id, item.tweet_id, item.day, false, false, std::nullopt, std::nullopt};
    if (!item.analysis) {
      v.missing = true;
      ++stats.missing;
      ++res.missing;
      res.verdicts.push_back(std::move(v));
      continue;
    }
    ++stats.total;
    v.relevant = classify_relevancy(relevancy, item.analysis->features);
    if (v.relevant) {
      ++stats.relevant;
      v.duplicate_of = retained.earliest_within(item.analysis->hash, config.tau);
      if (!v.duplicate_of) {
        retained.insert(item.analysis->hash, i);
        ++stats.unique;
        v.damage = classify_damage(damage, item.analysis->features);
        switch (*v.damage) {
          case DamageLevel::none: ++stats.none; break;
          case DamageLevel::mild: ++stats.mild; ++stats.damaged; break;
          case DamageLevel::severe: ++stats.severe; ++stats.damaged; break;
        }
      }
    }
    res.verdicts.push_back(std::move(v));
  }
  return res;
}

std::vector<DailySeries> ImagePipelineResult::series(const std::string& event) const {
  auto make = [&](std::string name, SeriesUnit unit) {
    DailySeries s;
    s.name = std::move(name);
    s.event = event;
    s.start = per_day.empty() ? Day{} : per_day.begin()->first;
    s.unit = unit;
    return s;
  };
  std::vector<DailySeries> out{make("image_relevant_ratio", SeriesUnit::fraction),
                               make("image_unique_ratio", SeriesUnit::fraction),
                               make("image_damage_ratio", SeriesUnit::fraction),
                               make("damage_severe", SeriesUnit::percent),
                               make("damage_mild", SeriesUnit::percent),
                               make("damage_none", SeriesUnit::percent)};
  for (const auto& [day, s] : per_day) {
    out[0].values.push_back(s.relevant_ratio());
    out[1].values.push_back(s.unique_ratio());
    out[2].values.push_back(s.damage_ratio());
    out[3].values.push_back(100.0 * frac(s.severe, s.unique));
    out[4].values.push_back(100.0 * frac(s.mild, s.unique));
    out[5].values.push_back(100.0 * frac(s.none, s.unique));
  }
  return out;
}

std::string verdicts_to_csv(const ImagePipelineResult& result, const std::vector<ImageItem>& items) {
  std::string out = "tweet_id,image_id,day,status,relevant,duplicate_of,damage\n";
  for (const auto& v : result.verdicts) {
    out += csv_field(v.tweet_id) + ',' + csv_field(v.image_id) + ',' + format_day(v.day) + ',';
    if (v.missing) {
      out += "missing,,,\n";
      continue;
    }
    out += "ok,";
    out += v.relevant ? "1," : "0,";
    if (v.duplicate_of) out += csv_field(items.at(*v.duplicate_of).image_id);
    out += ',';
    if (v.damage) out += to_string(*v.damage);
    out += '\n';
  }
  return out;
}

}  // namespace crisislens
