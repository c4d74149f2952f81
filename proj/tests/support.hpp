#pragma once

// Generators and reference implementations shared by the unit tests and the
// acceptance binary. Oracles deliberately take the slow, obvious route.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <nlohmann/json.hpp>

#include "crisislens/common.hpp"
#include "crisislens/io.hpp"
#include "crisislens/learn.hpp"
#include "crisislens/textprep.hpp"

namespace testsupport {

using namespace crisislens;

inline std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "crisislens-tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path source_path(const std::string& rel) {
  return std::filesystem::path(CRISISLENS_SOURCE_DIR) / rel;
}

// Random tweet-like text mixing every construct preprocessing cares about.
inline std::string random_text(Rng& rng, std::size_t pieces) {
  static const std::vector<std::string> pool = {
      "flood",   "Houston", "RT",     "@user",  "@a_b",     "#Harvey", "#",        "@",         "http://t.co/x",
      "HTTPS://A.b/c", "www.x.org", "25",  "3.5",    "cat4",     "I-10",    "don't",    "caf\xc3\xa9", "\xe2\x98\x94",
      "THE",     "in",      "a",      "...",    "!",        ":",       ",",        "rt",        "x",
      "mail@ex.com", "(ok)", "\t",    "  ",     "\n",       "_",       "-",        "9am",       "#\xc3\x89vac"};
  std::string out;
  for (std::size_t i = 0; i < pieces; ++i) {
    out += pool[rng.below(pool.size())];
    const auto gap = rng.below(4);
    if (gap == 0) continue;  // glue pieces together sometimes
    out += gap == 1 ? "\t" : " ";
  }
  // A few raw random bytes, including high ones.
  const auto extra = rng.below(4);
  for (std::size_t i = 0; i < extra; ++i) out += static_cast<char>(1 + rng.below(255));
  return out;
}

inline std::string join(const Tokens& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

// Document frequency by direct counting over sets.
inline std::map<std::string, std::size_t> df_oracle(const std::vector<Tokens>& docs) {
  std::map<std::string, std::size_t> df;
  for (const auto& d : docs) {
    std::set<std::string> seen(d.begin(), d.end());
    for (const auto& t : seen) ++df[t];
  }
  return df;
}

// Weighted Gini impurity computed directly from class proportions.
inline long double gini_of(const std::vector<std::uint32_t>& labels, std::size_t n_classes) {
  if (labels.empty()) return 0;
  std::vector<long double> counts(n_classes, 0);
  for (auto l : labels) counts[l] += 1;
  long double g = 1;
  for (auto c : counts) g -= (c / labels.size()) * (c / labels.size());
  return g;
}

struct OracleSplit {
  bool found = false;
  double threshold = 0;
  long double impurity = 0;
};

// Tries every midpoint between consecutive distinct values, lowest first,
// and keeps the first one within 1e-12 of the minimum weighted impurity.
inline OracleSplit best_split_oracle(const std::vector<double>& x, const std::vector<std::uint32_t>& y,
                                     std::size_t n_classes) {
  std::vector<double> distinct(x.begin(), x.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  OracleSplit best;
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
    const double t = distinct[i] + (distinct[i + 1] - distinct[i]) / 2.0;
    std::vector<std::uint32_t> l, r;
    for (std::size_t j = 0; j < x.size(); ++j) (x[j] <= t ? l : r).push_back(y[j]);
    const long double imp = (l.size() * gini_of(l, n_classes) + r.size() * gini_of(r, n_classes)) / x.size();
    if (!best.found || imp < best.impurity - 1e-12L) best = {true, t, imp};
  }
  return best;
}

struct ConfusionOracle {
  std::vector<std::vector<std::size_t>> m;
  std::vector<double> precision, recall, f1;
  double accuracy = 0;
};

inline ConfusionOracle confusion_oracle(const std::vector<std::uint32_t>& pred, const std::vector<std::uint32_t>& gold,
                                        std::size_t k) {
  ConfusionOracle o;
  o.m.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t i = 0; i < gold.size(); ++i)
        if (gold[i] == c && pred[i] == p) ++o.m[c][p];
  std::size_t correct = 0;
  for (std::size_t c = 0; c < k; ++c) correct += o.m[c][c];
  o.accuracy = gold.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(gold.size());
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t tp = o.m[c][c], col = 0, row = 0;
    for (std::size_t j = 0; j < k; ++j) {
      col += o.m[j][c];
      row += o.m[c][j];
    }
    double p = col ? static_cast<double>(tp) / static_cast<double>(col) : 0.0;
    double r = row ? static_cast<double>(tp) / static_cast<double>(row) : 0.0;
    o.precision.push_back(p);
    o.recall.push_back(r);
    o.f1.push_back(p + r > 0 ? 2 * p * r / (p + r) : 0.0);
  }
  return o;
}

// Pearson r in long double, straight from the definition.
inline long double pearson_r_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Normal equations for y = a + b t over t = 0..n-1, solved by Cramer's rule.
inline std::pair<long double, long double> ols_oracle(const std::vector<double>& y) {
  long double s0 = y.size(), s1 = 0, s2 = 0, sy = 0, sty = 0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    s1 += t;
    s2 += static_cast<long double>(t) * t;
    sy += y[t];
    sty += t * static_cast<long double>(y[t]);
  }
  const long double det = s0 * s2 - s1 * s1;
  return {(sy * s2 - s1 * sty) / det, (s0 * sty - s1 * sy) / det};  // intercept, slope
}

// Cosine between two vectors.
inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

// Keyword-planted text classification set: every document carries its
// class's marker token plus shared noise words.
struct PlantedCorpus {
  std::vector<Tokens> docs;
  std::vector<std::uint32_t> labels;
};

inline PlantedCorpus planted_corpus(std::size_t n_docs, std::size_t n_classes, std::uint64_t seed) {
  Rng rng(seed);
  PlantedCorpus c;
  for (std::size_t i = 0; i < n_docs; ++i) {
    const auto label = static_cast<std::uint32_t>(i % n_classes);
    Tokens doc{"marker" + std::to_string(label)};
    const auto noise = 3 + rng.below(6);
    for (std::size_t k = 0; k < noise; ++k) doc.push_back("noise" + std::to_string(rng.below(200)));
    rng.shuffle(doc.begin(), doc.end());
    c.docs.push_back(std::move(doc));
    c.labels.push_back(label);
  }
  return c;
}

// Parsed view of a chart: per day group, whether it is marked empty and the
// summed heights of its segments or bars.
struct ChartDay {
  bool empty = false;
  double height_sum = 0;
  std::vector<std::pair<std::string, double>> values;  // data-series, data-value
};

struct ChartView {
  std::string kind;
  double plot_height = 0;
  std::vector<ChartDay> days;
  std::vector<std::map<std::string, std::string>> lines;  // trend and mean lines, attributes only
};

inline ChartView parse_chart(const std::string& svg) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(svg);
  pt::read_xml(in, tree);
  const auto& root = tree.get_child("svg");
  ChartView view;
  view.kind = root.get<std::string>("<xmlattr>.data-kind");
  view.plot_height = root.get<double>("<xmlattr>.data-plot-height");
  for (const auto& [tag, node] : root) {
    if (tag == "line") {
      std::map<std::string, std::string> attrs;
      for (const auto& [k, v] : node.get_child("<xmlattr>")) attrs[k] = v.data();
      view.lines.push_back(std::move(attrs));
    }
    if (tag != "g" || node.get<std::string>("<xmlattr>.class") != "day") continue;
    ChartDay day;
    day.empty = node.get<std::string>("<xmlattr>.data-empty", "0") == "1";
    for (const auto& [ctag, child] : node)
      if (ctag == "rect") {
        day.height_sum += child.get<double>("<xmlattr>.height");
        day.values.push_back({child.get<std::string>("<xmlattr>.data-series"), child.get<double>("<xmlattr>.data-value")});
      }
    view.days.push_back(std::move(day));
  }
  return view;
}

// Relative path -> file bytes for every regular file under root.
inline std::map<std::string, std::string> snapshot_tree(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[std::filesystem::relative(e.path(), root).generic_string()] = read_text_file(e.path());
  return out;
}

inline nlohmann::json load_golden() {
  return nlohmann::json::parse(read_text_file(source_path("tests/data/preprocess_golden.json")));
}

}  // namespace testsupport
