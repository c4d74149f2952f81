#include <algorithm>
#include <cmath>

#include "crisislens/learn.hpp"

namespace crisislens {

double SparseRow::at(std::uint32_t feature) const {
  auto it = std::lower_bound(index.begin(), index.end(), feature);
  if (it == index.end() || *it != feature) return 0.0;
  return value[static_cast<std::size_t>(it - index.begin())];
}

SparseRow to_row(const BowVector& bow) {
  SparseRow row;
  row.index.reserve(bow.entries.size());
  row.value.reserve(bow.entries.size());
  for (auto [idx, count] : bow.entries) {
    row.index.push_back(idx);
    row.value.push_back(static_cast<double>(count));
  }
  return row;
}

SparseRow to_row(std::span<const double> dense) {
  SparseRow row;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] == 0.0) continue;
    row.index.push_back(static_cast<std::uint32_t>(i));
    row.value.push_back(dense[i]);
  }
  return row;
}

void LabeledDataset::validate() const {
  if (rows.size() != labels.size()) throw DataError("dataset rows and labels differ in length");
  if (class_names.empty()) throw DataError("dataset has no classes");
  for (auto l : labels)
    if (l >= class_names.size()) throw DataError("label index out of range");
  for (const auto& r : rows) {
    if (r.index.size() != r.value.size()) throw DataError("malformed sparse row");
    for (std::size_t i = 0; i < r.index.size(); ++i) {
      if (r.index[i] >= n_features) throw DataError("feature index out of range");
      if (i > 0 && r.index[i - 1] >= r.index[i]) throw DataError("sparse row indices not increasing");
    }
  }
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  LabeledDataset out;
  out.class_names = class_names;
  out.n_features = n_features;
  out.rows.reserve(indices.size());
  out.labels.reserve(indices.size());
  for (auto i : indices) {
    out.rows.push_back(rows.at(i));
    out.labels.push_back(labels.at(i));
  }
  return out;
}

std::vector<std::size_t> LabeledDataset::class_counts() const {
  std::vector<std::size_t> counts(class_names.size(), 0);
  for (auto l : labels) ++counts.at(l);
  return counts;
}

std::array<std::size_t, 3> stratum_sizes(std::size_t n, SplitRatios ratios) {
  if (n < 3) return {n, 0, 0};
  std::array<double, 3> r{ratios.train, ratios.dev, ratios.test};
  std::array<std::size_t, 3> sizes{};
  std::size_t assigned = 0;
  for (int k = 0; k < 3; ++k) {
    sizes[k] = static_cast<std::size_t>(std::floor(r[k] * static_cast<double>(n) + 1e-9));
    assigned += sizes[k];
  }
  for (std::size_t k = 0; assigned < n; k = (k + 1) % 3, ++assigned) ++sizes[k];
  return sizes;
}

SplitIndices split_indices(std::span<const std::uint32_t> labels, const std::vector<std::string>& class_names,
                           SplitRatios ratios, std::uint64_t seed) {
  if (ratios.train < 0 || ratios.dev < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.dev + ratios.test - 1.0) > 1e-9)
    throw DataError("split ratios must be non-negative and sum to 1");

  std::vector<std::vector<std::size_t>> by_class(class_names.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= class_names.size()) throw DataError("label out of range");
    by_class[labels[i]].push_back(i);
  }

  SplitIndices out;
  Rng rng(seed);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& idx = by_class[c];
    if (idx.empty()) continue;
    if (idx.size() < 3)
      out.warnings.push_back("class '" + class_names[c] + "' has " + std::to_string(idx.size()) +
                             " item(s); all assigned to train");
    rng.shuffle(idx.begin(), idx.end());
    auto sizes = stratum_sizes(idx.size(), ratios);
    std::size_t pos = 0;
    for (int k = 0; k < 3; ++k) {
      out.parts[k].insert(out.parts[k].end(), idx.begin() + static_cast<std::ptrdiff_t>(pos),
                          idx.begin() + static_cast<std::ptrdiff_t>(pos + sizes[k]));
      pos += sizes[k];
    }
  }
  for (auto& p : out.parts) std::sort(p.begin(), p.end());
  return out;
}

DatasetSplit split_dataset(const LabeledDataset& data, SplitRatios ratios, std::uint64_t seed) {
  data.validate();
  auto idx = split_indices(data.labels, data.class_names, ratios, seed);
  DatasetSplit out;
  out.train = data.subset(idx.parts[0]);
  out.dev = data.subset(idx.parts[1]);
  out.test = data.subset(idx.parts[2]);
  out.warnings = std::move(idx.warnings);
  return out;
}

}  // namespace crisislens
