#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crisislens/common.hpp"
#include "crisislens/textprep.hpp"

namespace crisislens {

// Sparse feature row; absent features are 0. Indices strictly increasing.
struct SparseRow {
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  double at(std::uint32_t feature) const;
  std::size_t nnz() const { return index.size(); }
  bool operator==(const SparseRow&) const = default;
};

SparseRow to_row(const BowVector& bow);
// Zeros are dropped.
SparseRow to_row(std::span<const double> dense);

struct LabeledDataset {
  std::vector<SparseRow> rows;
  std::vector<std::uint32_t> labels;
  std::vector<std::string> class_names;
  std::size_t n_features = 0;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
  // Throws DataError when rows/labels disagree or a label or feature is out of range.
  void validate() const;
  LabeledDataset subset(std::span<const std::size_t> indices) const;
  std::vector<std::size_t> class_counts() const;
};

struct SplitRatios {
  double train = 0.6;
  double dev = 0.2;
  double test = 0.2;
};

struct DatasetSplit {
  LabeledDataset train;
  LabeledDataset dev;
  LabeledDataset test;
  std::vector<std::string> warnings;
};

// Stratified split. Per class, dev and test receive floor(ratio * n_c) items
// and the remainder goes round-robin to train, dev, test (train first).
// Classes with fewer than 3 items go to train entirely, with a warning.
DatasetSplit split_dataset(const LabeledDataset& data, SplitRatios ratios, std::uint64_t seed);

// The same split as positions into `labels` (train, dev, test), each ascending.
struct SplitIndices {
  std::array<std::vector<std::size_t>, 3> parts;
  std::vector<std::string> warnings;
};
SplitIndices split_indices(std::span<const std::uint32_t> labels, const std::vector<std::string>& class_names,
                           SplitRatios ratios, std::uint64_t seed);

// Per-class sizes produced by split_dataset for a class of n items.
std::array<std::size_t, 3> stratum_sizes(std::size_t n, SplitRatios ratios);

struct ForestParams {
  std::size_t n_trees = 200;
  std::optional<std::size_t> max_features;  // default ceil(sqrt(n_features))
  std::size_t min_leaf = 1;
  std::optional<std::size_t> max_depth;  // unlimited when unset
  std::uint64_t seed = 0;
  bool bootstrap = true;

  std::size_t resolved_max_features(std::size_t n_features) const;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // go left when value <= threshold
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  std::vector<std::uint32_t> histogram;  // leaves only

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& leaf_for(const SparseRow& row) const;
  // Majority class of the reached leaf; ties go to the lowest class index.
  std::uint32_t predict(const SparseRow& row) const;
  std::size_t depth() const;
  bool operator==(const DecisionTree&) const = default;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  std::vector<std::string> class_names;
  std::size_t n_features = 0;
  ForestParams params;
};

// CART tree on `sample` (indices into data, duplicates allowed): Gini
// impurity, max_features features drawn per node without replacement, best
// threshold among midpoints of sorted distinct values.
DecisionTree train_decision_tree(const LabeledDataset& data, std::span<const std::size_t> sample,
                                 const ForestParams& params, Rng& rng);
DecisionTree train_decision_tree(const LabeledDataset& data, const ForestParams& params, Rng& rng);

// Each tree trains on a bootstrap sample with its own RNG derived from
// (seed, tree index), so the result does not depend on `jobs`.
ForestModel train_random_forest(const LabeledDataset& data, const ForestParams& params, std::size_t jobs = 1);

struct Prediction {
  std::uint32_t label = 0;
  double confidence = 0.0;  // winning votes / n_trees
};

Prediction predict(const ForestModel& model, const SparseRow& row);

nlohmann::json forest_to_json(const ForestModel& model);
ForestModel forest_from_json(const nlohmann::json& j);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvalReport {
  std::vector<std::string> class_names;
  std::vector<ClassMetrics> per_class;
  double accuracy = 0.0;
  double micro_recall = 0.0;
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;
  std::vector<std::vector<std::size_t>> confusion;  // [gold][predicted]
};

EvalReport evaluate(std::span<const std::uint32_t> predicted, std::span<const std::uint32_t> gold,
                    const std::vector<std::string>& class_names);
nlohmann::json eval_to_json(const EvalReport& report);

class UndefinedCorrelation : public DataError {
public:
  using DataError::DataError;
};

struct CorrelationResult {
  double r = 0.0;
  double p = 1.0;  // two-sided
  std::size_t n = 0;
};

// Sample Pearson correlation with a two-sided t-test p-value.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// Two-sided tail probability P(|T| >= |t|) for Student's t with df degrees of freedom.
double student_t_two_sided(double t, double df);

struct TrendLine {
  double slope = 0.0;
  double intercept = 0.0;
};

// Least squares over day index 0..n-1. Needs at least 2 points.
TrendLine ols_trend(std::span<const double> series);

}  // namespace crisislens
