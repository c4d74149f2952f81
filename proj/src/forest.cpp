#include <algorithm>
#include <cmath>
#include <numeric>

#include "crisislens/io.hpp"
#include "crisislens/learn.hpp"

namespace crisislens {

using nlohmann::json;

std::size_t ForestParams::resolved_max_features(std::size_t n_features) const {
  if (max_features) return std::max<std::size_t>(1, std::min(*max_features, std::max<std::size_t>(n_features, 1)));
  auto m = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_features))));
  return std::max<std::size_t>(1, m);
}

namespace {

std::uint32_t argmax_lowest(std::span<const std::uint32_t> counts) {
  std::uint32_t best = 0;
  for (std::uint32_t c = 1; c < counts.size(); ++c)
    if (counts[c] > counts[best]) best = c;
  return best;
}

// Weighted Gini of a split is n - (A/nL + B/nR) where A, B are the sums of
// squared class counts on each side, so the best split maximizes
// (A*nR + B*nL) / (nL*nR). Kept as an exact integer fraction.
struct SplitScore {
  unsigned __int128 num = 0;
  unsigned __int128 den = 1;

  bool better_than(const SplitScore& other) const { return num * other.den > other.num * den; }
};

struct SplitChoice {
  bool found = false;
  std::uint32_t feature = 0;
  double threshold = 0.0;
  SplitScore score;
};

class TreeBuilder {
public:
  TreeBuilder(const LabeledDataset& data, const ForestParams& params, Rng& rng)
      : data_(data),
        params_(params),
        rng_(rng),
        n_classes_(data.class_names.size()),
        max_features_(params.resolved_max_features(data.n_features)),
        perm_(data.n_features),
        stamp_(data.n_features, 0) {
    std::iota(perm_.begin(), perm_.end(), 0u);
  }

  DecisionTree build(std::vector<std::size_t> sample) {
    DecisionTree tree;
    struct Pending {
      std::uint32_t node;
      std::vector<std::size_t> sample;
      std::size_t depth;
    };
    tree.nodes.emplace_back();
    std::vector<Pending> stack;
    stack.push_back({0, std::move(sample), 0});
    while (!stack.empty()) {
      Pending job = std::move(stack.back());
      stack.pop_back();
      auto hist = histogram(job.sample);
      SplitChoice split;
      if (splittable(job.sample, hist, job.depth)) split = find_split(job.sample);
      if (!split.found) {
        tree.nodes[job.node].histogram = std::move(hist);
        continue;
      }
      std::vector<std::size_t> left, right;
      for (auto i : job.sample) (data_.rows[i].at(split.feature) <= split.threshold ? left : right).push_back(i);
      auto l = static_cast<std::uint32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& node = tree.nodes[job.node];
      node.feature = static_cast<std::int32_t>(split.feature);
      node.threshold = split.threshold;
      node.left = l;
      node.right = l + 1;
      // Right first so the left subtree is expanded first.
      stack.push_back({l + 1, std::move(right), job.depth + 1});
      stack.push_back({l, std::move(left), job.depth + 1});
    }
    return tree;
  }

private:
  std::vector<std::uint32_t> histogram(const std::vector<std::size_t>& sample) const {
    std::vector<std::uint32_t> h(n_classes_, 0);
    for (auto i : sample) ++h[data_.labels[i]];
    return h;
  }

  bool splittable(const std::vector<std::size_t>& sample, const std::vector<std::uint32_t>& hist,
                  std::size_t depth) const {
    if (params_.max_depth && depth >= *params_.max_depth) return false;
    if (sample.size() < 2 * std::max<std::size_t>(1, params_.min_leaf)) return false;
    if (std::count_if(hist.begin(), hist.end(), [](auto c) { return c > 0; }) <= 1) return false;
    const auto& first = data_.rows[sample.front()];
    return std::any_of(sample.begin(), sample.end(), [&](auto i) { return !(data_.rows[i] == first); });
  }

  SplitChoice find_split(const std::vector<std::size_t>& sample) {
    // Features present in any row of the node; all others are constant 0 here.
    ++generation_;
    for (auto i : sample)
      for (auto f : data_.rows[i].index) stamp_[f] = generation_;

    SplitChoice best;
    const std::size_t n_features = perm_.size();
    std::size_t drawn = 0;
    while (drawn < n_features && (drawn < max_features_ || !best.found)) {
      auto j = drawn + static_cast<std::size_t>(rng_.below(n_features - drawn));
      std::swap(perm_[drawn], perm_[j]);
      auto f = perm_[drawn++];
      if (stamp_[f] != generation_) continue;
      evaluate_feature(sample, f, best);
    }
    return best;
  }

  void evaluate_feature(const std::vector<std::size_t>& sample, std::uint32_t f, SplitChoice& best) {
    values_.clear();
    for (auto i : sample) values_.emplace_back(data_.rows[i].at(f), data_.labels[i]);
    std::sort(values_.begin(), values_.end());
    if (values_.front().first == values_.back().first) return;

    const std::size_t n = values_.size();
    const std::size_t min_leaf = std::max<std::size_t>(1, params_.min_leaf);
    left_.assign(n_classes_, 0);
    right_.assign(n_classes_, 0);
    for (auto& v : values_) ++right_[v.second];
    unsigned __int128 sq_left = 0, sq_right = 0;
    for (auto c : right_) sq_right += static_cast<unsigned __int128>(c) * c;

    for (std::size_t i = 0; i + 1 < n; ++i) {
      auto c = values_[i].second;
      sq_left += 2 * static_cast<unsigned __int128>(left_[c]) + 1;
      ++left_[c];
      sq_right -= 2 * static_cast<unsigned __int128>(right_[c]) - 1;
      --right_[c];
      if (values_[i].first == values_[i + 1].first) continue;
      std::size_t n_left = i + 1, n_right = n - n_left;
      if (n_left < min_leaf || n_right < min_leaf) continue;
      SplitScore score{sq_left * n_right + sq_right * n_left,
                       static_cast<unsigned __int128>(n_left) * n_right};
      if (best.found && !score.better_than(best.score)) continue;
      double lo = values_[i].first, hi = values_[i + 1].first;
      double mid = lo + (hi - lo) / 2.0;
      if (!(mid < hi)) mid = lo;
      best = {true, f, mid, score};
    }
  }

  const LabeledDataset& data_;
  const ForestParams& params_;
  Rng& rng_;
  std::size_t n_classes_;
  std::size_t max_features_;
  std::vector<std::uint32_t> perm_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t generation_ = 0;
  std::vector<std::pair<double, std::uint32_t>> values_;
  std::vector<std::uint32_t> left_, right_;
};

}  // namespace

const TreeNode& DecisionTree::leaf_for(const SparseRow& row) const {
  if (nodes.empty()) throw DataError("empty decision tree");
  const TreeNode* node = &nodes[0];
  while (!node->is_leaf())
    node = &nodes.at(row.at(static_cast<std::uint32_t>(node->feature)) <= node->threshold ? node->left : node->right);
  return *node;
}

std::uint32_t DecisionTree::predict(const SparseRow& row) const { return argmax_lowest(leaf_for(row).histogram); }

std::size_t DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes[i].is_leaf()) {
      stack.emplace_back(nodes[i].left, d + 1);
      stack.emplace_back(nodes[i].right, d + 1);
    }
  }
  return deepest;
}

DecisionTree train_decision_tree(const LabeledDataset& data, std::span<const std::size_t> sample,
                                 const ForestParams& params, Rng& rng) {
  if (sample.empty()) throw DataError("cannot train a decision tree on no data");
  TreeBuilder builder(data, params, rng);
  return builder.build(std::vector<std::size_t>(sample.begin(), sample.end()));
}

DecisionTree train_decision_tree(const LabeledDataset& data, const ForestParams& params, Rng& rng) {
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return train_decision_tree(data, all, params, rng);
}

ForestModel train_random_forest(const LabeledDataset& data, const ForestParams& params, std::size_t jobs) {
  data.validate();
  if (data.empty()) throw DataError("cannot train a forest on an empty dataset");
  if (params.n_trees < 1) throw DataError("n_trees must be >= 1");
  if (params.max_features && *params.max_features < 1) throw DataError("max_features must be >= 1");

  ForestModel model;
  model.class_names = data.class_names;
  model.n_features = data.n_features;
  model.params = params;
  model.params.max_features = params.resolved_max_features(data.n_features);
  model.trees.resize(params.n_trees);
  parallel_for(params.n_trees, jobs, [&](std::size_t t) {
    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> sample(data.size());
    if (params.bootstrap) {
      for (auto& s : sample) s = static_cast<std::size_t>(rng.below(data.size()));
    } else {
      std::iota(sample.begin(), sample.end(), std::size_t{0});
    }
    model.trees[t] = train_decision_tree(data, sample, model.params, rng);
  });
  return model;
}

Prediction predict(const ForestModel& model, const SparseRow& row) {
  if (model.trees.empty()) throw DataError("forest has no trees");
  std::vector<std::uint32_t> votes(model.class_names.size(), 0);
  for (const auto& tree : model.trees) ++votes.at(tree.predict(row));
  auto winner = argmax_lowest(votes);
  return {winner, static_cast<double>(votes[winner]) / static_cast<double>(model.trees.size())};
}

json forest_to_json(const ForestModel& model) {
  json params = {
      {"n_trees", model.params.n_trees},
      {"max_features", model.params.max_features ? json(*model.params.max_features) : json(nullptr)},
      {"min_leaf", model.params.min_leaf},
      {"max_depth", model.params.max_depth ? json(*model.params.max_depth) : json(nullptr)},
      {"seed", model.params.seed},
      {"bootstrap", model.params.bootstrap},
  };
  json trees = json::array();
  for (const auto& tree : model.trees) {
    json nodes = json::array();
    for (const auto& n : tree.nodes) {
      if (n.is_leaf())
        nodes.push_back(json::array({-1, n.histogram}));
      else
        nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right}));
    }
    trees.push_back(std::move(nodes));
  }
  return {{"format", "crisislens.forest"},
          {"version", 1},
          {"class_names", model.class_names},
          {"n_features", model.n_features},
          {"params", std::move(params)},
          {"trees", std::move(trees)}};
}

ForestModel forest_from_json(const json& j) {
  try {
    if (j.at("format") != "crisislens.forest" || j.at("version") != 1)
      throw DataError("not a version-1 forest model");
    ForestModel model;
    model.class_names = j.at("class_names").get<std::vector<std::string>>();
    model.n_features = j.at("n_features").get<std::size_t>();
    const auto& p = j.at("params");
    model.params.n_trees = p.at("n_trees").get<std::size_t>();
    if (!p.at("max_features").is_null()) model.params.max_features = p.at("max_features").get<std::size_t>();
    model.params.min_leaf = p.at("min_leaf").get<std::size_t>();
    if (!p.at("max_depth").is_null()) model.params.max_depth = p.at("max_depth").get<std::size_t>();
    model.params.seed = p.at("seed").get<std::uint64_t>();
    model.params.bootstrap = p.at("bootstrap").get<bool>();
    for (const auto& jt : j.at("trees")) {
      DecisionTree tree;
      for (const auto& jn : jt) {
        TreeNode n;
        n.feature = jn.at(0).get<std::int32_t>();
        if (n.is_leaf()) {
          n.histogram = jn.at(1).get<std::vector<std::uint32_t>>();
          if (n.histogram.size() != model.class_names.size()) throw DataError("leaf histogram has wrong width");
        } else {
          n.threshold = jn.at(1).get<double>();
          n.left = jn.at(2).get<std::uint32_t>();
          n.right = jn.at(3).get<std::uint32_t>();
          if (static_cast<std::size_t>(n.feature) >= model.n_features) throw DataError("node feature out of range");
        }
        tree.nodes.push_back(std::move(n));
      }
      for (const auto& n : tree.nodes)
        if (!n.is_leaf() && (n.left >= tree.nodes.size() || n.right >= tree.nodes.size()))
          throw DataError("node child out of range");
      model.trees.push_back(std::move(tree));
    }
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed forest model: ") + e.what());
  }
}

}  // namespace crisislens
