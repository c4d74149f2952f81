#include "crisislens/topics.hpp"

#include <algorithm>
#include <numeric>

namespace crisislens {

using nlohmann::json;

void LdaConfig::validate() const {
  if (topics < 2) throw ConfigError("LDA needs at least 2 topics");
  if (!(resolved_alpha() > 0)) throw ConfigError("LDA alpha must be positive");
  if (!(beta > 0)) throw ConfigError("LDA beta must be positive");
}

LdaSampler::LdaSampler(std::vector<WordIds> docs, std::size_t vocab_size, const LdaConfig& config)
    : docs_(std::move(docs)),
      k_(config.topics),
      v_(vocab_size),
      alpha_(config.resolved_alpha()),
      beta_(config.beta),
      rng_(config.seed),
      n_kw_(k_ * v_, 0),
      n_dk_(docs_.size() * k_, 0),
      n_k_(k_, 0),
      weights_(k_, 0.0) {
  config.validate();
  if (v_ == 0) throw DataError("LDA vocabulary is empty");
  std::size_t tokens = 0;
  for (const auto& doc : docs_) {
    tokens += doc.size();
    for (auto w : doc)
      if (w >= v_) throw DataError("word id outside the vocabulary");
  }
  if (tokens == 0) throw DataError("LDA corpus has no tokens");

  z_.resize(docs_.size());
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    z_[d].resize(docs_[d].size());
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      auto k = static_cast<std::uint32_t>(rng_.below(k_));
      z_[d][i] = k;
      ++n_kw_[k * v_ + docs_[d][i]];
      ++n_dk_[d * k_ + k];
      ++n_k_[k];
    }
  }
}

std::vector<double> LdaSampler::conditional(std::size_t d, std::size_t i) const {
  const auto w = docs_.at(d).at(i);
  const auto cur = z_[d][i];
  const double vbeta = static_cast<double>(v_) * beta_;
  std::vector<double> p(k_);
  for (std::size_t k = 0; k < k_; ++k) {
    const double own = k == cur ? 1.0 : 0.0;
    p[k] = (n_dk_[d * k_ + k] - own + alpha_) * (n_kw_[k * v_ + w] - own + beta_) / (n_k_[k] - own + vbeta);
  }
  return p;
}

void LdaSampler::sweep() {
  const double vbeta = static_cast<double>(v_) * beta_;
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    auto* ndk = &n_dk_[d * k_];
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      const auto w = docs_[d][i];
      const auto old = z_[d][i];
      --n_kw_[old * v_ + w];
      --ndk[old];
      --n_k_[old];
      double total = 0.0;
      for (std::size_t k = 0; k < k_; ++k) {
        total += (ndk[k] + alpha_) * (n_kw_[k * v_ + w] + beta_) / (n_k_[k] + vbeta);
        weights_[k] = total;
      }
      const double u = rng_.uniform() * total;
      std::size_t k = 0;
      while (k + 1 < k_ && weights_[k] <= u) ++k;
      z_[d][i] = static_cast<std::uint32_t>(k);
      ++n_kw_[k * v_ + w];
      ++ndk[k];
      ++n_k_[k];
    }
  }
  ++sweeps_;
}

TopicModel LdaSampler::estimate() const {
  TopicModel m;
  m.topics = k_;
  m.vocab_size = v_;
  m.alpha = alpha_;
  m.beta = beta_;
  m.assignments = z_;
  m.topic_word.assign(k_, std::vector<std::uint32_t>(v_));
  m.phi.assign(k_, std::vector<double>(v_));
  const double vbeta = static_cast<double>(v_) * beta_;
  for (std::size_t k = 0; k < k_; ++k) {
    for (std::size_t w = 0; w < v_; ++w) {
      m.topic_word[k][w] = n_kw_[k * v_ + w];
      m.phi[k][w] = (n_kw_[k * v_ + w] + beta_) / (n_k_[k] + vbeta);
    }
  }
  m.topic_totals = n_k_;
  m.doc_topic.assign(docs_.size(), std::vector<std::uint32_t>(k_));
  m.theta.assign(docs_.size(), std::vector<double>(k_));
  const double kalpha = static_cast<double>(k_) * alpha_;
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    for (std::size_t k = 0; k < k_; ++k) {
      m.doc_topic[d][k] = n_dk_[d * k_ + k];
      m.theta[d][k] = (n_dk_[d * k_ + k] + alpha_) / (static_cast<double>(docs_[d].size()) + kalpha);
    }
  }
  return m;
}

TopicModel fit_lda(const std::vector<WordIds>& docs, std::size_t vocab_size, const LdaConfig& config) {
  LdaSampler sampler(docs, vocab_size, config);
  for (std::size_t it = 0; it < config.iterations; ++it) sampler.sweep();
  return sampler.estimate();
}

std::vector<TopicTermRow> top_terms(const TopicModel& model, std::size_t k, const Vocabulary& vocab,
                                    const std::vector<std::uint64_t>& day_counts, std::size_t n) {
  if (k >= model.topics) throw DataError("topic index out of range");
  if (vocab.size() != model.vocab_size || day_counts.size() != model.vocab_size)
    throw DataError("vocabulary does not match the topic model");
  const auto& row = model.phi[k];
  std::vector<std::uint32_t> order(row.size());
  std::iota(order.begin(), order.end(), 0u);
  auto cmp = [&](std::uint32_t a, std::uint32_t b) {
    if (row[a] != row[b]) return row[a] > row[b];
    return vocab.term(a) < vocab.term(b);
  };
  const std::size_t take = std::min(n, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(), cmp);
  std::vector<TopicTermRow> out;
  for (std::size_t i = 0; i < take; ++i) {
    auto w = order[i];
    out.push_back({vocab.term(w), row[w], model.topic_word[k][w], day_counts[w]});
  }
  return out;
}

std::size_t prevalent_topic(const TopicModel& model) {
  std::vector<std::uint64_t> mass(model.topics, 0);
  for (const auto& d : model.doc_topic)
    for (std::size_t k = 0; k < model.topics; ++k) mass[k] += d[k];
  return static_cast<std::size_t>(std::max_element(mass.begin(), mass.end()) - mass.begin());
}

DayDocuments prepare_day(const std::vector<Tokens>& token_docs) {
  DayDocuments out;
  out.vocab = build_vocabulary(token_docs, 1);
  out.day_counts.assign(out.vocab.size(), 0);
  out.docs.reserve(token_docs.size());
  for (const auto& doc : token_docs) {
    WordIds ids;
    ids.reserve(doc.size());
    for (const auto& t : doc) {
      auto w = *out.vocab.index_of(t);
      ids.push_back(w);
      ++out.day_counts[w];
    }
    out.docs.push_back(std::move(ids));
  }
  return out;
}

json topics_to_json(const std::string& day, const TopicModel& model, const Vocabulary& vocab,
                    const std::vector<std::uint64_t>& day_counts, std::size_t n) {
  const auto prevalent = prevalent_topic(model);
  json topics = json::array();
  for (std::size_t k = 0; k < model.topics; ++k) {
    json terms = json::array();
    for (const auto& row : top_terms(model, k, vocab, day_counts, n))
      terms.push_back({{"term", row.term},
                       {"p_topic", row.p_topic},
                       {"topic_count", row.topic_count},
                       {"day_count", row.day_count}});
    topics.push_back({{"topic", k},
                      {"tokens", model.topic_totals[k]},
                      {"prevalent", k == prevalent},
                      {"terms", std::move(terms)}});
  }
  return {{"day", day},
          {"topics_count", model.topics},
          {"documents", model.doc_topic.size()},
          {"prevalent_topic", prevalent},
          {"alpha", model.alpha},
          {"beta", model.beta},
          {"topics", std::move(topics)}};
}

}  // namespace crisislens
