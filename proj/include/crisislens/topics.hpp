#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crisislens/common.hpp"
#include "crisislens/textprep.hpp"

namespace crisislens {

struct LdaConfig {
  std::size_t topics = 10;
  std::optional<double> alpha;  // symmetric doc-topic prior, default 50 / topics
  double beta = 0.01;           // symmetric topic-word prior
  std::size_t iterations = 1000;
  std::uint64_t seed = 0;

  double resolved_alpha() const { return alpha ? *alpha : 50.0 / static_cast<double>(topics); }
  void validate() const;
};

// A document is a sequence of vocabulary indices.
using WordIds = std::vector<std::uint32_t>;

struct TopicModel {
  std::size_t topics = 0;
  std::size_t vocab_size = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<std::vector<std::uint32_t>> assignments;  // per document, per token
  std::vector<std::vector<std::uint32_t>> topic_word;   // [k][w]
  std::vector<std::vector<std::uint32_t>> doc_topic;    // [d][k]
  std::vector<std::uint32_t> topic_totals;              // [k]
  std::vector<std::vector<double>> phi;                 // [k][w]
  std::vector<std::vector<double>> theta;               // [d][k]
};

// Collapsed Gibbs sampler. Exposed as a class so callers can observe the
// count tables between sweeps.
class LdaSampler {
public:
  LdaSampler(std::vector<WordIds> docs, std::size_t vocab_size, const LdaConfig& config);

  void sweep();
  std::size_t sweeps_done() const { return sweeps_; }

  const std::vector<WordIds>& docs() const { return docs_; }
  const std::vector<std::vector<std::uint32_t>>& assignments() const { return z_; }
  const std::vector<std::uint32_t>& topic_word() const { return n_kw_; }  // row-major [k * V + w]
  const std::vector<std::uint32_t>& doc_topic() const { return n_dk_; }   // row-major [d * K + k]
  const std::vector<std::uint32_t>& topic_totals() const { return n_k_; }
  std::size_t topics() const { return k_; }
  std::size_t vocab_size() const { return v_; }

  // Unnormalized conditional weights for token i of doc d with that token
  // excluded from the counts: (n_dk + alpha)(n_kw + beta)/(n_k + V beta).
  std::vector<double> conditional(std::size_t d, std::size_t i) const;

  // Point estimate from the current sample.
  TopicModel estimate() const;

private:
  std::vector<WordIds> docs_;
  std::size_t k_, v_;
  double alpha_, beta_;
  Rng rng_;
  std::vector<std::vector<std::uint32_t>> z_;
  std::vector<std::uint32_t> n_kw_, n_dk_, n_k_;
  std::vector<double> weights_;
  std::size_t sweeps_ = 0;
};

// Random initialization followed by config.iterations sweeps. Throws
// DataError when no document has a token.
TopicModel fit_lda(const std::vector<WordIds>& docs, std::size_t vocab_size, const LdaConfig& config);

struct TopicTermRow {
  std::string term;
  double p_topic = 0.0;
  std::uint32_t topic_count = 0;
  std::uint64_t day_count = 0;
};

// Top-n terms of topic k by phi, ties broken by term. `day_counts` is the
// whole-day frequency per vocabulary index.
std::vector<TopicTermRow> top_terms(const TopicModel& model, std::size_t k, const Vocabulary& vocab,
                                    const std::vector<std::uint64_t>& day_counts, std::size_t n = 30);

// Topic holding the most tokens; ties go to the lowest index.
std::size_t prevalent_topic(const TopicModel& model);

// Everything needed to model one day: vocabulary, word ids, frequencies.
struct DayDocuments {
  Vocabulary vocab;
  std::vector<WordIds> docs;
  std::vector<std::uint64_t> day_counts;
};

DayDocuments prepare_day(const std::vector<Tokens>& token_docs);

nlohmann::json topics_to_json(const std::string& day, const TopicModel& model, const Vocabulary& vocab,
                              const std::vector<std::uint64_t>& day_counts, std::size_t n = 30);

}  // namespace crisislens
