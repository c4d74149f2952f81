#include "crisislens/categories.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "crisislens/io.hpp"

namespace crisislens {

using nlohmann::json;

std::vector<std::string> taxonomy_names() { return {kTaxonomy.begin(), kTaxonomy.end()}; }

std::optional<std::uint32_t> category_index(std::string_view label) {
  std::string key;
  for (char c : trim(label)) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    key += (c == ' ' || c == '-') ? '_' : c;
  }
  for (std::uint32_t i = 0; i < kTaxonomy.size(); ++i)
    if (kTaxonomy[i] == key) return i;
  static const std::map<std::string, std::uint32_t, std::less<>> aliases = {
      {"injured_or_dead_people", 0},
      {"infrastructure_and_utilities_damage", 1},
      {"caution_and_advice", 2},
      {"donation_and_volunteering", 3},
      {"donation_needs_or_offers_or_volunteering_services", 3},
      {"missing_and_found_people", 5},
      {"missing_trapped_or_found_people", 5},
      {"sympathy_and_support", 6},
      {"personal_updates", 7},
      {"other_useful_information", 8},
      {"not_related_or_irrelevant", 9},
      {"irrelevant", 9},
  };
  if (auto it = aliases.find(key); it != aliases.end()) return it->second;
  return std::nullopt;
}

std::vector<LabeledText> load_labeled_texts(const std::filesystem::path& path) {
  auto rows = read_csv_file(path);
  if (rows.empty()) throw DataError(path.string() + ": empty labeled file");
  const auto& header = rows.front();
  auto col = [&](std::string_view name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (trim(header[i]) == name) return i;
    throw DataError(path.string() + ": missing column '" + std::string(name) + "'");
  };
  const auto text_col = col("text"), label_col = col("label");
  std::vector<LabeledText> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() <= std::max(text_col, label_col))
      throw DataError(path.string() + ": row " + std::to_string(r + 1) + " has too few columns");
    auto cat = category_index(row[label_col]);
    if (!cat)
      throw DataError(path.string() + ": row " + std::to_string(r + 1) + " has unknown label '" +
                      row[label_col] + "'");
    out.push_back({row[text_col], *cat});
  }
  return out;
}

LabeledDataset featurize(const std::vector<LabeledText>& data, const PrepConfig& prep, const Vocabulary& vocab) {
  LabeledDataset ds;
  ds.class_names = taxonomy_names();
  ds.n_features = vocab.size();
  ds.rows.reserve(data.size());
  for (const auto& item : data) {
    ds.rows.push_back(to_row(vectorize(preprocess(item.text, prep), vocab)));
    ds.labels.push_back(item.category);
  }
  return ds;
}

TaxonomyModel train_taxonomy_model(const std::vector<LabeledText>& train, const PrepConfig& prep,
                                   const ForestParams& params, std::size_t min_df, std::size_t jobs) {
  if (train.empty()) throw DataError("taxonomy training set is empty");
  TaxonomyModel model;
  model.prep = prep;
  std::vector<Tokens> docs;
  docs.reserve(train.size());
  for (const auto& item : train) docs.push_back(preprocess(item.text, prep));
  model.vocab = build_vocabulary(docs, min_df);

  LabeledDataset ds;
  ds.class_names = taxonomy_names();
  ds.n_features = model.vocab.size();
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train[i].category >= kTaxonomy.size()) throw DataError("category index out of range");
    ds.rows.push_back(to_row(vectorize(docs[i], model.vocab)));
    ds.labels.push_back(train[i].category);
  }
  auto counts = ds.class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] == 0) model.warnings.push_back("no training examples for category '" + std::string(kTaxonomy[c]) + "'");
  model.forest = train_random_forest(ds, params, jobs);
  return model;
}

json taxonomy_model_to_json(const TaxonomyModel& model) {
  return {{"format", "crisislens.taxonomy"},
          {"version", 1},
          {"text_input", model.text_input},
          {"prep",
           {{"stopwords", std::vector<std::string>(model.prep.stopwords.begin(), model.prep.stopwords.end())},
            {"remove_mentions", model.prep.remove_mentions},
            {"min_token_len", model.prep.min_token_len}}},
          {"vocabulary", {{"terms", model.vocab.terms()}, {"df", model.vocab.document_frequencies()}}},
          {"forest", forest_to_json(model.forest)}};
}

TaxonomyModel taxonomy_model_from_json(const json& j) {
  try {
    if (j.at("format") != "crisislens.taxonomy" || j.at("version") != 1)
      throw DataError("not a version-1 taxonomy model");
    TaxonomyModel model;
    model.text_input = j.at("text_input").get<std::string>();
    const auto& p = j.at("prep");
    auto sw = p.at("stopwords").get<std::vector<std::string>>();
    model.prep.stopwords = {sw.begin(), sw.end()};
    model.prep.remove_mentions = p.at("remove_mentions").get<bool>();
    model.prep.min_token_len = p.at("min_token_len").get<std::size_t>();
    model.vocab = Vocabulary(j.at("vocabulary").at("terms").get<std::vector<std::string>>(),
                             j.at("vocabulary").at("df").get<std::vector<std::size_t>>());
    model.forest = forest_from_json(j.at("forest"));
    if (model.forest.class_names != taxonomy_names()) throw DataError("model classes do not match the taxonomy");
    if (model.forest.n_features != model.vocab.size()) throw DataError("model vocabulary size mismatch");
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed taxonomy model: ") + e.what());
  }
}

std::vector<CategoryAssignment> classify_corpus(const TaxonomyModel& model, const Corpus& corpus, std::size_t jobs) {
  std::vector<CategoryAssignment> out(corpus.records.size());
  parallel_for(corpus.records.size(), jobs, [&](std::size_t i) {
    const auto& rec = corpus.records[i];
    auto pred = predict(model.forest, to_row(vectorize(preprocess(rec.text, model.prep), model.vocab)));
    out[i] = {rec.id, pred.label, pred.confidence};
  });
  return out;
}

std::string assignments_to_csv(const std::vector<CategoryAssignment>& assignments) {
  std::string out = "tweet_id,category,confidence\n";
  for (const auto& a : assignments) {
    out += csv_field(a.tweet_id);
    out += ',';
    out += kTaxonomy.at(a.category);
    out += ',';
    out += format_double(a.confidence);
    out += '\n';
  }
  return out;
}

std::vector<CategoryAssignment> assignments_from_csv(const std::filesystem::path& path) {
  auto rows = read_csv_file(path);
  if (rows.empty() || rows.front() != CsvRow{"tweet_id", "category", "confidence"})
    throw DataError(path.string() + ": not an assignments file");
  std::vector<CategoryAssignment> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 3) throw DataError(path.string() + ": malformed row " + std::to_string(r + 1));
    auto cat = category_index(row[1]);
    if (!cat) throw DataError(path.string() + ": unknown category '" + row[1] + "'");
    out.push_back({row[0], *cat, std::stod(row[2])});
  }
  return out;
}

std::vector<std::uint32_t> categories_of(const std::vector<CategoryAssignment>& assignments) {
  std::vector<std::uint32_t> out;
  out.reserve(assignments.size());
  for (const auto& a : assignments) out.push_back(a.category);
  return out;
}

namespace {

DailySeries empty_series(std::string name, const std::string& event, const DayBuckets& buckets, SeriesUnit unit) {
  DailySeries s;
  s.name = std::move(name);
  s.event = event;
  s.start = buckets.empty() ? Day{} : buckets.begin()->first;
  s.values.assign(buckets.size(), 0.0);
  s.unit = unit;
  return s;
}

}  // namespace

std::vector<DailySeries> daily_category_distribution(std::span<const std::uint32_t> category_of,
                                                     const DayBuckets& buckets, const std::string& event) {
  std::vector<DailySeries> series;
  for (auto name : kTaxonomy)
    series.push_back(empty_series("category_" + std::string(name), event, buckets, SeriesUnit::percent));
  std::size_t d = 0;
  for (const auto& [day, idx] : buckets) {
    std::vector<std::size_t> counts(kTaxonomy.size(), 0);
    for (auto i : idx) ++counts.at(category_of[i]);
    if (!idx.empty())
      for (std::size_t c = 0; c < counts.size(); ++c)
        series[c].values[d] = 100.0 * static_cast<double>(counts[c]) / static_cast<double>(idx.size());
    ++d;
  }
  return series;
}

RelevanceSeries relevance_rollup(std::span<const std::uint32_t> category_of, const DayBuckets& buckets,
                                 const std::string& event) {
  RelevanceSeries out{empty_series("relevant_fraction", event, buckets, SeriesUnit::fraction),
                      empty_series("irrelevant_fraction", event, buckets, SeriesUnit::fraction)};
  std::size_t d = 0;
  for (const auto& [day, idx] : buckets) {
    if (!idx.empty()) {
      auto irrelevant = static_cast<double>(
          std::count_if(idx.begin(), idx.end(), [&](std::size_t i) { return category_of[i] == kNotRelated; }));
      out.irrelevant.values[d] = irrelevant / static_cast<double>(idx.size());
      out.relevant.values[d] = 1.0 - out.irrelevant.values[d];
    }
    ++d;
  }
  return out;
}

}  // namespace crisislens
