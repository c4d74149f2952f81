#include "crisislens/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "crisislens/categories.hpp"
#include "crisislens/entities.hpp"
#include "crisislens/io.hpp"
#include "crisislens/report.hpp"

namespace crisislens {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- config

namespace {

class Section {
public:
  Section(std::string name, const boost::property_tree::ptree& tree) : name_(std::move(name)), tree_(tree) {
    for (const auto& [key, value] : tree_) {
      (void)value;
      keys_.insert(key);
    }
  }

  std::optional<std::string> get(const std::string& key) {
    used_.insert(key);
    auto it = tree_.find(key);
    if (it == tree_.not_found()) return std::nullopt;
    return std::string(trim(it->second.data()));
  }

  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v || v->empty()) throw ConfigError("[" + name_ + "] needs '" + key + "'");
    return *v;
  }

  template <typename T>
  std::optional<T> number(const std::string& key) {
    auto v = get(key);
    if (!v || v->empty()) return std::nullopt;
    T out{};
    auto res = std::from_chars(v->data(), v->data() + v->size(), out);
    if (res.ec != std::errc{} || res.ptr != v->data() + v->size())
      throw ConfigError("[" + name_ + "] " + key + ": invalid number '" + *v + "'");
    return out;
  }

  std::optional<bool> boolean(const std::string& key) {
    auto v = get(key);
    if (!v || v->empty()) return std::nullopt;
    auto s = to_lower_ascii(*v);
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    throw ConfigError("[" + name_ + "] " + key + ": expected true or false, got '" + *v + "'");
  }

  // Unknown keys are almost always typos.
  void finish() const {
    for (const auto& k : keys_)
      if (!used_.count(k)) throw ConfigError("[" + name_ + "] unknown key '" + k + "'");
  }

private:
  std::string name_;
  const boost::property_tree::ptree& tree_;
  std::set<std::string> keys_, used_;
};

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto comma = s.find(',', pos);
    if (comma == std::string_view::npos) comma = s.size();
    auto item = trim(s.substr(pos, comma - pos));
    if (!item.empty()) out.emplace_back(item);
    pos = comma + 1;
  }
  return out;
}

fs::path resolve(const fs::path& base, const std::string& value) {
  fs::path p(value);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

fs::path existing_file(const fs::path& base, const std::string& value, const std::string& what) {
  auto p = resolve(base, value);
  if (!fs::is_regular_file(p)) throw ConfigError(what + ": no such file " + p.string());
  return p;
}

fs::path existing_dir(const fs::path& base, const std::string& value, const std::string& what) {
  auto p = resolve(base, value);
  if (!fs::is_directory(p)) throw ConfigError(what + ": no such directory " + p.string());
  return p;
}

}  // namespace

PipelineConfig parse_config(const std::string& text, const fs::path& base_dir) {
  boost::property_tree::ptree tree;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }

  PipelineConfig c;
  c.source_text = text;
  std::set<std::string> seen;
  auto section = [&](const std::string& name) -> std::optional<Section> {
    auto it = tree.find(name);
    if (it == tree.not_found()) return std::nullopt;
    seen.insert(name);
    return Section(name, it->second);
  };

  for (const auto& [name, body] : tree) {
    if (body.data().size() && body.empty()) throw ConfigError("config key '" + name + "' is outside any section");
    if (!name.starts_with("event.")) continue;
    seen.insert(name);
    Section s(name, body);
    EventConfig ev;
    ev.window.name = name.substr(6);
    if (ev.window.name.empty() || ev.window.name.find_first_of("/\\") != std::string::npos || ev.window.name == "." ||
        ev.window.name == "..")
      throw ConfigError("[" + name + "] invalid event name");
    ev.corpus = existing_file(base_dir, s.require("corpus"), "[" + name + "] corpus");
    ev.images = existing_dir(base_dir, s.require("images"), "[" + name + "] images");
    for (auto& k : split_list(s.require("keywords"))) ev.window.keywords.push_back(to_lower_ascii(k));
    try {
      ev.window.start_day = parse_day(s.require("start"));
      ev.window.end_day = parse_day(s.require("end"));
    } catch (const DataError& e) {
      throw ConfigError("[" + name + "] " + e.what());
    }
    ev.window.validate();
    s.finish();
    c.events.push_back(std::move(ev));
  }
  if (c.events.empty()) throw ConfigError("config defines no [event.NAME] section");

  if (auto s = section("pipeline")) {
    if (auto v = s->get("out"); v && !v->empty()) c.out = resolve(base_dir, *v);
    else c.out = base_dir / "out";
    if (auto v = s->number<std::uint64_t>("seed")) c.seed = *v;
    if (auto v = s->number<std::size_t>("jobs")) c.jobs = std::max<std::size_t>(1, *v);
    s->finish();
  } else {
    c.out = base_dir / "out";
  }

  {
    auto s = section("resources");
    if (!s) throw ConfigError("config needs a [resources] section");
    c.stopwords = existing_file(base_dir, s->require("stopwords"), "[resources] stopwords");
    c.lexicon = existing_file(base_dir, s->require("lexicon"), "[resources] lexicon");
    c.persons = existing_file(base_dir, s->require("persons"), "[resources] persons");
    c.organizations = existing_file(base_dir, s->require("organizations"), "[resources] organizations");
    c.locations = existing_file(base_dir, s->require("locations"), "[resources] locations");
    if (auto v = s->get("curation"); v && !v->empty()) c.curation = existing_file(base_dir, *v, "[resources] curation");
    s->finish();
  }
  {
    auto s = section("training");
    if (!s) throw ConfigError("config needs a [training] section");
    c.taxonomy_train = existing_file(base_dir, s->require("taxonomy"), "[training] taxonomy");
    c.image_train_dir = existing_dir(base_dir, s->require("image_dir"), "[training] image_dir");
    c.relevancy_labels = existing_file(base_dir, s->require("relevancy"), "[training] relevancy");
    c.damage_labels = existing_file(base_dir, s->require("damage"), "[training] damage");
    if (auto v = s->number<std::size_t>("min_df")) c.min_df = *v;
    if (c.min_df < 1) throw ConfigError("[training] min_df must be at least 1");
    s->finish();
  }
  if (auto s = section("forest")) {
    if (auto v = s->number<std::size_t>("trees")) c.forest.n_trees = *v;
    if (auto v = s->number<std::size_t>("max_features")) c.forest.max_features = *v;
    if (auto v = s->number<std::size_t>("min_leaf")) c.forest.min_leaf = *v;
    if (auto v = s->number<std::size_t>("max_depth")) c.forest.max_depth = *v;
    s->finish();
  }
  if (c.forest.n_trees < 1) throw ConfigError("[forest] trees must be at least 1");
  if (c.forest.min_leaf < 1) throw ConfigError("[forest] min_leaf must be at least 1");
  if (auto s = section("lda")) {
    if (auto v = s->number<std::size_t>("topics")) c.lda.topics = *v;
    if (auto v = s->number<double>("alpha")) c.lda.alpha = *v;
    if (auto v = s->number<double>("beta")) c.lda.beta = *v;
    if (auto v = s->number<std::size_t>("iterations")) c.lda.iterations = *v;
    if (auto v = s->number<std::size_t>("top_terms")) c.topic_terms = *v;
    s->finish();
  }
  c.lda.validate();
  c.calibration_dir = c.image_train_dir;
  if (auto s = section("dedup")) {
    if (auto v = s->number<int>("tau")) c.dedup.tau = *v;
    if (auto v = s->get("pairs"); v && !v->empty()) c.calibration_pairs = existing_file(base_dir, *v, "[dedup] pairs");
    if (auto v = s->get("pairs_dir"); v && !v->empty()) c.calibration_dir = existing_dir(base_dir, *v, "[dedup] pairs_dir");
    s->finish();
  }
  c.dedup.validate();
  if (auto s = section("prep")) {
    if (auto v = s->boolean("remove_mentions")) c.remove_mentions = *v;
    if (auto v = s->number<std::size_t>("min_token_len")) c.min_token_len = *v;
    s->finish();
  }
  if (auto s = section("sentiment")) {
    if (auto v = s->get("input"); v && !v->empty()) {
      if (*v == "preprocessed") c.sentiment_on_preprocessed = true;
      else if (*v != "raw") throw ConfigError("[sentiment] input must be raw or preprocessed");
    }
    if (auto v = s->number<std::size_t>("negation_window")) c.sentiment.negation_window = *v;
    if (auto v = s->number<double>("weak")) c.sentiment.weak_threshold = *v;
    if (auto v = s->number<double>("strong")) c.sentiment.strong_threshold = *v;
    s->finish();
  }
  if (!(c.sentiment.weak_threshold >= 0 && c.sentiment.weak_threshold <= c.sentiment.strong_threshold))
    throw ConfigError("[sentiment] thresholds must satisfy 0 <= weak <= strong");
  if (auto s = section("entities")) {
    if (auto v = s->number<std::size_t>("top_k")) c.entity_top_k = *v;
    s->finish();
  }
  if (auto s = section("report")) {
    if (auto v = s->get("correlations"))
      for (const auto& item : split_list(*v)) {
        auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("[report] correlations entries look like x:y");
        c.extra_correlations.emplace_back(std::string(trim(item.substr(0, colon))),
                                          std::string(trim(item.substr(colon + 1))));
      }
    s->finish();
  }

  for (const auto& [name, body] : tree) {
    (void)body;
    if (!seen.count(name)) throw ConfigError("unknown config section [" + name + "]");
  }
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw ConfigError("config file not found: " + path.string());
  auto text = read_text_file(path);
  auto base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  auto c = parse_config(text, base);
  c.source = path;
  return c;
}

std::string PipelineConfig::digest() const {
  return hex64(fnv1a64(source_text + "\n#seed=" + std::to_string(seed)));
}

const EventConfig& PipelineConfig::event(const std::string& name) const {
  for (const auto& e : events)
    if (e.window.name == name) return e;
  throw ConfigError("unknown event '" + name + "'");
}

// ---------------------------------------------------------------- helpers

namespace {

void log(const std::string& line) { std::cerr << line << '\n'; }

fs::path event_dir(const PipelineConfig& c, const EventConfig& e) { return c.out / e.window.name; }
fs::path models_dir(const PipelineConfig& c) { return c.out / "models"; }

PrepConfig prep_config(const PipelineConfig& c) {
  PrepConfig p;
  p.stopwords = load_stopwords(c.stopwords);
  p.remove_mentions = c.remove_mentions;
  p.min_token_len = c.min_token_len;
  return p;
}

json read_json(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw IoError("missing intermediate " + path.string() + " (run the earlier stage)");
  try {
    return json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

Corpus load_ingested(const PipelineConfig& c, const EventConfig& e) {
  auto path = event_dir(c, e) / "corpus.jsonl";
  if (!fs::is_regular_file(path)) throw IoError("missing intermediate " + path.string() + " (run ingest)");
  auto corpus = load_corpus(path, e.window);
  if (corpus.skipped_count) throw DataError(path.string() + ": ingested corpus has invalid records");
  return corpus;
}

json eval_split_json(const EvalReport& dev, const EvalReport& test, const SplitIndices& split) {
  return {{"split", {{"train", split.parts[0].size()}, {"dev", split.parts[1].size()}, {"test", split.parts[2].size()}}},
          {"warnings", split.warnings},
          {"dev", eval_to_json(dev)},
          {"test", eval_to_json(test)}};
}

std::vector<std::uint32_t> predict_all(const ForestModel& model, const LabeledDataset& ds) {
  std::vector<std::uint32_t> out;
  for (const auto& row : ds.rows) out.push_back(predict(model, row).label);
  return out;
}

void train_image_stage(const PipelineConfig& c, const fs::path& labels_path, const std::vector<std::string>& classes,
                       const std::string& name) {
  auto labels = load_image_labels(labels_path);
  if (labels.empty()) throw DataError(labels_path.string() + ": no labeled images");
  LabeledDataset ds;
  ds.class_names = classes;
  ds.n_features = kImageFeatureDims;
  ds.rows.resize(labels.size());
  for (const auto& l : labels) {
    auto it = std::find(classes.begin(), classes.end(), l.label);
    if (it == classes.end()) throw DataError(labels_path.string() + ": unknown label '" + l.label + "'");
    ds.labels.push_back(static_cast<std::uint32_t>(it - classes.begin()));
  }
  parallel_for(labels.size(), c.jobs, [&](std::size_t i) {
    ds.rows[i] = to_row(extract_image_features(read_image(c.image_train_dir / labels[i].id)));
  });
  auto split = split_indices(ds.labels, classes, {}, derive_seed(c.seed, "split." + name));
  auto params = c.forest;
  params.seed = derive_seed(c.seed, "forest." + name);
  auto model = train_random_forest(ds.subset(split.parts[0]), params, c.jobs);
  auto dev = ds.subset(split.parts[1]);
  auto test = ds.subset(split.parts[2]);
  write_json(models_dir(c) / (name + ".json"), forest_to_json(model));
  write_json(models_dir(c) / (name + "_eval.json"),
             eval_split_json(evaluate(predict_all(model, dev), dev.labels, classes),
                             evaluate(predict_all(model, test), test.labels, classes), split));
  log("train " + name + ": " + std::to_string(split.parts[0].size()) + " training images");
}

ForestModel load_forest(const fs::path& path) {
  try {
    return forest_from_json(read_json(path));
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------- stages

void stage_ingest(const PipelineConfig& c) {
  for (const auto& e : c.events) {
    auto corpus = load_corpus(e.corpus, e.window);
    std::ostringstream out;
    write_corpus(out, corpus);
    write_text_file(event_dir(c, e) / "corpus.jsonl", out.str());
    write_json(event_dir(c, e) / "ingest.json",
               {{"event", e.window.name}, {"records", corpus.records.size()}, {"skipped", corpus.skipped_count}});
    log("ingest " + e.window.name + ": " + std::to_string(corpus.records.size()) + " records, " +
        std::to_string(corpus.skipped_count) + " skipped");
  }
}

void stage_train_taxonomy(const PipelineConfig& c) {
  auto texts = load_labeled_texts(c.taxonomy_train);
  std::vector<std::uint32_t> labels;
  for (const auto& t : texts) labels.push_back(t.category);
  const auto classes = taxonomy_names();
  auto split = split_indices(labels, classes, {}, derive_seed(c.seed, "split.taxonomy"));
  auto pick = [&](const std::vector<std::size_t>& idx) {
    std::vector<LabeledText> out;
    for (auto i : idx) out.push_back(texts[i]);
    return out;
  };
  const auto prep = prep_config(c);
  auto params = c.forest;
  params.seed = derive_seed(c.seed, "forest.taxonomy");
  auto model = train_taxonomy_model(pick(split.parts[0]), prep, params, c.min_df, c.jobs);
  auto dev = featurize(pick(split.parts[1]), prep, model.vocab);
  auto test = featurize(pick(split.parts[2]), prep, model.vocab);
  write_json(models_dir(c) / "taxonomy.json", taxonomy_model_to_json(model));
  auto eval = eval_split_json(evaluate(predict_all(model.forest, dev), dev.labels, classes),
                              evaluate(predict_all(model.forest, test), test.labels, classes), split);
  for (const auto& w : model.warnings) eval["warnings"].push_back(w);
  write_json(models_dir(c) / "taxonomy_eval.json", eval);
  log("train taxonomy: " + std::to_string(split.parts[0].size()) + " texts, vocabulary " +
      std::to_string(model.vocab.size()));
}

void stage_train_relevancy(const PipelineConfig& c) {
  train_image_stage(c, c.relevancy_labels, kRelevancyClasses, "relevancy");
}

void stage_train_damage(const PipelineConfig& c) { train_image_stage(c, c.damage_labels, kDamageClasses, "damage"); }

void stage_classify(const PipelineConfig& c) {
  auto model = taxonomy_model_from_json(read_json(models_dir(c) / "taxonomy.json"));
  for (const auto& e : c.events) {
    auto corpus = load_ingested(c, e);
    write_text_file(event_dir(c, e) / "categories.csv", assignments_to_csv(classify_corpus(model, corpus, c.jobs)));
    log("classify " + e.window.name + ": " + std::to_string(corpus.records.size()) + " tweets");
  }
}

void stage_sentiment(const PipelineConfig& c) {
  LexiconScorer scorer(load_lexicon(c.lexicon), c.sentiment);
  std::optional<PrepConfig> prep;
  if (c.sentiment_on_preprocessed) prep = prep_config(c);
  for (const auto& e : c.events) {
    auto corpus = load_ingested(c, e);
    std::vector<SentimentScore> scores(corpus.records.size());
    parallel_for(corpus.records.size(), c.jobs, [&](std::size_t i) {
      const auto& text = corpus.records[i].text;
      if (!prep) {
        scores[i] = scorer.score(text);
        return;
      }
      std::string joined;
      for (const auto& t : preprocess(text, *prep)) joined += t + ' ';
      scores[i] = scorer.score(joined);
    });
    std::string out = "tweet_id,label,collapsed,score\n";
    for (std::size_t i = 0; i < scores.size(); ++i)
      out += csv_field(corpus.records[i].id) + ',' + std::string(to_string(scores[i].label)) + ',' +
             std::string(to_string(collapse_sentiment(scores[i].label))) + ',' + format_double(scores[i].score) + '\n';
    write_text_file(event_dir(c, e) / "sentiment.csv", out);
    log("sentiment " + e.window.name + ": " + std::to_string(scores.size()) + " tweets");
  }
}

void stage_topics(const PipelineConfig& c) {
  const auto prep = prep_config(c);
  for (const auto& e : c.events) {
    auto corpus = load_ingested(c, e);
    auto buckets = bucket_by_day(corpus);
    std::vector<std::pair<Day, std::vector<std::size_t>>> days(buckets.begin(), buckets.end());
    std::vector<json> results(days.size());
    parallel_for(days.size(), c.jobs, [&](std::size_t i) {
      const auto& [day, idx] = days[i];
      const auto label = format_day(day);
      std::vector<Tokens> docs;
      for (auto r : idx) docs.push_back(preprocess(corpus.records[r].text, prep));
      auto prepared = prepare_day(docs);
      bool any = std::any_of(prepared.docs.begin(), prepared.docs.end(), [](const WordIds& d) { return !d.empty(); });
      if (!any) {
        results[i] = {{"day", label}, {"documents", docs.size()}, {"topics", json::array()}};
        return;
      }
      auto cfg = c.lda;
      cfg.seed = derive_seed(c.seed, "lda." + label);
      auto model = fit_lda(prepared.docs, prepared.vocab.size(), cfg);
      results[i] = topics_to_json(label, model, prepared.vocab, prepared.day_counts, c.topic_terms);
    });
    for (std::size_t i = 0; i < days.size(); ++i)
      write_json(event_dir(c, e) / "topics" / (format_day(days[i].first) + ".json"), results[i]);
    log("topics " + e.window.name + ": " + std::to_string(days.size()) + " days");
  }
}

void stage_entities(const PipelineConfig& c) {
  RuleExtractor extractor(load_gazetteers(c.persons, c.organizations, c.locations));
  CurationRules rules;
  if (c.curation) rules = load_curation(*c.curation);
  for (const auto& e : c.events) {
    auto corpus = load_ingested(c, e);
    std::vector<std::vector<EntityMention>> per(corpus.records.size());
    parallel_for(corpus.records.size(), c.jobs, [&](std::size_t i) {
      per[i] = apply_curation(extractor.extract(corpus.records[i].text, corpus.records[i].id), rules);
    });
    std::vector<EntityMention> mentions;
    for (auto& m : per) mentions.insert(mentions.end(), m.begin(), m.end());
    write_json(event_dir(c, e) / "entities.json", entity_tables_to_json(aggregate_topk(mentions, corpus, c.entity_top_k)));
    log("entities " + e.window.name + ": " + std::to_string(mentions.size()) + " mentions");
  }
}

void stage_images(const PipelineConfig& c) {
  auto relevancy = load_forest(models_dir(c) / "relevancy.json");
  auto damage = load_forest(models_dir(c) / "damage.json");

  DedupConfig dedup = c.dedup;
  json calibration = nullptr;
  if (c.calibration_pairs) {
    auto rows = read_csv_file(*c.calibration_pairs);
    std::map<std::string, PerceptualHash> hashes;
    std::vector<std::array<std::string, 3>> triples;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == 0 && !rows[r].empty() && rows[r][0] == "idA") continue;
      if (rows[r].size() != 3) throw DataError(c.calibration_pairs->string() + ": rows need idA,idB,is_duplicate");
      triples.push_back({rows[r][0], rows[r][1], rows[r][2]});
      hashes[rows[r][0]];
      hashes[rows[r][1]];
    }
    std::vector<std::pair<const std::string, PerceptualHash>*> slots;
    for (auto& kv : hashes) slots.push_back(&kv);
    parallel_for(slots.size(), c.jobs,
                 [&](std::size_t i) { slots[i]->second = compute_phash(read_image(c.calibration_dir / slots[i]->first)); });
    std::vector<LabeledPair> pairs;
    for (const auto& [a, b, dup] : triples) {
      if (dup != "0" && dup != "1") throw DataError(c.calibration_pairs->string() + ": is_duplicate must be 0 or 1");
      pairs.push_back({hashes[a], hashes[b], dup == "1"});
    }
    auto cal = calibrate_threshold(pairs);
    dedup.tau = cal.tau;
    json roc = json::array();
    for (const auto& p : cal.roc)
      roc.push_back({{"tau", p.tau}, {"tpr", p.tpr}, {"fpr", p.fpr}, {"precision", p.precision}, {"recall", p.recall}});
    calibration = {{"pairs", pairs.size()}, {"tau", cal.tau}, {"roc", std::move(roc)}};
  }

  for (const auto& e : c.events) {
    auto corpus = load_ingested(c, e);
    std::vector<ImageItem> items;
    for (const auto& rec : corpus.records)
      for (const auto& ref : rec.image_refs) items.push_back({ref, rec.id, day_of(rec.created_at), std::nullopt});
    parallel_for(items.size(), c.jobs, [&](std::size_t i) {
      const auto path = e.images / items[i].image_id;
      if (items[i].image_id.find("..") != std::string::npos || !fs::is_regular_file(path)) return;
      try {
        items[i].analysis = analyze_image(read_image(path));
      } catch (const DataError&) {
        // Undecodable files count as missing.
      }
    });
    auto result = run_image_pipeline(items, e.window.days(), relevancy, damage, dedup);
    write_text_file(event_dir(c, e) / "images.csv", verdicts_to_csv(result, items));
    write_json(event_dir(c, e) / "dedup.json",
               {{"tau", dedup.tau}, {"items", items.size()}, {"missing", result.missing}, {"calibration", calibration}});
    log("images " + e.window.name + ": " + std::to_string(items.size()) + " images, " +
        std::to_string(result.missing) + " missing");
  }
}

std::map<Day, DailyImageStats> image_stats_from_csv(const fs::path& path, const std::vector<Day>& days,
                                                    std::size_t* missing) {
  auto rows = read_csv_file(path);
  const CsvRow header{"tweet_id", "image_id", "day", "status", "relevant", "duplicate_of", "damage"};
  if (rows.empty() || rows[0] != header) throw DataError(path.string() + ": not an images file");
  std::map<Day, DailyImageStats> stats;
  for (Day d : days) stats[d];
  std::size_t miss = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    auto bad = [&](const std::string& why) {
      return DataError(path.string() + ": row " + std::to_string(r + 1) + ": " + why);
    };
    if (row.size() != header.size()) throw bad("wrong column count");
    auto it = stats.find(parse_day(row[2]));
    if (it == stats.end()) throw bad("day outside the window");
    auto& s = it->second;
    if (row[3] == "missing") {
      ++s.missing;
      ++miss;
      continue;
    }
    if (row[3] != "ok") throw bad("unknown status");
    ++s.total;
    if (row[4] != "1") continue;
    ++s.relevant;
    if (!row[5].empty()) continue;
    ++s.unique;
    auto level = parse_damage(row[6]);
    if (!level) throw bad("unknown damage level");
    switch (*level) {
      case DamageLevel::none: ++s.none; break;
      case DamageLevel::mild: ++s.mild; ++s.damaged; break;
      case DamageLevel::severe: ++s.severe; ++s.damaged; break;
    }
  }
  if (missing) *missing = miss;
  return stats;
}

void stage_report(const PipelineConfig& c) {
  for (const auto& e : c.events) {
    const auto dir = event_dir(c, e);
    auto corpus = load_ingested(c, e);
    auto buckets = bucket_by_day(corpus);
    const auto days = e.window.days();
    const auto& name = e.window.name;

    ReportInputs in;
    in.event = name;
    in.days = days;
    in.corpus = corpus_stats(corpus);
    in.skipped_records = read_json(dir / "ingest.json").at("skipped").get<std::size_t>();
    in.metadata = {c.seed, c.digest(), "daily_ratio"};
    in.extra_correlations = c.extra_correlations;

    auto assignments = assignments_from_csv(dir / "categories.csv");
    if (assignments.size() != corpus.records.size()) throw DataError("categories.csv does not match the corpus");
    for (std::size_t i = 0; i < assignments.size(); ++i)
      if (assignments[i].tweet_id != corpus.records[i].id) throw DataError("categories.csv does not match the corpus");
    in.categories = daily_category_distribution(assignments, buckets, name);
    in.relevance = relevance_rollup(assignments, buckets, name);

    auto rows = read_csv_file(dir / "sentiment.csv");
    if (rows.size() != corpus.records.size() + 1) throw DataError("sentiment.csv does not match the corpus");
    std::vector<Sentiment3> labels;
    for (std::size_t i = 0; i < corpus.records.size(); ++i) {
      const auto& row = rows[i + 1];
      if (row.size() != 4 || row[0] != corpus.records[i].id) throw DataError("sentiment.csv does not match the corpus");
      labels.push_back(collapse_sentiment(parse_sentiment5(row[1])));
    }
    in.sentiment = daily_sentiment_distribution(labels, buckets, name);

    ImagePipelineResult images;
    images.per_day = image_stats_from_csv(dir / "images.csv", days, &images.missing);
    in.images = images.series(name);
    in.missing_images = images.missing;

    auto report = build_report(in);
    emit_tabular(report, c.out);
    emit_charts(report, c.out);
    log("report " + name + ": " + std::to_string(report.series.size()) + " series");
  }
}

void stage_all(const PipelineConfig& c) {
  stage_ingest(c);
  stage_train_taxonomy(c);
  stage_train_relevancy(c);
  stage_train_damage(c);
  stage_classify(c);
  stage_sentiment(c);
  stage_topics(c);
  stage_entities(c);
  stage_images(c);
  stage_report(c);
}

}  // namespace crisislens
