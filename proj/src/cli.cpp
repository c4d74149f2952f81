#include "crisislens/cli.hpp"

#include <exception>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "crisislens/pipeline.hpp"

namespace crisislens {

namespace {

std::string one_line(std::string s) {
  for (auto& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Crisis tweet analytics: categories, sentiment, topics, entities and imagery per event day"};
  app.name("crisislens");
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> jobs;
  app.add_option("--config", config_path, "pipeline configuration (INI)");
  app.add_option("--seed", seed, "override [pipeline] seed");
  app.add_option("--out", out, "override [pipeline] out");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  std::function<void(const PipelineConfig&)> action;
  auto stage = [&](const char* name, const char* help, void (*fn)(const PipelineConfig&)) {
    app.add_subcommand(name, help)->callback([&action, fn] { action = fn; });
  };
  stage("ingest", "filter the raw corpus to the event window", stage_ingest);
  std::string target;
  auto* train = app.add_subcommand("train", "train a model: taxonomy, relevancy or damage");
  train->add_option("model", target, "model to train")
      ->required()
      ->check(CLI::IsMember({"taxonomy", "relevancy", "damage"}));
  train->callback([&] {
    if (target == "taxonomy") action = stage_train_taxonomy;
    else if (target == "relevancy") action = stage_train_relevancy;
    else action = stage_train_damage;
  });
  stage("classify", "assign humanitarian categories", stage_classify);
  stage("sentiment", "score tweet sentiment", stage_sentiment);
  stage("topics", "fit per-day topic models", stage_topics);
  stage("entities", "extract and rank named entities", stage_entities);
  stage("images", "relevancy, de-duplication and damage for images", stage_images);
  stage("report", "assemble series, charts and correlations", stage_report);
  stage("all", "run every stage in order", stage_all);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "crisislens: " << one_line(e.what()) << "\n" << app.help();
    return 2;
  }

  try {
    if (config_path.empty()) throw ConfigError("--config is required");
    auto config = load_config(config_path);
    if (seed) config.seed = *seed;
    if (!out.empty()) config.out = out;
    if (jobs) config.jobs = *jobs;
    action(config);
  } catch (const ConfigError& e) {
    std::cerr << "crisislens: config error: " << one_line(e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "crisislens: error: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace crisislens
