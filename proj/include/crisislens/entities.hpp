#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "crisislens/corpus.hpp"

namespace crisislens {

enum class EntityType : std::uint8_t { person, organization, location };

inline constexpr std::array<EntityType, 3> kEntityTypes = {EntityType::person, EntityType::organization,
                                                           EntityType::location};

std::string_view to_string(EntityType type);
std::optional<EntityType> parse_entity_type(std::string_view name);

struct EntityMention {
  std::string surface;
  EntityType type = EntityType::person;
  std::string tweet_id;
  std::size_t begin = 0;  // byte span in the raw text
  std::size_t end = 0;

  bool operator==(const EntityMention&) const = default;
};

struct Gazetteers {
  std::vector<std::string> persons;
  std::vector<std::string> organizations;
  std::vector<std::string> locations;
};

Gazetteers load_gazetteers(const std::filesystem::path& persons, const std::filesystem::path& organizations,
                           const std::filesystem::path& locations);

class EntityExtractor {
public:
  virtual ~EntityExtractor() = default;
  // Mentions in text order with disjoint spans.
  virtual std::vector<EntityMention> extract(std::string_view text, const std::string& tweet_id) const = 0;
};

struct RuleSet {
  std::vector<std::string> titles{"Gov", "Sen", "Mr", "Dr", "President"};
  std::vector<std::string> org_suffixes{"Inc.", "Corp.", "Agency", "Center", "Department"};
};

// Gazetteer phrases (case-insensitive, whole words), title-prefixed
// capitalized names as persons, and capitalized sequences ending in an
// organization suffix. Overlaps resolve to the longest span, then the
// earliest start, then gazetteer before title before suffix rule.
class RuleExtractor final : public EntityExtractor {
public:
  explicit RuleExtractor(Gazetteers gazetteers, RuleSet rules = {});
  std::vector<EntityMention> extract(std::string_view text, const std::string& tweet_id) const override;

private:
  struct Phrase {
    std::string lower;  // single spaces between words
    EntityType type;
  };
  std::map<std::string, std::vector<Phrase>> by_first_word_;
  RuleSet rules_;
};

inline std::vector<EntityMention> extract_entities(std::string_view text, const std::string& tweet_id,
                                                   const EntityExtractor& extractor) {
  return extractor.extract(text, tweet_id);
}

struct CurationRules {
  std::set<std::pair<std::string, EntityType>> blocklist;
  std::map<std::pair<std::string, EntityType>, EntityType> retype;
  std::map<std::string, std::string> alias;

  // Throws ConfigError on an alias cycle.
  void validate() const;
  // Follows alias chains to the final canonical surface.
  std::string canonical(const std::string& surface) const;
};

// Directives, one per line:
//   block <type> <surface>
//   retype <old-type> <new-type> <surface>
//   alias <surface> => <canonical>
CurationRules parse_curation(std::string_view text);
CurationRules load_curation(const std::filesystem::path& path);

// Drops blocked (surface, type) pairs, applies retyping, then rewrites
// surfaces to their canonical alias. Spans keep pointing at the raw text.
std::vector<EntityMention> apply_curation(const std::vector<EntityMention>& mentions, const CurationRules& rules);

struct EntityRow {
  std::string surface;
  std::size_t tweet_count = 0;
  std::size_t unique_message_count = 0;

  bool operator==(const EntityRow&) const = default;
};

struct EntityTable {
  EntityType type = EntityType::person;
  std::vector<EntityRow> rows;  // tweet_count descending, then surface

  bool operator==(const EntityTable&) const = default;
};

// One table per entity type. tweet_count counts distinct tweets mentioning
// the surface; unique_message_count counts distinct normalized texts among them.
std::array<EntityTable, 3> aggregate_topk(const std::vector<EntityMention>& mentions, const Corpus& corpus,
                                          std::size_t k = 10);

nlohmann::json entity_tables_to_json(const std::array<EntityTable, 3>& tables);

}  // namespace crisislens
