#include "crisislens/entities.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "crisislens/io.hpp"

namespace crisislens {

using nlohmann::json;

std::string_view to_string(EntityType type) {
  switch (type) {
    case EntityType::person: return "person";
    case EntityType::organization: return "organization";
    case EntityType::location: return "location";
  }
  return "person";
}

std::optional<EntityType> parse_entity_type(std::string_view name) {
  for (auto t : kEntityTypes)
    if (to_string(t) == name) return t;
  return std::nullopt;
}

Gazetteers load_gazetteers(const std::filesystem::path& persons, const std::filesystem::path& organizations,
                           const std::filesystem::path& locations) {
  return {read_word_list(persons), read_word_list(organizations), read_word_list(locations)};
}

namespace {

bool is_alnum(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'); }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

struct Token {
  std::size_t begin, end;
};

std::vector<Token> word_tokens(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_alnum(text[i])) ++i;
    std::size_t b = i;
    while (i < text.size() && is_alnum(text[i])) ++i;
    if (i > b) out.push_back({b, i});
  }
  return out;
}

bool whitespace_gap(std::string_view text, std::size_t from, std::size_t to) {
  if (from >= to) return false;
  for (std::size_t i = from; i < to; ++i)
    if (!is_space(text[i])) return false;
  return true;
}

// Normalized phrase: lowercase, single spaces, trimmed.
std::string normalize_phrase(std::string_view phrase) {
  std::string out;
  for (char c : trim(phrase)) {
    if (is_space(c)) {
      if (!out.empty() && out.back() != ' ') out += ' ';
    } else {
      out += lower(c);
    }
  }
  return out;
}

std::string first_word(std::string_view phrase) {
  std::size_t i = 0;
  while (i < phrase.size() && is_alnum(phrase[i])) ++i;
  return std::string(phrase.substr(0, i));
}

// Length of the match of `phrase` at `pos`, or 0. A space in the phrase
// matches a whitespace run; the match must end on a word boundary.
std::size_t match_phrase(std::string_view text, std::size_t pos, std::string_view phrase) {
  std::size_t i = pos;
  for (std::size_t p = 0; p < phrase.size(); ++p) {
    if (phrase[p] == ' ') {
      if (i >= text.size() || !is_space(text[i])) return 0;
      while (i < text.size() && is_space(text[i])) ++i;
      continue;
    }
    if (i >= text.size() || lower(text[i]) != phrase[p]) return 0;
    ++i;
  }
  if (i < text.size() && is_alnum(text[i]) && is_alnum(text[i - 1])) return 0;
  return i - pos;
}

struct Candidate {
  std::size_t begin, end;
  EntityType type;
  int priority;
};

}  // namespace

RuleExtractor::RuleExtractor(Gazetteers gazetteers, RuleSet rules) : rules_(std::move(rules)) {
  auto add = [&](const std::vector<std::string>& list, EntityType type) {
    for (const auto& raw : list) {
      auto phrase = normalize_phrase(raw);
      auto key = first_word(phrase);
      if (key.empty()) continue;  // phrases must start with a letter or digit
      by_first_word_[key].push_back({phrase, type});
    }
  };
  add(gazetteers.locations, EntityType::location);
  add(gazetteers.organizations, EntityType::organization);
  add(gazetteers.persons, EntityType::person);
}

std::vector<EntityMention> RuleExtractor::extract(std::string_view text, const std::string& tweet_id) const {
  const auto tokens = word_tokens(text);
  std::vector<Candidate> cands;

  for (const auto& tok : tokens) {
    std::string key;
    for (std::size_t i = tok.begin; i < tok.end; ++i) key += lower(text[i]);
    auto it = by_first_word_.find(key);
    if (it == by_first_word_.end()) continue;
    for (const auto& ph : it->second)
      if (auto len = match_phrase(text, tok.begin, ph.lower)) cands.push_back({tok.begin, tok.begin + len, ph.type, 0});
  }

  auto capitalized = [&](const Token& t) { return is_upper(text[t.begin]); };

  for (std::size_t j = 0; j < tokens.size(); ++j) {
    std::string_view word = text.substr(tokens[j].begin, tokens[j].end - tokens[j].begin);
    if (std::find(rules_.titles.begin(), rules_.titles.end(), word) == rules_.titles.end()) continue;
    std::size_t after = tokens[j].end;
    if (after < text.size() && text[after] == '.') ++after;
    if (j + 1 >= tokens.size() || !capitalized(tokens[j + 1]) || !whitespace_gap(text, after, tokens[j + 1].begin))
      continue;
    std::size_t last = j + 1;
    while (last + 1 < tokens.size() && capitalized(tokens[last + 1]) &&
           whitespace_gap(text, tokens[last].end, tokens[last + 1].begin))
      ++last;
    cands.push_back({tokens[j + 1].begin, tokens[last].end, EntityType::person, 1});
  }

  for (std::size_t j = 1; j < tokens.size(); ++j) {
    std::string_view word = text.substr(tokens[j].begin, tokens[j].end - tokens[j].begin);
    std::size_t end = 0;
    for (const auto& suffix : rules_.org_suffixes) {
      bool dotted = !suffix.empty() && suffix.back() == '.';
      std::string_view bare = dotted ? std::string_view(suffix).substr(0, suffix.size() - 1) : suffix;
      if (word != bare) continue;
      if (dotted && (tokens[j].end >= text.size() || text[tokens[j].end] != '.')) continue;
      end = tokens[j].end + (dotted ? 1 : 0);
      break;
    }
    if (!end) continue;
    std::size_t first = j;
    while (first > 0 && capitalized(tokens[first - 1]) &&
           whitespace_gap(text, tokens[first - 1].end, tokens[first].begin))
      --first;
    if (first == j) continue;
    cands.push_back({tokens[first].begin, end, EntityType::organization, 2});
  }

  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    auto la = a.end - a.begin, lb = b.end - b.begin;
    if (la != lb) return la > lb;
    if (a.begin != b.begin) return a.begin < b.begin;
    return a.priority < b.priority;
  });
  std::vector<Candidate> chosen;
  for (const auto& c : cands) {
    bool overlaps = std::any_of(chosen.begin(), chosen.end(),
                                [&](const Candidate& o) { return c.begin < o.end && o.begin < c.end; });
    if (!overlaps) chosen.push_back(c);
  }
  std::sort(chosen.begin(), chosen.end(), [](const Candidate& a, const Candidate& b) { return a.begin < b.begin; });

  std::vector<EntityMention> out;
  for (const auto& c : chosen)
    out.push_back({std::string(text.substr(c.begin, c.end - c.begin)), c.type, tweet_id, c.begin, c.end});
  return out;
}

void CurationRules::validate() const {
  for (const auto& [from, to] : alias) {
    std::set<std::string> seen{from};
    std::string cur = to;
    for (;;) {
      if (!seen.insert(cur).second) throw ConfigError("alias cycle involving '" + from + "'");
      auto it = alias.find(cur);
      if (it == alias.end()) break;
      cur = it->second;
    }
  }
}

std::string CurationRules::canonical(const std::string& surface) const {
  std::string cur = surface;
  for (std::size_t steps = 0; steps <= alias.size(); ++steps) {
    auto it = alias.find(cur);
    if (it == alias.end()) return cur;
    cur = it->second;
  }
  throw ConfigError("alias cycle involving '" + surface + "'");
}

CurationRules parse_curation(std::string_view text) {
  CurationRules rules;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    return ConfigError("curation line " + std::to_string(lineno) + ": " + msg);
  };
  auto type_of = [&](std::string_view name) {
    auto t = parse_entity_type(name);
    if (!t) throw fail("unknown entity type '" + std::string(name) + "'");
    return *t;
  };
  // Splits off the first whitespace-delimited word.
  auto next_word = [](std::string_view& rest) {
    rest = trim(rest);
    std::size_t i = 0;
    while (i < rest.size() && !is_space(rest[i])) ++i;
    auto w = rest.substr(0, i);
    rest = trim(rest.substr(i));
    return w;
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view rest = trim(line);
    if (rest.empty() || rest.front() == '#') continue;
    auto directive = next_word(rest);
    if (directive == "block") {
      auto type = type_of(next_word(rest));
      if (rest.empty()) throw fail("missing surface");
      rules.blocklist.emplace(std::string(rest), type);
    } else if (directive == "retype") {
      auto from = type_of(next_word(rest));
      auto to = type_of(next_word(rest));
      if (rest.empty()) throw fail("missing surface");
      rules.retype[{std::string(rest), from}] = to;
    } else if (directive == "alias") {
      auto arrow = rest.find("=>");
      if (arrow == std::string_view::npos) throw fail("alias needs '=>'");
      auto from = trim(rest.substr(0, arrow));
      auto to = trim(rest.substr(arrow + 2));
      if (from.empty() || to.empty()) throw fail("alias needs both surfaces");
      rules.alias[std::string(from)] = std::string(to);
    } else {
      throw fail("unknown directive '" + std::string(directive) + "'");
    }
  }
  rules.validate();
  return rules;
}

CurationRules load_curation(const std::filesystem::path& path) { return parse_curation(read_text_file(path)); }

std::vector<EntityMention> apply_curation(const std::vector<EntityMention>& mentions, const CurationRules& rules) {
  std::vector<EntityMention> out;
  out.reserve(mentions.size());
  for (const auto& m : mentions) {
    if (rules.blocklist.count({m.surface, m.type})) continue;
    EntityMention c = m;
    if (auto it = rules.retype.find({m.surface, m.type}); it != rules.retype.end()) c.type = it->second;
    c.surface = rules.canonical(c.surface);
    out.push_back(std::move(c));
  }
  return out;
}

std::array<EntityTable, 3> aggregate_topk(const std::vector<EntityMention>& mentions, const Corpus& corpus,
                                          std::size_t k) {
  std::unordered_map<std::string, std::size_t> id_index;
  id_index.reserve(corpus.records.size());
  for (std::size_t i = 0; i < corpus.records.size(); ++i) id_index.emplace(corpus.records[i].id, i);

  std::array<std::map<std::string, std::set<std::size_t>>, 3> tweets_by_surface;
  for (const auto& m : mentions) {
    auto it = id_index.find(m.tweet_id);
    if (it == id_index.end()) throw DataError("mention references unknown tweet '" + m.tweet_id + "'");
    tweets_by_surface[static_cast<std::size_t>(m.type)][m.surface].insert(it->second);
  }

  std::unordered_map<std::size_t, std::string> normalized;
  auto norm = [&](std::size_t i) -> const std::string& {
    auto it = normalized.find(i);
    if (it == normalized.end()) it = normalized.emplace(i, normalize_for_dedup(corpus.records[i].text)).first;
    return it->second;
  };

  std::array<EntityTable, 3> tables;
  for (std::size_t t = 0; t < 3; ++t) {
    tables[t].type = kEntityTypes[t];
    std::vector<EntityRow> rows;
    for (const auto& [surface, tweets] : tweets_by_surface[t]) {
      std::unordered_set<std::string_view> texts;
      for (auto i : tweets) texts.insert(norm(i));
      rows.push_back({surface, tweets.size(), texts.size()});
    }
    std::sort(rows.begin(), rows.end(), [](const EntityRow& a, const EntityRow& b) {
      if (a.tweet_count != b.tweet_count) return a.tweet_count > b.tweet_count;
      return a.surface < b.surface;
    });
    if (rows.size() > k) rows.resize(k);
    tables[t].rows = std::move(rows);
  }
  return tables;
}

json entity_tables_to_json(const std::array<EntityTable, 3>& tables) {
  json out = json::object();
  for (const auto& table : tables) {
    json rows = json::array();
    for (const auto& r : table.rows)
      rows.push_back({{"surface", r.surface}, {"tweets", r.tweet_count}, {"unique_messages", r.unique_message_count}});
    out[std::string(to_string(table.type))] = std::move(rows);
  }
  return out;
}

}  // namespace crisislens
