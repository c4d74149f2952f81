#include "crisislens/fixture.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "crisislens/categories.hpp"
#include "crisislens/corpus.hpp"
#include "crisislens/io.hpp"

namespace crisislens {

namespace fs = std::filesystem;

namespace {

using Words = std::vector<std::string_view>;

// Planted vocabulary per taxonomy category, same order as kTaxonomy.
const std::array<Words, 10> kCategoryWords = {{
    {"injured", "deaths", "death", "toll", "bodies", "fatalities", "hospital", "drowned", "victims", "casualties"},
    {"damage", "bridge", "roads", "collapsed", "outage", "flooded", "buildings", "roof", "highway", "levee"},
    {"warning", "evacuate", "advisory", "alert", "curfew", "avoid", "forecast", "prepare", "tornado", "caution"},
    {"donate", "donations", "volunteer", "volunteers", "fund", "supplies", "raise", "giving", "drive", "blood"},
    {"displaced", "shelter", "shelters", "evacuated", "homeless", "rescue", "residents", "refuge", "boats", "roofs"},
    {"missing", "found", "locate", "search", "searching", "reunited", "whereabouts", "contact", "anyone", "seen"},
    {"prayers", "praying", "pray", "thoughts", "hearts", "sympathy", "strength", "condolences", "bless", "solidarity"},
    {"mom", "dad", "sister", "brother", "kids", "friends", "dog", "neighbor", "grandma", "cousin"},
    {"update", "report", "information", "official", "statement", "press", "conference", "briefing", "map", "live"},
    {"game", "music", "movie", "coffee", "weekend", "pizza", "birthday", "football", "song", "concert"},
}};

const Words kFiller = {"today", "people", "city", "area", "storm", "water", "night", "morning", "still", "everyone",
                       "right", "going", "lot", "time", "need", "week"};
const Words kPositive = {"safe", "grateful", "heroes", "thankful", "amazing", "hope", "love", "strong", ":)", "<3"};
const Words kNegative = {"terrible", "devastating", "scared", "awful", "sad", "horrible", "worst", "tragic", ":(", "afraid"};
const Words kEntities = {"Gov. Abbott",     "Greg Abbott",          "Mayor Sylvester Turner", "President Trump",
                         "FEMA",            "the Red Cross",        "American Red Cross",     "Coast Guard",
                         "in Houston",      "near Rockport",        "across Texas",           "Beaumont",
                         "Port Arthur",     "Dr. Lopez",            "at the Harris County Emergency Center",
                         "National Weather Service"};
const Words kEventTags = {"Hurricane Harvey", "#HurricaneHarvey", "Harvey", "hurricane", "#Harvey"};
const Words kHandles = {"@KHOU", "@HoustonTX", "@NWSHouston", "@abc13houston", "@TxDOT"};

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[rng.below(v.size())];
}

std::string tweet_text(Rng& rng, std::uint32_t category, bool with_event_tag) {
  std::vector<std::string> parts;
  if (with_event_tag) parts.emplace_back(pick(rng, kEventTags));
  const auto& words = kCategoryWords[category];
  const std::size_t planted = 2 + rng.below(3);
  for (std::size_t i = 0; i < planted; ++i) parts.emplace_back(words[rng.below(words.size())]);
  const std::size_t filler = 1 + rng.below(3);
  for (std::size_t i = 0; i < filler; ++i) parts.emplace_back(pick(rng, kFiller));
  const double u = rng.uniform();
  if (u < 0.3) parts.emplace_back(pick(rng, kPositive));
  else if (u < 0.6) parts.emplace_back(pick(rng, kNegative));
  else if (u < 0.7) {
    parts.emplace_back("not");
    parts.emplace_back(pick(rng, kPositive));
  }
  if (rng.uniform() < 0.35) parts.emplace_back(pick(rng, kEntities));
  // Shuffle everything but the event tag so word order carries nothing.
  rng.shuffle(parts.begin() + (with_event_tag ? 1 : 0), parts.end());
  if (rng.uniform() < 0.2) parts.emplace_back(std::to_string(1 + rng.below(500)));
  if (rng.uniform() < 0.3) parts.emplace_back(pick(rng, kHandles));
  if (rng.uniform() < 0.3) parts.push_back("https://t.co/" + hex64(rng.next()).substr(0, 10));
  if (rng.uniform() < 0.05) parts.emplace_back("caf\xc3\xa9");
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ' ';
    out += p;
  }
  if (rng.uniform() < 0.1) out = std::string(pick(rng, kHandles)) + " " + out;
  return out;
}

// Category mix drifts over the window: warnings early, damage and rescue
// mid-event, donations and sympathy later.
std::uint32_t draw_category(Rng& rng, double t) {
  std::array<double, 10> w = {0.6, 0.8 + std::sin(t * 3.1), 1.6 - 1.2 * t, 0.4 + 1.2 * t, 1.0 + 0.5 * std::sin(t * 6),
                              0.5, 0.5 + 0.8 * t, 0.9, 1.0, 0.9};
  double total = 0;
  for (double x : w) total += x;
  double u = rng.uniform() * total;
  for (std::uint32_t c = 0; c < 10; ++c) {
    if (u < w[c]) return c;
    u -= w[c];
  }
  return 9;
}

std::uint8_t clamp8(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

void put(Image& img, std::size_t x, std::size_t y, double r, double g, double b) {
  auto* p = img.pixel(x, y);
  p[0] = clamp8(r);
  p[1] = clamp8(g);
  p[2] = clamp8(b);
}

}  // namespace

Image synth_banner(Rng& rng, std::size_t size) {
  static const std::array<std::array<int, 3>, 8> palette = {{{230, 30, 40},
                                                            {20, 90, 200},
                                                            {250, 200, 0},
                                                            {0, 160, 80},
                                                            {240, 240, 240},
                                                            {20, 20, 20},
                                                            {150, 0, 160},
                                                            {255, 120, 0}}};
  Image img(size, size);
  const auto bg = palette[rng.below(palette.size())];
  auto fg = palette[rng.below(palette.size())];
  while (fg == bg) fg = palette[rng.below(palette.size())];
  const std::size_t bx = rng.below(size / 2), by = rng.below(size / 2);
  const std::size_t bw = size / 4 + rng.below(size / 4), bh = size / 4 + rng.below(size / 4);
  const std::size_t bars = 2 + rng.below(3);
  for (std::size_t y = 0; y < size; ++y)
    for (std::size_t x = 0; x < size; ++x) {
      bool block = x >= bx && x < bx + bw && y >= by && y < by + bh;
      bool bar = false;
      for (std::size_t k = 0; k < bars; ++k) {
        std::size_t row = size * 5 / 8 + k * 6;
        bar = bar || (y >= row && y < row + 3 && x >= size / 8 && x < size - size / 8 - k * 5);
      }
      const auto& c = block || bar ? fg : bg;
      put(img, x, y, c[0], c[1], c[2]);
    }
  return img;
}

Image synth_scene(Rng& rng, DamageLevel damage, std::size_t size) {
  Image img(size, size);
  const double s = static_cast<double>(size);
  std::vector<double> r(size * size), g(size * size), b(size * size);
  // Sky-to-ground gradient.
  const double horizon = s * (0.3 + 0.3 * rng.uniform());
  for (std::size_t y = 0; y < size; ++y)
    for (std::size_t x = 0; x < size; ++x) {
      const double fy = static_cast<double>(y);
      const auto i = y * size + x;
      if (fy < horizon) {
        r[i] = 110 + 40 * fy / horizon;
        g[i] = 130 + 40 * fy / horizon;
        b[i] = 170 + 30 * fy / horizon;
      } else {
        r[i] = 95 - 20 * (fy - horizon) / s;
        g[i] = 85 - 20 * (fy - horizon) / s;
        b[i] = 60 - 10 * (fy - horizon) / s;
      }
    }
  // Large soft blobs dominate the low frequencies and make the hash stable.
  const std::size_t blobs = 4 + rng.below(3);
  for (std::size_t k = 0; k < blobs; ++k) {
    const double cx = rng.uniform() * s, cy = rng.uniform() * s;
    const double rad = s * (0.12 + 0.2 * rng.uniform());
    const double dr = -70 + 140 * rng.uniform(), dg = -70 + 140 * rng.uniform(), db = -50 + 100 * rng.uniform();
    for (std::size_t y = 0; y < size; ++y)
      for (std::size_t x = 0; x < size; ++x) {
        const double dx = (static_cast<double>(x) - cx) / rad, dy = (static_cast<double>(y) - cy) / rad;
        const double w = std::exp(-(dx * dx + dy * dy));
        const auto i = y * size + x;
        r[i] += dr * w;
        g[i] += dg * w;
        b[i] += db * w;
      }
  }
  if (damage == DamageLevel::mild) {
    // Cracks: a handful of dark one-pixel lines.
    const std::size_t cracks = 5 + rng.below(4);
    for (std::size_t k = 0; k < cracks; ++k) {
      double x = rng.uniform() * s, y = rng.uniform() * s;
      const double ang = rng.uniform() * 6.283185307179586;
      for (std::size_t step = 0; step < size / 2; ++step) {
        auto ix = static_cast<long>(x), iy = static_cast<long>(y);
        if (ix >= 0 && iy >= 0 && ix < static_cast<long>(size) && iy < static_cast<long>(size)) {
          const auto i = static_cast<std::size_t>(iy) * size + static_cast<std::size_t>(ix);
          r[i] -= 60;
          g[i] -= 60;
          b[i] -= 60;
        }
        x += std::cos(ang);
        y += std::sin(ang);
      }
    }
  } else if (damage == DamageLevel::severe) {
    // Debris: high-contrast 2x2 speckle over most of the frame.
    for (std::size_t y = 0; y < size; y += 2)
      for (std::size_t x = 0; x < size; x += 2) {
        if (rng.uniform() < 0.4) continue;
        const double d = -90 + 180 * rng.uniform();
        for (std::size_t yy = y; yy < std::min(size, y + 2); ++yy)
          for (std::size_t xx = x; xx < std::min(size, x + 2); ++xx) {
            const auto i = yy * size + xx;
            r[i] += d;
            g[i] += d;
            b[i] += d;
          }
      }
  }
  for (std::size_t y = 0; y < size; ++y)
    for (std::size_t x = 0; x < size; ++x) {
      const auto i = y * size + x;
      const double n = -3 + 6 * rng.uniform();
      put(img, x, y, r[i] + n, g[i] + n, b[i] + n);
    }
  return img;
}

Image near_duplicate(const Image& image, int kind) {
  if (kind == 0) return image;
  if (kind == 1) {
    Image out = image;
    for (auto& v : out.rgb) v = clamp8(v + 8.0);
    return out;
  }
  // Bilinear rescale to 7/8 of the size.
  const std::size_t w = std::max<std::size_t>(8, image.width * 7 / 8), h = std::max<std::size_t>(8, image.height * 7 / 8);
  Image out(w, h);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      const double sx = std::clamp((static_cast<double>(x) + 0.5) * static_cast<double>(image.width) / static_cast<double>(w) - 0.5,
                                   0.0, static_cast<double>(image.width - 1));
      const double sy = std::clamp((static_cast<double>(y) + 0.5) * static_cast<double>(image.height) / static_cast<double>(h) - 0.5,
                                   0.0, static_cast<double>(image.height - 1));
      const auto x0 = static_cast<std::size_t>(sx), y0 = static_cast<std::size_t>(sy);
      const auto x1 = std::min(x0 + 1, image.width - 1), y1 = std::min(y0 + 1, image.height - 1);
      const double fx = sx - static_cast<double>(x0), fy = sy - static_cast<double>(y0);
      for (int c = 0; c < 3; ++c) {
        const double top = image.pixel(x0, y0)[c] + (image.pixel(x1, y0)[c] - image.pixel(x0, y0)[c]) * fx;
        const double bot = image.pixel(x0, y1)[c] + (image.pixel(x1, y1)[c] - image.pixel(x0, y1)[c]) * fx;
        out.pixel(x, y)[c] = clamp8(top + (bot - top) * fy);
      }
    }
  return out;
}

namespace {

void write_jpeg(const fs::path& path, const Image& image) {
  auto bytes = encode_jpeg(image, 92);
  write_text_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::string numbered(std::string_view prefix, std::size_t i, std::string_view ext) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%05zu", i);
  return std::string(prefix) + buf + std::string(ext);
}

DamageLevel draw_damage(Rng& rng) {
  const double u = rng.uniform();
  return u < 0.5 ? DamageLevel::none : u < 0.8 ? DamageLevel::mild : DamageLevel::severe;
}

void copy_resource(const fs::path& from, const fs::path& to) {
  if (!fs::is_regular_file(from)) throw IoError("fixture resource missing: " + from.string());
  write_text_file(to, read_text_file(from));
}

}  // namespace

FixtureSummary write_fixture(const fs::path& dir, const FixtureOptions& opt) {
  if (opt.days == 0 || opt.tweets < opt.days) throw ConfigError("fixture needs at least one tweet per day");
  FixtureSummary sum;
  Rng rng(derive_seed(opt.seed, "fixture"));

  // Resources.
  const fs::path res = dir / "resources";
  for (const char* name : {"stopwords.txt", "lexicon.tsv", "persons.txt", "organizations.txt", "locations.txt",
                           "curation.txt"})
    copy_resource(opt.data_dir / name, res / name);

  // Per-day volume: a surge around landfall, then a long tail.
  std::vector<double> weight(opt.days);
  double wsum = 0;
  for (std::size_t d = 0; d < opt.days; ++d) {
    const double x = static_cast<double>(d);
    weight[d] = 1.0 + 2.0 * std::exp(-(x - 3) * (x - 3) / 6.0) + 0.8 * std::exp(-(x - 9) * (x - 9) / 4.0);
    wsum += weight[d];
  }
  std::vector<std::size_t> per_day(opt.days);
  std::size_t assigned = 0;
  for (std::size_t d = 0; d < opt.days; ++d) {
    per_day[d] = static_cast<std::size_t>(std::floor(weight[d] / wsum * static_cast<double>(opt.tweets)));
    assigned += per_day[d];
  }
  for (std::size_t d = 0; assigned < opt.tweets; d = (d + 1) % opt.days, ++assigned) ++per_day[d];

  std::vector<TweetRecord> records;
  records.reserve(opt.tweets);
  std::size_t serial = 0;
  for (std::size_t d = 0; d < opt.days; ++d) {
    const Day day = opt.start + std::chrono::days{static_cast<long>(d)};
    const double t = opt.days > 1 ? static_cast<double>(d) / static_cast<double>(opt.days - 1) : 0.0;
    std::vector<long> secs(per_day[d]);
    for (auto& s : secs) s = static_cast<long>(rng.below(86400));
    std::sort(secs.begin(), secs.end());
    for (long s : secs) {
      TweetRecord rec;
      rec.id = std::to_string(900000000000000000ULL + serial++);
      rec.created_at = Timestamp{day} + std::chrono::seconds{s};
      rec.text = tweet_text(rng, draw_category(rng, t), true);
      // Retweets copy an earlier text from the same day.
      if (!records.empty() && rng.uniform() < 0.12) {
        const auto& src = records[records.size() - 1 - rng.below(std::min<std::size_t>(records.size(), 40))];
        rec.text = "RT " + std::string(pick(rng, kHandles)) + ": " + src.text;
        rec.is_retweet = true;
      }
      records.push_back(std::move(rec));
    }
  }

  // Image occurrences, in arrival order.
  fs::create_directories(dir / "images");
  std::vector<std::size_t> image_tweets(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) image_tweets[i] = i;
  rng.shuffle(image_tweets.begin(), image_tweets.end());
  const std::size_t doubles = opt.image_slots / 25;
  image_tweets.resize(std::min(records.size(), opt.image_slots - doubles));
  std::sort(image_tweets.begin(), image_tweets.end());
  std::vector<std::size_t> slot_tweet;
  for (std::size_t k = 0; k < image_tweets.size(); ++k) {
    slot_tweet.push_back(image_tweets[k]);
    if (k % 24 == 5 && slot_tweet.size() < opt.image_slots) slot_tweet.push_back(image_tweets[k]);
  }

  struct Scene {
    std::string id;
    Image pixels;
  };
  std::vector<Scene> scenes;
  std::vector<std::string> banners;
  std::size_t file_no = 0;
  std::map<Day, bool> day_seeded;
  for (std::size_t k = 0; k < slot_tweet.size(); ++k) {
    auto& rec = records[slot_tweet[k]];
    const Day day = day_of(rec.created_at);
    std::string id;
    const double u = rng.uniform();
    const bool first_today = !day_seeded[day];
    if (!first_today && u < 0.02) {
      id = numbered("missing_", sum.missing_refs++, ".png");
    } else if (!first_today && u < 0.36) {
      if (!banners.empty() && rng.uniform() < 0.3) {
        id = pick(rng, banners);
      } else {
        id = numbered("img_", file_no++, ".png");
        write_png(dir / "images" / id, synth_banner(rng));
        banners.push_back(id);
        ++sum.image_files;
      }
    } else if (!first_today && u < 0.6 && !scenes.empty()) {
      // A repost of an earlier scene: same file, or a near-duplicate.
      const auto& base = scenes[rng.below(scenes.size())];
      const int kind = static_cast<int>(rng.below(4));
      if (kind == 3) {
        id = base.id;
      } else {
        const bool jpeg = kind == 0;
        id = numbered("img_", file_no++, jpeg ? ".jpg" : ".png");
        auto variant = near_duplicate(base.pixels, kind);
        if (jpeg) write_jpeg(dir / "images" / id, variant);
        else write_png(dir / "images" / id, variant);
        ++sum.image_files;
      }
    } else {
      id = numbered("img_", file_no++, ".png");
      auto img = synth_scene(rng, draw_damage(rng));
      write_png(dir / "images" / id, img);
      scenes.push_back({id, std::move(img)});
      ++sum.image_files;
      day_seeded[day] = true;
    }
    if (std::find(rec.image_refs.begin(), rec.image_refs.end(), id) == rec.image_refs.end()) {
      rec.image_refs.push_back(id);
      ++sum.image_items;
    }
  }

  // Corpus file: valid records interleaved with lines ingest must skip or drop.
  std::ostringstream corpus;
  const std::vector<std::string> noise = {
      "{not json",
      R"({"id": "x1", "text": "Hurricane Harvey no timestamp"})",
      R"({"id": 17, "created_at": "2017-08-26T10:00:00Z", "text": "Harvey numeric id"})",
      R"({"id": "x2", "created_at": "2017-08-26 10:00", "text": "Harvey bad time"})",
      "",
      R"({"id": "x3", "created_at": "2017-07-01T12:00:00Z", "text": "Hurricane Harvey before the window"})",
      R"({"id": "x4", "created_at": "2017-09-20T12:00:00Z", "text": "Hurricane Harvey after the window"})",
      R"({"id": "x5", "created_at": "2017-08-27T12:00:00Z", "text": "nothing about the storm here"})",
  };
  const std::size_t every = records.size() / (noise.size() + 1);
  std::size_t next_noise = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    corpus << serialize_record(records[i]) << '\n';
    if (every && (i + 1) % every == 0 && next_noise < noise.size()) {
      corpus << noise[next_noise++] << '\n';
      ++sum.noise_lines;
    }
  }
  // A repeated id is skipped as a duplicate.
  corpus << serialize_record(records.front()) << '\n';
  ++sum.noise_lines;
  write_text_file(dir / "tweets.jsonl", corpus.str());
  sum.tweets = records.size();

  // Labeled texts for the taxonomy model.
  {
    std::string out = "text,label\n";
    for (std::size_t i = 0; i < opt.labeled_texts; ++i) {
      const auto c = static_cast<std::uint32_t>(i % 10);
      out += csv_field(tweet_text(rng, c, rng.uniform() < 0.7)) + ',' + std::string(kTaxonomy[c]) + '\n';
    }
    write_text_file(dir / "training" / "labeled_texts.csv", out);
  }

  // Image training sets and calibration pairs.
  {
    const fs::path tdir = dir / "training" / "images";
    fs::create_directories(tdir);
    std::string rel = "id,label\n", dmg = "id,label\n", pairs = "idA,idB,is_duplicate\n";
    std::size_t n = 0;
    for (std::size_t i = 0; i < 100; ++i) {
      auto id = numbered("banner_", n++, ".png");
      write_png(tdir / id, synth_banner(rng));
      rel += id + ",irrelevant\n";
    }
    std::vector<std::pair<std::string, Image>> bases;
    for (std::size_t i = 0; i < 180; ++i) {
      const auto level = static_cast<DamageLevel>(i % 3);
      auto id = numbered("scene_", n++, ".png");
      auto img = synth_scene(rng, level);
      write_png(tdir / id, img);
      if (i < 120) rel += id + ",relevant\n";
      dmg += id + ',' + std::string(to_string(level)) + '\n';
      bases.emplace_back(id, std::move(img));
    }
    for (std::size_t i = 0; i < 90; ++i) {
      const auto& [bid, img] = bases[i * 2];
      const int kind = static_cast<int>(i % 3);
      auto id = numbered("variant_", n++, kind == 0 ? ".jpg" : ".png");
      auto v = near_duplicate(img, kind);
      if (kind == 0) write_jpeg(tdir / id, v);
      else write_png(tdir / id, v);
      pairs += bid + ',' + id + ",1\n";
    }
    for (std::size_t i = 0; i < 180; ++i) {
      std::size_t a = rng.below(bases.size()), b = rng.below(bases.size() - 1);
      if (b >= a) ++b;
      pairs += bases[a].first + ',' + bases[b].first + ",0\n";
    }
    write_text_file(dir / "training" / "relevancy_labels.csv", rel);
    write_text_file(dir / "training" / "damage_labels.csv", dmg);
    write_text_file(dir / "training" / "pairs.csv", pairs);
  }

  const Day end = opt.start + std::chrono::days{static_cast<long>(opt.days - 1)};
  std::string conf;
  conf += "# Synthetic event fixture.\n";
  conf += "[pipeline]\nout = out\nseed = 42\njobs = 1\n\n";
  conf += "[event.harvey]\ncorpus = tweets.jsonl\nimages = images\nkeywords = harvey, hurricane\n";
  conf += "start = " + format_day(opt.start) + "\nend = " + format_day(end) + "\n\n";
  conf += "[resources]\nstopwords = resources/stopwords.txt\nlexicon = resources/lexicon.tsv\n";
  conf += "persons = resources/persons.txt\norganizations = resources/organizations.txt\n";
  conf += "locations = resources/locations.txt\ncuration = resources/curation.txt\n\n";
  conf += "[training]\ntaxonomy = training/labeled_texts.csv\nimage_dir = training/images\n";
  conf += "relevancy = training/relevancy_labels.csv\ndamage = training/damage_labels.csv\nmin_df = 2\n\n";
  conf += "[forest]\ntrees = 100\n\n";
  conf += "[lda]\ntopics = 10\niterations = 1000\ntop_terms = 30\n\n";
  conf += "[dedup]\ntau = 10\npairs = training/pairs.csv\n\n";
  conf += "[entities]\ntop_k = 10\n";
  sum.config = dir / "fixture.conf";
  write_text_file(sum.config, conf);
  return sum;
}

}  // namespace crisislens
