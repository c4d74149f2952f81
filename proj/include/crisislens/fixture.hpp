#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "crisislens/common.hpp"
#include "crisislens/image.hpp"
#include "crisislens/imagery.hpp"

namespace crisislens {

// Synthetic event bundle: corpus, images, training sets, resources and a
// ready-to-run config. Everything is a pure function of the options.
struct FixtureOptions {
  std::size_t tweets = 10000;      // valid in-window records
  std::size_t image_slots = 500;   // image occurrences across the corpus
  std::size_t days = 14;
  Day start = parse_day("2017-08-25");
  std::size_t labeled_texts = 3000;
  std::uint64_t seed = 7;
  std::filesystem::path data_dir;  // stopwords, lexicon, gazetteers, curation
};

struct FixtureSummary {
  std::filesystem::path config;
  std::size_t tweets = 0;
  std::size_t noise_lines = 0;  // malformed or out-of-window lines
  std::size_t image_items = 0;
  std::size_t image_files = 0;
  std::size_t missing_refs = 0;
};

FixtureSummary write_fixture(const std::filesystem::path& dir, const FixtureOptions& options);

// Flat graphic: solid background, a block and a few bars.
Image synth_banner(Rng& rng, std::size_t size = 64);
// Photo-like scene with large blobs; damage adds cracks or debris texture.
Image synth_scene(Rng& rng, DamageLevel damage, std::size_t size = 64);
// 0: identical pixels, 1: slight brightness shift, 2: bilinear rescale.
Image near_duplicate(const Image& image, int kind);

}  // namespace crisislens
