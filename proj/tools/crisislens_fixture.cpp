#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "crisislens/fixture.hpp"

#ifndef CRISISLENS_DATA_DIR
#define CRISISLENS_DATA_DIR "data"
#endif

int main(int argc, char** argv) {
  CLI::App app{"Writes the synthetic event fixture (corpus, images, training data, config)"};
  std::string dir;
  crisislens::FixtureOptions opt;
  std::string data = CRISISLENS_DATA_DIR;
  app.add_option("dir", dir, "output directory")->required();
  app.add_option("--seed", opt.seed, "generator seed");
  app.add_option("--tweets", opt.tweets, "in-window tweets");
  app.add_option("--images", opt.image_slots, "image occurrences");
  app.add_option("--data", data, "directory with the default resource files");
  CLI11_PARSE(app, argc, argv);
  opt.data_dir = data;
  try {
    auto sum = crisislens::write_fixture(dir, opt);
    std::cout << "wrote " << sum.config.string() << ": " << sum.tweets << " tweets, " << sum.image_items
              << " image refs, " << sum.image_files << " image files, " << sum.missing_refs << " missing\n";
  } catch (const std::exception& e) {
    std::cerr << "crisislens-fixture: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
