#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace crisislens {

using CsvRow = std::vector<std::string>;

// RFC 4180 reader: quoted fields may contain separators, doubled quotes and
// line breaks. Throws DataError on an unterminated quote.
std::vector<CsvRow> parse_csv(std::istream& in);
std::vector<CsvRow> read_csv_file(const std::filesystem::path& path);

// Quotes a field only when it needs quoting.
std::string csv_field(std::string_view field);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

// One entry per non-empty line; '#' starts a comment line.
std::vector<std::string> read_word_list(const std::filesystem::path& path);

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Work is handed out
// in index order; fn must only write to state owned by index i.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace crisislens
