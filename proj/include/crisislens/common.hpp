#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crisislens {

// Error hierarchy. Everything the library throws derives from Error.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class DataError : public Error {
public:
  using Error::Error;
};

// UTC calendar day.
using Day = std::chrono::sys_days;
using Timestamp = std::chrono::sys_seconds;

// "YYYY-MM-DD"
std::string format_day(Day day);
Day parse_day(std::string_view text);

// ISO-8601 instant, e.g. 2017-08-25T13:45:00Z or with a +hh:mm offset.
// Throws DataError when the text is not a valid instant.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp ts);

inline Day day_of(Timestamp ts) { return std::chrono::floor<std::chrono::days>(ts); }

// Inclusive list of days [first, last].
std::vector<Day> day_range(Day first, Day last);

// ASCII helpers; bytes >= 0x80 are left untouched.
std::string to_lower_ascii(std::string_view text);
std::string_view trim(std::string_view text);
bool is_space(char c);

// Shortest round-trip decimal representation.
std::string format_double(double value);

// 64-bit FNV-1a; used for config digests.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

// SplitMix64 step, used to derive independent seeds.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::string_view label);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Portable RNG. The standard distributions are implementation-defined, so
// bounded integers and uniforms are drawn here directly to keep results
// identical across toolchains.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  // Uniform in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);
  // Uniform in [0, 1).
  double uniform();

  template <typename It>
  void shuffle(It first, It last) {
    auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      auto j = below(i);
      std::swap(first[i - 1], first[j]);
    }
  }

private:
  std::uint64_t s_[4];
};

}  // namespace crisislens
