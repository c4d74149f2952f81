#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "crisislens/common.hpp"

namespace crisislens {

enum class SeriesUnit { count, percent, fraction };

std::string_view unit_name(SeriesUnit unit);
SeriesUnit parse_unit(std::string_view name);

// One value per window day, in day order starting at `start`.
struct DailySeries {
  std::string name;
  std::string event;
  Day start;
  std::vector<double> values;
  SeriesUnit unit = SeriesUnit::count;

  std::size_t size() const { return values.size(); }
  Day day(std::size_t i) const { return start + std::chrono::days{static_cast<long>(i)}; }
  // Throws DataError when a value is out of range for the unit.
  void validate() const;
};

}  // namespace crisislens
