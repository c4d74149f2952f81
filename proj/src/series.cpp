#include "crisislens/series.hpp"

#include <cmath>

namespace crisislens {

std::string_view unit_name(SeriesUnit unit) {
  switch (unit) {
    case SeriesUnit::count: return "count";
    case SeriesUnit::percent: return "percent";
    case SeriesUnit::fraction: return "fraction";
  }
  return "count";
}

SeriesUnit parse_unit(std::string_view name) {
  if (name == "count") return SeriesUnit::count;
  if (name == "percent") return SeriesUnit::percent;
  if (name == "fraction") return SeriesUnit::fraction;
  throw DataError("unknown series unit '" + std::string(name) + "'");
}

void DailySeries::validate() const {
  const double hi = unit == SeriesUnit::percent ? 100.0 : 1.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw DataError("series '" + name + "' has a non-finite value");
    if (unit == SeriesUnit::count) {
      if (v < 0) throw DataError("series '" + name + "' has a negative count");
    } else if (v < -1e-9 || v > hi + 1e-9) {
      throw DataError("series '" + name + "' value out of range");
    }
  }
}

}  // namespace crisislens
