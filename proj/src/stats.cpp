#include <algorithm>
#include <cmath>
#include <limits>

#include "crisislens/learn.hpp"

namespace crisislens {

namespace {

// Continued fraction for the incomplete beta, modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw DataError("incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The fraction converges fast below the mean; use the symmetry otherwise.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided(double t, double df) {
  if (!(df > 0)) throw DataError("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("correlation inputs differ in length");
  const std::size_t n = x.size();
  if (n < 3) throw DataError("correlation needs at least 3 points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelation("correlation undefined for a constant series");
  double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  CorrelationResult res;
  res.r = r;
  res.n = n;
  const double df = static_cast<double>(n - 2);
  const double one_minus = 1.0 - r * r;
  if (one_minus <= 0.0) {
    res.p = 0.0;
  } else {
    const double t = r * std::sqrt(df / one_minus);
    res.p = std::clamp(student_t_two_sided(t, df), 0.0, 1.0);
  }
  return res;
}

TrendLine ols_trend(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 2) throw DataError("trend line needs at least 2 points");
  const double tbar = static_cast<double>(n - 1) / 2.0;
  double ybar = 0;
  for (double v : series) ybar += v;
  ybar /= static_cast<double>(n);
  double sty = 0, stt = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = static_cast<double>(i) - tbar;
    sty += dt * (series[i] - ybar);
    stt += dt * dt;
  }
  TrendLine line;
  line.slope = sty / stt;
  line.intercept = ybar - line.slope * tbar;
  return line;
}

}  // namespace crisislens
