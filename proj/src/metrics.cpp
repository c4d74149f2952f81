#include <cmath>
#include <limits>

#include "crisislens/learn.hpp"

namespace crisislens {

using nlohmann::json;

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

EvalReport evaluate(std::span<const std::uint32_t> predicted, std::span<const std::uint32_t> gold,
                    const std::vector<std::string>& class_names) {
  if (predicted.size() != gold.size()) throw DataError("prediction and gold sequences differ in length");
  const std::size_t k = class_names.size();
  EvalReport rep;
  rep.class_names = class_names;
  rep.confusion.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] >= k || predicted[i] >= k) throw DataError("class index out of range in evaluation");
    ++rep.confusion[gold[i]][predicted[i]];
  }
  std::size_t correct = 0, tp_total = 0, fn_total = 0;
  rep.per_class.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t tp = rep.confusion[c][c], row = 0, col = 0;
    for (std::size_t o = 0; o < k; ++o) {
      row += rep.confusion[c][o];
      col += rep.confusion[o][c];
    }
    auto& m = rep.per_class[c];
    m.support = row;
    m.precision = ratio(tp, col);
    m.recall = ratio(tp, row);
    m.f1 = (m.precision + m.recall) > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    correct += tp;
    tp_total += tp;
    fn_total += row - tp;
  }
  rep.accuracy = ratio(correct, gold.size());
  rep.micro_recall = ratio(tp_total, tp_total + fn_total);
  double f1_sum = 0.0, weighted = 0.0;
  for (const auto& m : rep.per_class) {
    f1_sum += m.f1;
    weighted += m.f1 * static_cast<double>(m.support);
  }
  rep.macro_f1 = k ? f1_sum / static_cast<double>(k) : 0.0;
  rep.weighted_f1 = gold.empty() ? 0.0 : weighted / static_cast<double>(gold.size());
  return rep;
}

json eval_to_json(const EvalReport& report) {
  json per_class = json::array();
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& m = report.per_class[c];
    per_class.push_back({{"class", report.class_names[c]},
                         {"precision", m.precision},
                         {"recall", m.recall},
                         {"f1", m.f1},
                         {"support", m.support}});
  }
  return {{"accuracy", report.accuracy},     {"macro_f1", report.macro_f1},
          {"weighted_f1", report.weighted_f1}, {"per_class", std::move(per_class)},
          {"class_names", report.class_names}, {"confusion", report.confusion}};
}

}  // namespace crisislens
