#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "avgraph/diffpool.hpp"
#include "avgraph/parallel.hpp"
#include "avgraph/series.hpp"

namespace avgraph {

/// Classification quality summary. Confusion rows are true classes, columns
/// predictions; accuracy always equals trace/total by construction.
struct EvalReport {
  double accuracy = 0.0;
  double f1_macro = 0.0;
  double f1_weighted = 0.0;
  double recall_macro = 0.0;
  std::map<int, double> per_snr_accuracy;
  std::vector<std::vector<std::uint64_t>> confusion;

  std::vector<double> precision_per_class;
  std::vector<double> recall_per_class;
  std::vector<double> f1_per_class;
  std::vector<std::uint64_t> support_per_class;
};

// Metric conventions: a class with no predictions has precision 0, one with
// no support has recall 0, and F1 is 0 whenever precision + recall is 0.
// Macro means are unweighted over all classes; weighted means use supports.
inline EvalReport report_from_predictions(const Dataset& ds, const std::vector<int>& preds) {
  if (ds.empty()) throw std::invalid_argument("evaluate: empty dataset");
  if (preds.size() != ds.size())
    throw std::invalid_argument("evaluate: " + std::to_string(preds.size()) +
                                " predictions for " + std::to_string(ds.size()) + " frames");

  const std::size_t m = ds.class_count();
  EvalReport rep;
  rep.confusion.assign(m, std::vector<std::uint64_t>(m, 0));

  std::map<int, std::pair<std::uint64_t, std::uint64_t>> snr_hits;  // snr -> (correct, total)
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const int truth = ds.frames()[k].label;
    const int pred = preds[k];
    if (pred < 0 || static_cast<std::size_t>(pred) >= m)
      throw std::invalid_argument("evaluate: prediction " + std::to_string(pred) +
                                  " out of range");
    rep.confusion[truth][pred] += 1;
    auto& cell = snr_hits[ds.frames()[k].snr_db];
    cell.second += 1;
    if (pred == truth) cell.first += 1;
  }

  std::uint64_t correct = 0;
  rep.support_per_class.assign(m, 0);
  std::vector<std::uint64_t> predicted(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    correct += rep.confusion[i][i];
    for (std::size_t j = 0; j < m; ++j) {
      rep.support_per_class[i] += rep.confusion[i][j];
      predicted[j] += rep.confusion[i][j];
    }
  }
  rep.accuracy = static_cast<double>(correct) / static_cast<double>(ds.size());

  rep.precision_per_class.assign(m, 0.0);
  rep.recall_per_class.assign(m, 0.0);
  rep.f1_per_class.assign(m, 0.0);
  double f1_weight_sum = 0.0;
  for (std::size_t c = 0; c < m; ++c) {
    const double tp = static_cast<double>(rep.confusion[c][c]);
    const double prec = predicted[c] == 0 ? 0.0 : tp / static_cast<double>(predicted[c]);
    const double rec =
        rep.support_per_class[c] == 0 ? 0.0 : tp / static_cast<double>(rep.support_per_class[c]);
    const double f1 = (prec + rec) == 0.0 ? 0.0 : 2.0 * prec * rec / (prec + rec);
    rep.precision_per_class[c] = prec;
    rep.recall_per_class[c] = rec;
    rep.f1_per_class[c] = f1;
    rep.recall_macro += rec / static_cast<double>(m);
    rep.f1_macro += f1 / static_cast<double>(m);
    f1_weight_sum += f1 * static_cast<double>(rep.support_per_class[c]);
  }
  rep.f1_weighted = f1_weight_sum / static_cast<double>(ds.size());

  for (const auto& [snr, cell] : snr_hits)
    rep.per_snr_accuracy[snr] =
        static_cast<double>(cell.first) / static_cast<double>(cell.second);
  return rep;
}

inline std::vector<int> predict(const Dataset& ds, const AvgNetParams& params,
                                int threads = 0) {
  std::vector<int> preds(ds.size(), -1);
  parallel_chunks(ds.size(), 16, thread_budget(threads),
                  [&](std::size_t begin, std::size_t end, std::size_t) {
                    for (std::size_t k = begin; k < end; ++k) {
                      const Matrix logits = avgnet_forward(ds.frames()[k].frame, params);
                      std::size_t best = 0;
                      for (std::size_t j = 1; j < logits.cols(); ++j)
                        if (logits(0, j) > logits(0, best)) best = j;
                      preds[k] = static_cast<int>(best);
                    }
                  });
  return preds;
}

inline EvalReport evaluate(const Dataset& ds, const AvgNetParams& params, int threads = 0) {
  if (ds.empty()) throw std::invalid_argument("evaluate: empty dataset");
  if (ds.class_count() != static_cast<std::size_t>(params.config.classes))
    throw std::invalid_argument("evaluate: dataset has " + std::to_string(ds.class_count()) +
                                " classes, model expects " +
                                std::to_string(params.config.classes));
  return report_from_predictions(ds, predict(ds, params, threads));
}

// ---- CSV emissions ----

inline void write_report_csv(const EvalReport& rep, const Dataset& ds, std::ostream& os) {
  os << "metric,value\n";
  os << "accuracy," << rep.accuracy << "\n";
  os << "f1_macro," << rep.f1_macro << "\n";
  os << "f1_weighted," << rep.f1_weighted << "\n";
  os << "recall_macro," << rep.recall_macro << "\n";
  for (std::size_t c = 0; c < ds.class_count(); ++c) {
    os << "precision_" << ds.class_names()[c] << "," << rep.precision_per_class[c] << "\n";
    os << "recall_" << ds.class_names()[c] << "," << rep.recall_per_class[c] << "\n";
    os << "f1_" << ds.class_names()[c] << "," << rep.f1_per_class[c] << "\n";
  }
}

inline void write_per_snr_csv(const EvalReport& rep, std::ostream& os) {
  os << "snr,accuracy\n";
  for (const auto& [snr, acc] : rep.per_snr_accuracy) os << snr << "," << acc << "\n";
}

inline void write_confusion_csv(const EvalReport& rep, const Dataset& ds, std::ostream& os) {
  os << "true\\pred";
  for (const auto& name : ds.class_names()) os << "," << name;
  os << "\n";
  for (std::size_t i = 0; i < rep.confusion.size(); ++i) {
    os << ds.class_names()[i];
    for (std::size_t j = 0; j < rep.confusion[i].size(); ++j) os << "," << rep.confusion[i][j];
    os << "\n";
  }
}

}  // namespace avgraph
