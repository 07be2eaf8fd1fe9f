#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "avgraph/rng.hpp"
#include "avgraph/series.hpp"

namespace avgraph {

namespace detail {

inline void check_split_args(const Dataset& ds, double train_fraction) {
  if (ds.empty()) throw std::invalid_argument("split: empty dataset");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("split: train_fraction must be in (0,1)");
}

inline std::pair<Dataset, Dataset> build_splits(const Dataset& ds,
                                                const std::vector<bool>& in_train) {
  Dataset train(ds.class_names(), ds.frame_length());
  Dataset test(ds.class_names(), ds.frame_length());
  for (std::size_t k = 0; k < ds.size(); ++k)
    (in_train[k] ? train : test).add(ds.frames()[k]);
  return {std::move(train), std::move(test)};
}

}  // namespace detail

// Per-(class, snr) cell split. Each cell contributes round(fraction * size)
// frames to the train side, ties rounding toward the test side. Cells are
// visited in (label, snr) order so a given seed always yields the same split.
inline std::pair<Dataset, Dataset> split_stratified(const Dataset& ds, double train_fraction,
                                                    std::uint64_t seed) {
  detail::check_split_args(ds, train_fraction);

  std::map<std::pair<int, int>, std::vector<std::size_t>> cells;
  for (std::size_t k = 0; k < ds.size(); ++k)
    cells[{ds.frames()[k].label, ds.frames()[k].snr_db}].push_back(k);

  Rng rng(mix_seed(seed, 0x53'50'4c'49'54ULL));
  std::vector<bool> in_train(ds.size(), false);
  for (auto& [cell, indices] : cells) {
    rng.shuffle(indices);
    const double want = train_fraction * static_cast<double>(indices.size());
    const auto take = static_cast<std::size_t>(std::ceil(want - 0.5));  // half rounds down
    for (std::size_t i = 0; i < take && i < indices.size(); ++i) in_train[indices[i]] = true;
  }
  return detail::build_splits(ds, in_train);
}

// Frame-level random split, no stratification.
inline std::pair<Dataset, Dataset> split_random(const Dataset& ds, double train_fraction,
                                                std::uint64_t seed) {
  detail::check_split_args(ds, train_fraction);

  std::vector<std::size_t> indices(ds.size());
  for (std::size_t k = 0; k < ds.size(); ++k) indices[k] = k;
  Rng rng(mix_seed(seed, 0x52'41'4e'44ULL));
  rng.shuffle(indices);

  const double want = train_fraction * static_cast<double>(ds.size());
  const auto take = static_cast<std::size_t>(std::ceil(want - 0.5));
  std::vector<bool> in_train(ds.size(), false);
  for (std::size_t i = 0; i < take && i < indices.size(); ++i) in_train[indices[i]] = true;
  return detail::build_splits(ds, in_train);
}

}  // namespace avgraph
