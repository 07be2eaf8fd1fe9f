#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace avgraph {

/// Univariate time series. Length is fixed at construction and every value
/// is finite; both are checked once here so downstream code never re-validates.
class Series {
 public:
  explicit Series(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2)
      throw std::invalid_argument("Series: need at least 2 samples, got " +
                                  std::to_string(values_.size()));
    for (double v : values_)
      if (!std::isfinite(v)) throw std::invalid_argument("Series: non-finite sample");
  }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const Series& a, const Series& b) { return a.values_ == b.values_; }

 private:
  std::vector<double> values_;
};

/// One radio sample: aligned in-phase and quadrature channels.
class IQFrame {
 public:
  IQFrame(Series i_channel, Series q_channel)
      : i_(std::move(i_channel)), q_(std::move(q_channel)) {
    if (i_.size() != q_.size())
      throw std::invalid_argument("IQFrame: channel lengths differ (" +
                                  std::to_string(i_.size()) + " vs " +
                                  std::to_string(q_.size()) + ")");
  }

  const Series& i_channel() const { return i_; }
  const Series& q_channel() const { return q_; }
  std::size_t length() const { return i_.size(); }

  friend bool operator==(const IQFrame& a, const IQFrame& b) {
    return a.i_ == b.i_ && a.q_ == b.q_;
  }

 private:
  Series i_;
  Series q_;
};

struct LabeledFrame {
  IQFrame frame;
  int label;   // class index, validated against the owning dataset
  int snr_db;

  friend bool operator==(const LabeledFrame& a, const LabeledFrame& b) {
    return a.frame == b.frame && a.label == b.label && a.snr_db == b.snr_db;
  }
};

/// Ordered collection of labeled frames with a shared class list and frame
/// length. add() enforces both invariants.
class Dataset {
 public:
  Dataset(std::vector<std::string> class_names, std::size_t frame_length)
      : class_names_(std::move(class_names)), frame_length_(frame_length) {
    if (class_names_.empty()) throw std::invalid_argument("Dataset: no classes");
    if (frame_length_ < 2) throw std::invalid_argument("Dataset: frame_length < 2");
  }

  void add(LabeledFrame f) {
    if (f.frame.length() != frame_length_)
      throw std::invalid_argument("Dataset: frame length " + std::to_string(f.frame.length()) +
                                  " != " + std::to_string(frame_length_));
    if (f.label < 0 || static_cast<std::size_t>(f.label) >= class_names_.size())
      throw std::invalid_argument("Dataset: label " + std::to_string(f.label) +
                                  " out of range for " + std::to_string(class_names_.size()) +
                                  " classes");
    frames_.push_back(std::move(f));
  }

  const std::vector<std::string>& class_names() const { return class_names_; }
  std::size_t class_count() const { return class_names_.size(); }
  std::size_t frame_length() const { return frame_length_; }
  const std::vector<LabeledFrame>& frames() const { return frames_; }
  std::size_t size() const { return frames_.size(); }
  bool empty() const { return frames_.empty(); }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.class_names_ == b.class_names_ && a.frame_length_ == b.frame_length_ &&
           a.frames_ == b.frames_;
  }

 private:
  std::vector<std::string> class_names_;
  std::size_t frame_length_;
  std::vector<LabeledFrame> frames_;
};

}  // namespace avgraph
