#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "avgraph/dataset_io.hpp"
#include "avgraph/rng.hpp"
#include "avgraph/series.hpp"
#include "avgraph/split.hpp"
#include "avgraph/synth.hpp"

using namespace avgraph;

namespace {

double mean_power(const IQFrame& f) {
  double p = 0.0;
  for (std::size_t t = 0; t < f.length(); ++t)
    p += f.i_channel()[t] * f.i_channel()[t] + f.q_channel()[t] * f.q_channel()[t];
  return p / static_cast<double>(f.length());
}

// empty shell with the paper's dataset shape, for split arithmetic
Dataset shell_dataset(std::size_t classes, const std::vector<int>& snrs,
                      std::size_t per_cell) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < classes; ++c) names.push_back("C" + std::to_string(c));
  Dataset ds(std::move(names), 2);
  const Series zero({0.0, 0.0});
  for (std::size_t c = 0; c < classes; ++c)
    for (int snr : snrs)
      for (std::size_t k = 0; k < per_cell; ++k)
        ds.add({IQFrame(zero, zero), static_cast<int>(c), snr});
  return ds;
}

}  // namespace

TEST_CASE("noiseless BPSK sits on the real axis") {
  const IQFrame f = generate_synthetic(Modulation::Bpsk, 60, 128, 7);
  for (std::size_t t = 0; t < f.length(); ++t) {
    REQUIRE(std::min(std::abs(f.i_channel()[t] - 1.0), std::abs(f.i_channel()[t] + 1.0)) <
            0.01);
    REQUIRE(std::abs(f.q_channel()[t]) < 0.01);
  }
}

TEST_CASE("noiseless QPSK hits the four corners") {
  const IQFrame f = generate_synthetic(Modulation::Qpsk, 60, 128, 7);
  const double c = 1.0 / std::sqrt(2.0);
  for (std::size_t t = 0; t < f.length(); ++t) {
    REQUIRE(std::min(std::abs(f.i_channel()[t] - c), std::abs(f.i_channel()[t] + c)) < 0.01);
    REQUIRE(std::min(std::abs(f.q_channel()[t] - c), std::abs(f.q_channel()[t] + c)) < 0.01);
  }
}

TEST_CASE("0 dB means equal clean and noise power") {
  const SignalComponents parts = generate_components(Modulation::Bpsk, 0, 128, 7);
  const double ps = mean_power(parts.clean);
  const double pn = mean_power(parts.noise);
  REQUIRE(ps == Catch::Approx(1.0).epsilon(1e-12));  // clean is normalized
  REQUIRE(pn / ps > 0.8);
  REQUIRE(pn / ps < 1.2);
}

TEST_CASE("generator determinism and argument validation") {
  for (Modulation m : all_modulations()) {
    const IQFrame a = generate_synthetic(m, 4, 64, 99);
    const IQFrame b = generate_synthetic(m, 4, 64, 99);
    REQUIRE(a == b);
    const IQFrame c = generate_synthetic(m, 4, 64, 100);
    REQUIRE_FALSE(a == c);
  }
  CHECK_THROWS_AS(generate_synthetic(Modulation::Bpsk, 0, 7, 1), std::invalid_argument);
  CHECK(parse_modulation("QAM16").has_value());
  CHECK_FALSE(parse_modulation("QAM1024").has_value());
}

TEST_CASE("all waveforms carry unit clean power") {
  for (Modulation m : all_modulations()) {
    const SignalComponents parts = generate_components(m, 10, 256, 5);
    REQUIRE(mean_power(parts.clean) == Catch::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("dataset container round-trips") {
  const Dataset ds = synth_dataset({Modulation::Bpsk, Modulation::Gfsk}, {0, 10}, 2, 16, 3);
  REQUIRE(ds.size() == 8);

  std::stringstream buf;
  write_dataset(ds, buf);
  const Dataset back = read_dataset(buf);
  REQUIRE(back == ds);

  // byte determinism of the writer
  std::stringstream again;
  write_dataset(ds, again);
  REQUIRE(again.str() == buf.str());
}

TEST_CASE("container rejects malformed input") {
  const Dataset ds = synth_dataset({Modulation::Bpsk}, {0}, 3, 16, 3);
  std::stringstream buf;
  write_dataset(ds, buf);
  const std::string bytes = buf.str();

  auto kind_of = [](const std::string& data) {
    std::stringstream in(data);
    try {
      read_dataset(in);
    } catch (const FormatError& e) {
      return e.kind();
    }
    throw std::logic_error("expected a FormatError");
  };

  std::string bad_magic = bytes;
  bad_magic.replace(0, 4, "XXXX");
  CHECK(kind_of(bad_magic) == FormatError::Kind::BadMagic);

  std::string bad_version = bytes;
  bad_version[4] = 9;
  CHECK(kind_of(bad_version) == FormatError::Kind::BadVersion);

  CHECK(kind_of(bytes.substr(0, bytes.size() - 7)) == FormatError::Kind::Truncated);

  // first frame's label byte sits right after header + one class name
  const std::size_t label_at = 4 + 4 + 4 + 4 + 4 + (2 + 4);
  std::string bad_label = bytes;
  bad_label[label_at] = 3;
  CHECK(kind_of(bad_label) == FormatError::Kind::BadLabel);
}

TEST_CASE("stratified split reproduces the paper-shaped counts") {
  std::vector<int> snrs;
  for (int s = -20; s <= 18; s += 2) snrs.push_back(s);
  const Dataset ds = shell_dataset(11, snrs, 1000);
  REQUIRE(ds.size() == 220000);

  const auto [train, test] = split_stratified(ds, 0.8, 2016);
  CHECK(train.size() == 176000);
  CHECK(test.size() == 44000);
}

TEST_CASE("split edge cases and determinism") {
  const Dataset two = shell_dataset(1, {0}, 2);
  const auto [t1, v1] = split_stratified(two, 0.5, 7);
  CHECK(t1.size() == 1);
  CHECK(v1.size() == 1);

  const Dataset ds = shell_dataset(3, {0, 2, 4}, 11);
  const auto [ta, va] = split_stratified(ds, 0.7, 42);
  const auto [tb, vb] = split_stratified(ds, 0.7, 42);
  CHECK(ta == tb);
  CHECK(va == vb);
  CHECK(ta.size() + va.size() == ds.size());

  // per-cell balance: every (class, snr) cell within 1/cell of the fraction
  for (int c = 0; c < 3; ++c) {
    for (int snr : {0, 2, 4}) {
      std::size_t in_train = 0;
      for (const auto& f : ta.frames())
        if (f.label == c && f.snr_db == snr) ++in_train;
      const double ratio = static_cast<double>(in_train) / 11.0;
      REQUIRE(std::abs(ratio - 0.7) <= 1.0 / 11.0);
    }
  }

  CHECK_THROWS_AS(split_stratified(ds, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_stratified(ds, 1.0, 1), std::invalid_argument);
  Dataset empty({"A"}, 2);
  CHECK_THROWS_AS(split_stratified(empty, 0.5, 1), std::invalid_argument);
}

TEST_CASE("random split partitions without stratification") {
  const Dataset ds = shell_dataset(2, {0, 2}, 25);
  const auto [train, test] = split_random(ds, 0.5, 9);
  CHECK(train.size() == 50);
  CHECK(test.size() == 50);
  const auto [train2, test2] = split_random(ds, 0.5, 9);
  CHECK(train == train2);
  CHECK(test == test2);
}

TEST_CASE("series and frame invariants") {
  CHECK_THROWS_AS(Series(std::vector<double>{1.0, std::nan("")}), std::invalid_argument);
  CHECK_THROWS_AS(IQFrame(Series({1, 2}), Series({1, 2, 3})), std::invalid_argument);
  Dataset ds({"A", "B"}, 4);
  CHECK_THROWS_AS(ds.add({IQFrame(Series({1, 2}), Series({1, 2})), 0, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      ds.add({IQFrame(Series({1, 2, 3, 4}), Series({1, 2, 3, 4})), 2, 0}),
      std::invalid_argument);
}
