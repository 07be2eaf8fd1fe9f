#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "avgraph/rng.hpp"
#include "avgraph/series.hpp"

namespace avgraph {

enum class Modulation { Bpsk, Qpsk, Psk8, Qam16, Pam4, Gfsk, Cpfsk, AmDsb, Wbfm };

inline const char* modulation_name(Modulation m) {
  switch (m) {
    case Modulation::Bpsk: return "BPSK";
    case Modulation::Qpsk: return "QPSK";
    case Modulation::Psk8: return "PSK8";
    case Modulation::Qam16: return "QAM16";
    case Modulation::Pam4: return "PAM4";
    case Modulation::Gfsk: return "GFSK";
    case Modulation::Cpfsk: return "CPFSK";
    case Modulation::AmDsb: return "AMDSB";
    case Modulation::Wbfm: return "WBFM";
  }
  throw std::invalid_argument("unknown modulation id");
}

inline std::vector<Modulation> all_modulations() {
  return {Modulation::Bpsk, Modulation::Qpsk,  Modulation::Psk8,
          Modulation::Qam16, Modulation::Pam4, Modulation::Gfsk,
          Modulation::Cpfsk, Modulation::AmDsb, Modulation::Wbfm};
}

inline std::optional<Modulation> parse_modulation(std::string_view name) {
  for (Modulation m : all_modulations())
    if (name == modulation_name(m)) return m;
  return std::nullopt;
}

/// Clean signal and the additive noise it will be mixed with, kept separate
/// so tests can measure the realized signal/noise powers independently.
struct SignalComponents {
  IQFrame clean;
  IQFrame noise;
};

namespace detail {

constexpr int kSamplesPerSymbol = 8;
constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

inline void repeat_symbols(const std::vector<std::pair<double, double>>& symbols,
                           std::size_t length, std::vector<double>& i,
                           std::vector<double>& q) {
  for (std::size_t t = 0; t < length; ++t) {
    const auto& s = symbols[t / kSamplesPerSymbol];
    i[t] = s.first;
    q[t] = s.second;
  }
}

// Continuous-phase FSK: +-1 symbols drive the instantaneous frequency; the
// Gaussian kernel (GFSK) smooths the frequency pulse before integration.
inline void fsk_wave(std::size_t length, Rng& rng, bool gaussian, std::vector<double>& i,
                     std::vector<double>& q) {
  const std::size_t nsym = (length + kSamplesPerSymbol - 1) / kSamplesPerSymbol;
  std::vector<double> freq(length);
  const double mod_index = 0.5;
  std::vector<double> bits(nsym);
  for (auto& b : bits) b = rng.uniform() < 0.5 ? -1.0 : 1.0;
  for (std::size_t t = 0; t < length; ++t)
    freq[t] = 0.5 * mod_index * bits[t / kSamplesPerSymbol] / kSamplesPerSymbol;

  if (gaussian) {
    const double sigma = 2.0;
    const int half = 6;
    std::vector<double> kernel(2 * half + 1);
    double sum = 0.0;
    for (int k = -half; k <= half; ++k) {
      kernel[k + half] = std::exp(-0.5 * (k / sigma) * (k / sigma));
      sum += kernel[k + half];
    }
    for (auto& v : kernel) v /= sum;
    std::vector<double> smooth(length, 0.0);
    for (std::size_t t = 0; t < length; ++t) {
      for (int k = -half; k <= half; ++k) {
        const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t) + k;
        if (src >= 0 && src < static_cast<std::ptrdiff_t>(length))
          smooth[t] += kernel[k + half] * freq[src];
      }
    }
    freq.swap(smooth);
  }

  double phase = rng.uniform(0.0, kTwoPi);
  for (std::size_t t = 0; t < length; ++t) {
    phase += kTwoPi * freq[t];
    i[t] = std::cos(phase);
    q[t] = std::sin(phase);
  }
}

inline void clean_wave(Modulation mod, std::size_t length, Rng& rng,
                       std::vector<double>& i, std::vector<double>& q) {
  const std::size_t nsym = (length + kSamplesPerSymbol - 1) / kSamplesPerSymbol;
  std::vector<std::pair<double, double>> symbols(nsym);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  switch (mod) {
    case Modulation::Bpsk:
      for (auto& s : symbols) s = {rng.uniform() < 0.5 ? -1.0 : 1.0, 0.0};
      repeat_symbols(symbols, length, i, q);
      return;
    case Modulation::Qpsk:
      for (auto& s : symbols)
        s = {(rng.uniform() < 0.5 ? -1.0 : 1.0) * inv_sqrt2,
             (rng.uniform() < 0.5 ? -1.0 : 1.0) * inv_sqrt2};
      repeat_symbols(symbols, length, i, q);
      return;
    case Modulation::Psk8:
      for (auto& s : symbols) {
        const double a = kTwoPi * static_cast<double>(rng.below(8)) / 8.0;
        s = {std::cos(a), std::sin(a)};
      }
      repeat_symbols(symbols, length, i, q);
      return;
    case Modulation::Qam16: {
      const double levels[4] = {-3.0, -1.0, 1.0, 3.0};
      const double norm = 1.0 / std::sqrt(10.0);  // unit mean symbol energy
      for (auto& s : symbols)
        s = {levels[rng.below(4)] * norm, levels[rng.below(4)] * norm};
      repeat_symbols(symbols, length, i, q);
      return;
    }
    case Modulation::Pam4: {
      const double levels[4] = {-3.0, -1.0, 1.0, 3.0};
      const double norm = 1.0 / std::sqrt(5.0);
      for (auto& s : symbols) s = {levels[rng.below(4)] * norm, 0.0};
      repeat_symbols(symbols, length, i, q);
      return;
    }
    case Modulation::Gfsk:
      fsk_wave(length, rng, true, i, q);
      return;
    case Modulation::Cpfsk:
      fsk_wave(length, rng, false, i, q);
      return;
    case Modulation::AmDsb: {
      // amplitude-modulated random tone, carrier retained, real axis only
      const double fm = rng.uniform(0.01, 0.06);
      const double phi = rng.uniform(0.0, kTwoPi);
      for (std::size_t t = 0; t < length; ++t) {
        i[t] = 1.0 + 0.5 * std::cos(kTwoPi * fm * static_cast<double>(t) + phi);
        q[t] = 0.0;
      }
      return;
    }
    case Modulation::Wbfm: {
      // frequency-modulated random tone with a wide deviation
      const double fm = rng.uniform(0.005, 0.03);
      const double phi = rng.uniform(0.0, kTwoPi);
      double phase = rng.uniform(0.0, kTwoPi);
      for (std::size_t t = 0; t < length; ++t) {
        const double inst = 0.15 * std::cos(kTwoPi * fm * static_cast<double>(t) + phi);
        phase += kTwoPi * inst;
        i[t] = std::cos(phase);
        q[t] = std::sin(phase);
      }
      return;
    }
  }
  throw std::invalid_argument("unknown modulation id");
}

}  // namespace detail

/// Builds the clean waveform (unit empirical power over the frame) and a
/// noise frame whose per-sample variance realizes the requested SNR.
inline SignalComponents generate_components(Modulation mod, int snr_db, std::size_t length,
                                            std::uint64_t seed) {
  if (length < 8)
    throw std::invalid_argument("generate_components: length " + std::to_string(length) +
                                " < 8");
  Rng rng(mix_seed(seed, 0x5149'4652'414d'45ULL));
  std::vector<double> ci(length), cq(length);
  detail::clean_wave(mod, length, rng, ci, cq);

  double power = 0.0;
  for (std::size_t t = 0; t < length; ++t) power += ci[t] * ci[t] + cq[t] * cq[t];
  power /= static_cast<double>(length);
  const double gain = 1.0 / std::sqrt(power);
  for (std::size_t t = 0; t < length; ++t) {
    ci[t] *= gain;
    cq[t] *= gain;
  }

  // complex noise power 10^(-snr/10) relative to the (unit) signal power,
  // split evenly across the two channels
  const double noise_power = std::pow(10.0, -snr_db / 10.0);
  const double sigma = std::sqrt(noise_power / 2.0);
  std::vector<double> ni(length), nq(length);
  for (std::size_t t = 0; t < length; ++t) {
    ni[t] = rng.normal(0.0, sigma);
    nq[t] = rng.normal(0.0, sigma);
  }

  return {IQFrame(Series(std::move(ci)), Series(std::move(cq))),
          IQFrame(Series(std::move(ni)), Series(std::move(nq)))};
}

inline IQFrame generate_synthetic(Modulation mod, int snr_db, std::size_t length,
                                  std::uint64_t seed) {
  SignalComponents parts = generate_components(mod, snr_db, length, seed);
  std::vector<double> i(length), q(length);
  for (std::size_t t = 0; t < length; ++t) {
    i[t] = parts.clean.i_channel()[t] + parts.noise.i_channel()[t];
    q[t] = parts.clean.q_channel()[t] + parts.noise.q_channel()[t];
  }
  return IQFrame(Series(std::move(i)), Series(std::move(q)));
}

/// Rounds every channel value to its f32 representation, the container's
/// storage precision, so written datasets read back field-for-field equal.
inline IQFrame quantize_f32(const IQFrame& frame) {
  std::vector<double> i(frame.length()), q(frame.length());
  for (std::size_t t = 0; t < frame.length(); ++t) {
    i[t] = static_cast<double>(static_cast<float>(frame.i_channel()[t]));
    q[t] = static_cast<double>(static_cast<float>(frame.q_channel()[t]));
  }
  return IQFrame(Series(std::move(i)), Series(std::move(q)));
}

/// Per-cell synthesis: `per_cell` frames for every (class, snr) pair, each
/// frame seeded independently so datasets are reproducible and extendable.
/// Values are f32-quantized to match the container precision.
inline Dataset synth_dataset(const std::vector<Modulation>& classes,
                             const std::vector<int>& snrs_db, std::size_t per_cell,
                             std::size_t length, std::uint64_t seed) {
  if (classes.empty()) throw std::invalid_argument("synth_dataset: no classes");
  if (snrs_db.empty()) throw std::invalid_argument("synth_dataset: no SNRs");
  std::vector<std::string> names;
  names.reserve(classes.size());
  for (Modulation m : classes) names.emplace_back(modulation_name(m));

  Dataset out(std::move(names), length);
  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    for (std::size_t si = 0; si < snrs_db.size(); ++si) {
      for (std::size_t k = 0; k < per_cell; ++k) {
        const std::uint64_t cell = (static_cast<std::uint64_t>(ci) << 40) ^
                                   (static_cast<std::uint64_t>(si) << 20) ^ k;
        out.add({quantize_f32(generate_synthetic(classes[ci], snrs_db[si], length,
                                                 mix_seed(seed, cell))),
                 static_cast<int>(ci), snrs_db[si]});
      }
    }
  }
  return out;
}

}  // namespace avgraph
