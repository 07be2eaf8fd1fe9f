#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "avgraph/binio.hpp"
#include "avgraph/series.hpp"

namespace avgraph {

// Dataset container, little-endian:
//   magic "AVGD", u32 version=1, u32 M, u32 n, u32 frame_count,
//   M x (u16 length + UTF-8 class name),
//   per frame: u8 label, i8 snr_db, n x f32 I values, n x f32 Q values.
inline constexpr char kDatasetMagic[4] = {'A', 'V', 'G', 'D'};
inline constexpr std::uint32_t kDatasetVersion = 1;

inline void write_dataset(const Dataset& ds, std::ostream& os) {
  os.write(kDatasetMagic, 4);
  binio::put_u32(os, kDatasetVersion);
  binio::put_u32(os, static_cast<std::uint32_t>(ds.class_count()));
  binio::put_u32(os, static_cast<std::uint32_t>(ds.frame_length()));
  binio::put_u32(os, static_cast<std::uint32_t>(ds.size()));
  for (const auto& name : ds.class_names()) binio::put_string16(os, name);
  for (const auto& f : ds.frames()) {
    if (f.label > 0xff) throw std::invalid_argument("write_dataset: label exceeds u8");
    if (f.snr_db < -128 || f.snr_db > 127)
      throw std::invalid_argument("write_dataset: snr_db exceeds i8");
    binio::put_u8(os, static_cast<std::uint8_t>(f.label));
    binio::put_i8(os, static_cast<std::int8_t>(f.snr_db));
    for (std::size_t t = 0; t < ds.frame_length(); ++t)
      binio::put_f32(os, static_cast<float>(f.frame.i_channel()[t]));
    for (std::size_t t = 0; t < ds.frame_length(); ++t)
      binio::put_f32(os, static_cast<float>(f.frame.q_channel()[t]));
  }
}

inline void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_dataset: cannot open " + path.string());
  write_dataset(ds, os);
  if (!os) throw std::runtime_error("write_dataset: write failed for " + path.string());
}

inline Dataset read_dataset(std::istream& is) {
  char magic[4];
  binio::read_exact(is, magic, 4, "magic");
  if (std::string_view(magic, 4) != std::string_view(kDatasetMagic, 4))
    throw FormatError(FormatError::Kind::BadMagic,
                      "bad magic \"" + std::string(magic, 4) + "\", expected \"AVGD\"");
  const std::uint32_t version = binio::get_u32(is, "version");
  if (version != kDatasetVersion)
    throw FormatError(FormatError::Kind::BadVersion,
                      "unsupported dataset version " + std::to_string(version));
  const std::uint32_t class_count = binio::get_u32(is, "class count");
  const std::uint32_t frame_length = binio::get_u32(is, "frame length");
  const std::uint32_t frame_count = binio::get_u32(is, "frame count");

  std::vector<std::string> names;
  names.reserve(class_count);
  for (std::uint32_t c = 0; c < class_count; ++c)
    names.push_back(binio::get_string16(is, "class name"));

  Dataset ds(std::move(names), frame_length);
  for (std::uint32_t k = 0; k < frame_count; ++k) {
    const std::uint8_t label = binio::get_u8(is, "frame label");
    if (label >= class_count)
      throw FormatError(FormatError::Kind::BadLabel,
                        "frame " + std::to_string(k) + ": label " + std::to_string(label) +
                            " out of range for " + std::to_string(class_count) + " classes");
    const std::int8_t snr = binio::get_i8(is, "frame snr");
    std::vector<double> iv(frame_length), qv(frame_length);
    for (auto& v : iv) v = binio::get_f32(is, "I samples");
    for (auto& v : qv) v = binio::get_f32(is, "Q samples");
    ds.add({IQFrame(Series(std::move(iv)), Series(std::move(qv))), label, snr});
  }
  return ds;
}

inline Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_dataset: cannot open " + path.string());
  return read_dataset(is);
}

}  // namespace avgraph
