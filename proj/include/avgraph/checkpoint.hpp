#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "avgraph/adam.hpp"
#include "avgraph/binio.hpp"
#include "avgraph/matrix.hpp"

namespace avgraph {

// Checkpoint container, little-endian:
//   magic "AVGC", u32 version=1, u32 param_count,
//   per parameter: u16-length-prefixed name, u32 rows, u32 cols, rows*cols f32,
//   then first moments in the same record layout, then second moments,
//   then u64 step counter.
inline constexpr char kCheckpointMagic[4] = {'A', 'V', 'G', 'C'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedMatrix {
  std::string name;
  Matrix value;
};

namespace detail {

inline void put_record(std::ostream& os, const std::string& name, const Matrix& m) {
  binio::put_string16(os, name);
  binio::put_u32(os, static_cast<std::uint32_t>(m.rows()));
  binio::put_u32(os, static_cast<std::uint32_t>(m.cols()));
  for (std::size_t i = 0; i < m.size(); ++i)
    binio::put_f32(os, static_cast<float>(m.data()[i]));
}

inline NamedMatrix get_record(std::istream& is) {
  NamedMatrix rec;
  rec.name = binio::get_string16(is, "parameter name");
  const std::uint32_t rows = binio::get_u32(is, "parameter rows");
  const std::uint32_t cols = binio::get_u32(is, "parameter cols");
  rec.value = Matrix(rows, cols);
  for (std::size_t i = 0; i < rec.value.size(); ++i)
    rec.value.data()[i] = binio::get_f32(is, "parameter data");
  return rec;
}

}  // namespace detail

inline void save_checkpoint(const ParamStore& store, std::ostream& os) {
  os.write(kCheckpointMagic, 4);
  binio::put_u32(os, kCheckpointVersion);
  binio::put_u32(os, static_cast<std::uint32_t>(store.size()));
  for (std::size_t i = 0; i < store.size(); ++i)
    detail::put_record(os, store.param(i).name, store.value(i));
  for (std::size_t i = 0; i < store.size(); ++i)
    detail::put_record(os, store.param(i).name, store.moment1(i));
  for (std::size_t i = 0; i < store.size(); ++i)
    detail::put_record(os, store.param(i).name, store.moment2(i));
  binio::put_u64(os, store.step_count());
}

inline void save_checkpoint(const ParamStore& store, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_checkpoint: cannot open " + path.string());
  save_checkpoint(store, os);
  if (!os) throw std::runtime_error("save_checkpoint: write failed for " + path.string());
}

/// Raw view of a checkpoint: parameters, both moment sets, step counter.
struct CheckpointRecords {
  std::vector<NamedMatrix> params;
  std::vector<NamedMatrix> moment1;
  std::vector<NamedMatrix> moment2;
  std::uint64_t step_count = 0;

  const NamedMatrix* find(std::string_view name) const {
    for (const auto& p : params)
      if (p.name == name) return &p;
    return nullptr;
  }
};

inline CheckpointRecords read_checkpoint(std::istream& is) {
  char magic[4];
  binio::read_exact(is, magic, 4, "magic");
  if (std::string_view(magic, 4) != std::string_view(kCheckpointMagic, 4))
    throw FormatError(FormatError::Kind::BadMagic,
                      "bad magic \"" + std::string(magic, 4) + "\", expected \"AVGC\"");
  const std::uint32_t version = binio::get_u32(is, "version");
  if (version != kCheckpointVersion)
    throw FormatError(FormatError::Kind::BadVersion,
                      "unsupported checkpoint version " + std::to_string(version));
  const std::uint32_t count = binio::get_u32(is, "parameter count");

  CheckpointRecords rec;
  for (std::uint32_t i = 0; i < count; ++i) rec.params.push_back(detail::get_record(is));
  for (std::uint32_t i = 0; i < count; ++i) rec.moment1.push_back(detail::get_record(is));
  for (std::uint32_t i = 0; i < count; ++i) rec.moment2.push_back(detail::get_record(is));
  rec.step_count = binio::get_u64(is, "step counter");
  return rec;
}

inline CheckpointRecords read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_checkpoint: cannot open " + path.string());
  return read_checkpoint(is);
}

/// Restores parameters and optimizer state into an already-shaped store.
/// Names and shapes must match the store's binding exactly.
inline void load_checkpoint(ParamStore& store, const CheckpointRecords& rec) {
  if (rec.params.size() != store.size())
    throw FormatError(FormatError::Kind::BadRecord,
                      "checkpoint has " + std::to_string(rec.params.size()) +
                          " parameters, expected " + std::to_string(store.size()));
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto check = [&](const NamedMatrix& got, const char* what) -> const Matrix& {
      if (got.name != store.param(i).name)
        throw FormatError(FormatError::Kind::BadRecord,
                          std::string(what) + " " + std::to_string(i) + " named \"" +
                              got.name + "\", expected \"" + store.param(i).name + "\"");
      if (!got.value.same_shape(store.value(i)))
        throw FormatError(FormatError::Kind::BadRecord,
                          std::string(what) + " \"" + got.name + "\" is " +
                              shape_str(got.value) + ", expected " + shape_str(store.value(i)));
      return got.value;
    };
    store.value(i) = check(rec.params[i], "parameter");
    store.moment1(i) = check(rec.moment1[i], "first moment");
    store.moment2(i) = check(rec.moment2[i], "second moment");
  }
  store.set_step_count(rec.step_count);
}

}  // namespace avgraph
