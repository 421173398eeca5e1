#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pat/field.hpp"

namespace pat {

/// Binary dataset file:
///   "PATDSET\0" | u32 version | u32 n_meta | u32 n_arrays
///   n_meta x (str key, str value)
///   n_arrays x (str name, str unit, u8 dtype, u32 ndim, u64 shape[ndim], u64 offset)
///   payload
/// Strings are u32 length + bytes. Integers and float64 payloads are
/// little-endian; arrays are C-order. dtype 1 = float64.
inline constexpr std::uint32_t kContainerVersion = 1;

struct NamedArray {
  std::string name;
  std::string unit;
  std::vector<std::uint64_t> shape;
  std::vector<double> data;

  bool operator==(const NamedArray&) const = default;
};

struct Dataset {
  std::map<std::string, std::string> metadata;
  std::vector<NamedArray> arrays;

  const NamedArray* find(const std::string& name) const;
  /// Adds or replaces a 2-D array.
  void put(const std::string& name, const std::string& unit, const Field& f);
  /// Copies a 2-D array back into a Field; throws if absent or not 2-D.
  Field field(const std::string& name) const;
  const std::string& meta(const std::string& key) const;

  bool operator==(const Dataset&) const = default;
};

void write_dataset(std::ostream& os, const Dataset& ds);
Dataset read_dataset(std::istream& is);

/// Writes to a sibling temporary file, then renames over `path`.
void save_dataset(const std::filesystem::path& path, const Dataset& ds);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace pat
