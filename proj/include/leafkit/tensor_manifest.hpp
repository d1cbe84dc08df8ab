#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "leafkit/refkernels/conv.hpp"

namespace leafkit {

/// Named dense tensors with row-major values. Two on-disk forms:
///   JSON   {"tensors": {"name": {"shape": [..], "values": [..]}}}
///   binary "LKTM", u32 count, then per tensor: u32 name length, name bytes,
///          u32 rank, rank x u64 dims, prod(dims) x f64 values (little endian).
struct TensorEntry {
  std::vector<std::int64_t> shape;
  std::vector<double> values;
};

class TensorManifest {
 public:
  void insert(const std::string& name, TensorEntry entry);
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  const TensorEntry& at(const std::string& name) const;
  const std::map<std::string, TensorEntry>& entries() const { return entries_; }

  kernels::FeatureMap<double> feature_map(const std::string& name) const;
  kernels::Kernel<double> kernel(const std::string& name) const;
  kernels::Vector<double> vector(const std::string& name) const;

  /// `<prefix>.weight` (rank 4) and optional `<prefix>.bias`.
  kernels::ConvParams<double> conv(const std::string& prefix, int stride = 1, int groups = 1) const;

  static TensorManifest parse_json(const std::string& text);
  static TensorManifest parse_binary(const std::string& bytes);
  /// Dispatches on the leading magic bytes.
  static TensorManifest load(const std::filesystem::path& path);

  std::string to_json() const;
  std::string to_binary() const;

 private:
  const TensorEntry& expect_rank(const std::string& name, std::size_t rank) const;
  std::map<std::string, TensorEntry> entries_;
};

}  // namespace leafkit
