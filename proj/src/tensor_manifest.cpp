#include "leafkit/tensor_manifest.hpp"

#include <bit>
#include <cstring>

#include "json_support.hpp"

namespace leafkit {

namespace {

constexpr char kMagic[4] = {'L', 'K', 'T', 'M'};

std::size_t element_count(const std::vector<std::int64_t>& shape) {
  std::size_t n = 1;
  for (const auto d : shape) {
    if (d < 1) throw ValidationError("tensor manifest: dimensions must be >= 1");
    n *= std::size_t(d);
  }
  return n;
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T read() {
    static_assert(std::endian::native == std::endian::little);
    if (at_ + sizeof(T) > bytes_.size()) throw ParseError("tensor manifest: truncated binary", 0, 0);
    T v;
    std::memcpy(&v, bytes_.data() + at_, sizeof(T));
    at_ += sizeof(T);
    return v;
  }

  std::string read_string(std::size_t n) {
    if (at_ + n > bytes_.size()) throw ParseError("tensor manifest: truncated binary", 0, 0);
    std::string s = bytes_.substr(at_, n);
    at_ += n;
    return s;
  }

  bool done() const { return at_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t at_ = 0;
};

template <typename T>
void append(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

}  // namespace

void TensorManifest::insert(const std::string& name, TensorEntry entry) {
  if (name.empty()) throw ValidationError("tensor manifest: empty tensor name");
  if (entry.shape.empty()) throw ValidationError("tensor manifest: '" + name + "' has rank 0");
  if (element_count(entry.shape) != entry.values.size())
    throw ValidationError("tensor manifest: '" + name + "' value count does not match its shape");
  for (const double v : entry.values)
    if (!std::isfinite(v)) throw ValidationError("tensor manifest: '" + name + "' has non-finite values");
  if (!entries_.emplace(name, std::move(entry)).second)
    throw ValidationError("tensor manifest: duplicate tensor '" + name + "'");
}

const TensorEntry& TensorManifest::at(const std::string& name) const {
  const auto it = entries_.find(name);
  if (it == entries_.end()) throw ValidationError("tensor manifest: missing tensor '" + name + "'");
  return it->second;
}

const TensorEntry& TensorManifest::expect_rank(const std::string& name, std::size_t rank) const {
  const TensorEntry& e = at(name);
  if (e.shape.size() != rank)
    throw ValidationError("tensor manifest: '" + name + "' has rank " + std::to_string(e.shape.size()) +
                          ", expected " + std::to_string(rank));
  return e;
}

kernels::FeatureMap<double> TensorManifest::feature_map(const std::string& name) const {
  const TensorEntry& e = expect_rank(name, 3);
  kernels::FeatureMap<double> t(e.shape[0], e.shape[1], e.shape[2]);
  std::copy(e.values.begin(), e.values.end(), t.data());
  return t;
}

kernels::Kernel<double> TensorManifest::kernel(const std::string& name) const {
  const TensorEntry& e = expect_rank(name, 4);
  kernels::Kernel<double> t(e.shape[0], e.shape[1], e.shape[2], e.shape[3]);
  std::copy(e.values.begin(), e.values.end(), t.data());
  return t;
}

kernels::Vector<double> TensorManifest::vector(const std::string& name) const {
  const TensorEntry& e = expect_rank(name, 1);
  return Eigen::Map<const kernels::Vector<double>>(e.values.data(), Eigen::Index(e.values.size()));
}

kernels::ConvParams<double> TensorManifest::conv(const std::string& prefix, int stride, int groups) const {
  kernels::ConvParams<double> p;
  p.weight = kernel(prefix + ".weight");
  if (contains(prefix + ".bias")) p.bias = vector(prefix + ".bias");
  p.stride = stride;
  p.groups = groups;
  p.validate(prefix.c_str());
  return p;
}

TensorManifest TensorManifest::parse_json(const std::string& text) {
  const nlohmann::json doc = detail::parse_json(text, "tensor manifest");
  if (!doc.is_object() || !doc.contains("tensors") || !doc["tensors"].is_object())
    throw ValidationError("tensor manifest: expected an object with a \"tensors\" object");
  TensorManifest m;
  for (const auto& [name, t] : doc["tensors"].items()) {
    try {
      m.insert(name, {t.at("shape").get<std::vector<std::int64_t>>(), t.at("values").get<std::vector<double>>()});
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("tensor manifest: malformed entry '" + name + "': " + e.what());
    }
  }
  return m;
}

TensorManifest TensorManifest::parse_binary(const std::string& bytes) {
  Reader r(bytes);
  if (r.read_string(4) != std::string(kMagic, 4)) throw ParseError("tensor manifest: bad magic", 0, 0);
  const auto count = r.read<std::uint32_t>();
  TensorManifest m;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = r.read_string(r.read<std::uint32_t>());
    TensorEntry e;
    const auto rank = r.read<std::uint32_t>();
    for (std::uint32_t k = 0; k < rank; ++k) e.shape.push_back(std::int64_t(r.read<std::uint64_t>()));
    const std::size_t n = element_count(e.shape);
    e.values.reserve(n);
    for (std::size_t k = 0; k < n; ++k) e.values.push_back(r.read<double>());
    m.insert(name, std::move(e));
  }
  if (!r.done()) throw ParseError("tensor manifest: trailing bytes after last tensor", 0, 0);
  return m;
}

TensorManifest TensorManifest::load(const std::filesystem::path& path) {
  const std::string bytes = detail::slurp(path);
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0) return parse_binary(bytes);
  return parse_json(bytes);
}

std::string TensorManifest::to_json() const {
  nlohmann::json tensors = nlohmann::json::object();
  for (const auto& [name, e] : entries_) tensors[name] = {{"shape", e.shape}, {"values", e.values}};
  return nlohmann::json{{"tensors", tensors}}.dump() + "\n";
}

std::string TensorManifest::to_binary() const {
  std::string out(kMagic, 4);
  append<std::uint32_t>(out, std::uint32_t(entries_.size()));
  for (const auto& [name, e] : entries_) {
    append<std::uint32_t>(out, std::uint32_t(name.size()));
    out += name;
    append<std::uint32_t>(out, std::uint32_t(e.shape.size()));
    for (const auto d : e.shape) append<std::uint64_t>(out, std::uint64_t(d));
    for (const double v : e.values) append<double>(out, v);
  }
  return out;
}

}  // namespace leafkit
