#include "pat/container.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pat {

namespace {

constexpr std::array<char, 8> kMagic{'P', 'A', 'T', 'D', 'S', 'E', 'T', '\0'};
constexpr std::uint8_t kFloat64 = 1;
// Refuse absurd sizes from corrupt headers before allocating.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 34;

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
}

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  template <class T>
  void put(T v) {
    v = to_little(v);
    os_.write(reinterpret_cast<const char*>(&v), sizeof v);
    pos_ += sizeof v;
  }
  void put_string(const std::string& s) {
    put(static_cast<std::uint32_t>(s.size()));
    os_.write(s.data(), static_cast<std::streamsize>(s.size()));
    pos_ += s.size();
  }
  void put_raw(const char* p, std::size_t n) {
    os_.write(p, static_cast<std::streamsize>(n));
    pos_ += n;
  }
  std::uint64_t pos() const { return pos_; }

 private:
  std::ostream& os_;
  std::uint64_t pos_ = 0;
};

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}
  template <class T>
  T get() {
    T v{};
    read(reinterpret_cast<char*>(&v), sizeof v);
    return to_little(v);
  }
  std::string get_string() {
    const auto n = get<std::uint32_t>();
    if (n > (1u << 24)) throw std::runtime_error("dataset: string length out of range");
    std::string s(n, '\0');
    read(s.data(), n);
    return s;
  }
  void read(char* p, std::size_t n) {
    is_.read(p, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n) throw std::runtime_error("dataset: truncated file");
    pos_ += n;
  }
  std::uint64_t pos() const { return pos_; }

 private:
  std::istream& is_;
  std::uint64_t pos_ = 0;
};

std::uint64_t element_count(const std::vector<std::uint64_t>& shape) {
  std::uint64_t n = 1;
  for (auto s : shape) {
    if (s != 0 && n > kMaxElements / s) throw std::runtime_error("dataset: array too large");
    n *= s;
  }
  return n;
}

}  // namespace

const NamedArray* Dataset::find(const std::string& name) const {
  for (const auto& a : arrays)
    if (a.name == name) return &a;
  return nullptr;
}

void Dataset::put(const std::string& name, const std::string& unit, const Field& f) {
  NamedArray a{name, unit, {f.n0(), f.n1()}, {f.values().begin(), f.values().end()}};
  for (auto& existing : arrays) {
    if (existing.name == name) {
      existing = std::move(a);
      return;
    }
  }
  arrays.push_back(std::move(a));
}

Field Dataset::field(const std::string& name) const {
  const NamedArray* a = find(name);
  if (a == nullptr) throw std::runtime_error("dataset: no array named '" + name + "'");
  if (a->shape.size() != 2) throw std::runtime_error("dataset: array '" + name + "' is not 2-D");
  Field f(a->shape[0], a->shape[1]);
  std::copy(a->data.begin(), a->data.end(), f.data());
  return f;
}

const std::string& Dataset::meta(const std::string& key) const {
  const auto it = metadata.find(key);
  if (it == metadata.end()) throw std::runtime_error("dataset: missing metadata '" + key + "'");
  return it->second;
}

void write_dataset(std::ostream& os, const Dataset& ds) {
  for (const auto& a : ds.arrays)
    if (element_count(a.shape) != a.data.size())
      throw std::invalid_argument("dataset: array '" + a.name + "' shape does not match its data");

  // Header size is needed to compute payload offsets: serialise it twice.
  auto header = [&](Writer& w, std::uint64_t payload_start) {
    w.put_raw(kMagic.data(), kMagic.size());
    w.put(kContainerVersion);
    w.put(static_cast<std::uint32_t>(ds.metadata.size()));
    w.put(static_cast<std::uint32_t>(ds.arrays.size()));
    for (const auto& [k, v] : ds.metadata) {
      w.put_string(k);
      w.put_string(v);
    }
    std::uint64_t offset = payload_start;
    for (const auto& a : ds.arrays) {
      w.put_string(a.name);
      w.put_string(a.unit);
      w.put(kFloat64);
      w.put(static_cast<std::uint32_t>(a.shape.size()));
      for (auto s : a.shape) w.put(s);
      w.put(offset);
      offset += a.data.size() * sizeof(double);
    }
  };
  std::ostringstream sizing;
  Writer probe(sizing);
  header(probe, 0);

  Writer w(os);
  header(w, probe.pos());
  for (const auto& a : ds.arrays) {
    if constexpr (std::endian::native == std::endian::little) {
      w.put_raw(reinterpret_cast<const char*>(a.data.data()), a.data.size() * sizeof(double));
    } else {
      for (double v : a.data) w.put(v);
    }
  }
  if (!os) throw std::runtime_error("dataset: write failed");
}

Dataset read_dataset(std::istream& is) {
  Reader r(is);
  std::array<char, 8> magic{};
  r.read(magic.data(), magic.size());
  if (magic != kMagic) throw std::runtime_error("dataset: bad magic (not a PAT dataset)");
  const auto version = r.get<std::uint32_t>();
  if (version != kContainerVersion)
    throw std::runtime_error("dataset: unsupported version " + std::to_string(version));
  const auto n_meta = r.get<std::uint32_t>();
  const auto n_arrays = r.get<std::uint32_t>();

  Dataset ds;
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = r.get_string();
    ds.metadata[k] = r.get_string();
  }
  std::vector<std::uint64_t> offsets;
  for (std::uint32_t i = 0; i < n_arrays; ++i) {
    NamedArray a;
    a.name = r.get_string();
    a.unit = r.get_string();
    if (r.get<std::uint8_t>() != kFloat64)
      throw std::runtime_error("dataset: array '" + a.name + "' has an unsupported dtype");
    const auto ndim = r.get<std::uint32_t>();
    if (ndim > 8) throw std::runtime_error("dataset: too many dimensions");
    for (std::uint32_t d = 0; d < ndim; ++d) a.shape.push_back(r.get<std::uint64_t>());
    offsets.push_back(r.get<std::uint64_t>());
    ds.arrays.push_back(std::move(a));
  }
  for (std::size_t i = 0; i < ds.arrays.size(); ++i) {
    auto& a = ds.arrays[i];
    if (offsets[i] != r.pos()) throw std::runtime_error("dataset: payload offset mismatch");
    a.data.resize(element_count(a.shape));
    r.read(reinterpret_cast<char*>(a.data.data()), a.data.size() * sizeof(double));
    if constexpr (std::endian::native != std::endian::little)
      for (double& v : a.data) v = to_little(v);
  }
  return ds;
}

void save_dataset(const std::filesystem::path& path, const Dataset& ds) {
  std::random_device rd;
  auto tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  try {
    {
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      if (!os) throw std::runtime_error("dataset: cannot open " + tmp.string() + " for writing");
      write_dataset(os, ds);
      os.close();
      if (!os) throw std::runtime_error("dataset: failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("dataset: cannot open " + path.string());
  try {
    return read_dataset(is);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace pat
