#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "topocomp/errors.hpp"
#include "topocomp/persistence.hpp"
#include "topocomp/scalar_field.hpp"

namespace topocomp {

enum class RawDType { F32, F64 };

inline const char* to_string(RawDType t) {
  return t == RawDType::F32 ? "f32" : "f64";
}

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

struct RawGridInfo {
  Dims3 dims{1, 1, 1};
  RawDType dtype = RawDType::F64;
};

inline std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading " + path);
  return bytes;
}

inline void write_file(const std::string& path,
                       const std::uint8_t* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(data), std::streamsize(size));
  if (!out) throw IoError("failed writing " + path);
}

/// Parses a text sidecar of key=value lines: dims=NX,NY[,NZ], dtype=f32|f64,
/// order=row-major.
inline RawGridInfo parse_sidecar(const std::string& text) {
  RawGridInfo info;
  bool have_dims = false;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError("malformed sidecar line: " + line);
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "dims") {
      Dims3 d{1, 1, 1};
      std::istringstream vs(value);
      std::string part;
      int n = 0;
      while (std::getline(vs, part, ',')) {
        if (n >= 3) throw IoError("too many grid dimensions: " + value);
        d[n++] = std::uint32_t(std::stoul(part));
      }
      if (n < 2) throw IoError("dims needs at least NX,NY");
      info.dims = d;
      have_dims = true;
    } else if (key == "dtype") {
      if (value == "f32") info.dtype = RawDType::F32;
      else if (value == "f64") info.dtype = RawDType::F64;
      else throw IoError("unsupported dtype: " + value);
    } else if (key == "order") {
      if (value != "row-major")
        throw IoError("unsupported layout order: " + value);
    } else {
      throw IoError("unknown sidecar key: " + key);
    }
  }
  if (!have_dims) throw IoError("sidecar is missing dims");
  return info;
}

inline RawGridInfo read_sidecar(const std::string& raw_path) {
  const std::string hdr = raw_path + ".hdr";
  std::ifstream in(hdr);
  if (!in) throw IoError("cannot open sidecar " + hdr);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_sidecar(ss.str());
}

/// Little-endian raw stream to field; f32 inputs are widened to f64.
inline ScalarField read_raw_grid(const std::string& path,
                                 const RawGridInfo& info) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  const std::uint64_t n = std::uint64_t(info.dims[0]) * info.dims[1] *
                          std::uint64_t(info.dims[2]);
  const std::size_t scalar = info.dtype == RawDType::F32 ? 4 : 8;
  if (bytes.size() != n * scalar)
    throw IoError(path + ": expected " + std::to_string(n * scalar) +
                  " bytes for the given dims/dtype, found " +
                  std::to_string(bytes.size()));
  std::vector<double> values(n);
  if (info.dtype == RawDType::F32) {
    for (std::uint64_t i = 0; i < n; ++i) {
      float x;
      std::memcpy(&x, bytes.data() + i * 4, 4);
      values[i] = double(x);
    }
  } else {
    std::memcpy(values.data(), bytes.data(), n * 8);
  }
  return build_field(info.dims, std::move(values));
}

/// Writes the raw stream plus its text sidecar next to it.
inline void write_raw_grid(const std::string& path, const ScalarField& f,
                           RawDType dtype) {
  std::vector<std::uint8_t> bytes;
  if (dtype == RawDType::F32) {
    bytes.resize(f.vertex_count() * 4);
    for (std::size_t i = 0; i < f.vertex_count(); ++i) {
      const float x = float(f.values[i]);
      std::memcpy(bytes.data() + i * 4, &x, 4);
    }
  } else {
    bytes.resize(f.vertex_count() * 8);
    std::memcpy(bytes.data(), f.values.data(), bytes.size());
  }
  write_file(path, bytes.data(), bytes.size());

  std::ostringstream hdr;
  hdr << "dims=" << f.dims[0] << "," << f.dims[1] << "," << f.dims[2] << "\n"
      << "dtype=" << to_string(dtype) << "\n"
      << "order=row-major\n";
  const std::string text = hdr.str();
  write_file(path + ".hdr",
             reinterpret_cast<const std::uint8_t*>(text.data()), text.size());
}

/// Diagram CSV: one row per pair.
inline std::string diagram_to_csv(const PersistenceDiagram& d) {
  std::ostringstream out;
  out.precision(17);
  out << "birth_vertex,death_vertex,birth_value,death_value,persistence,class\n";
  for (const auto& p : d.pairs) {
    out << p.birth_vertex << ',' << p.death_vertex << ',' << p.birth_value
        << ',' << p.death_value << ',' << p.persistence() << ','
        << to_string(p.pair_class) << '\n';
  }
  return out.str();
}

}  // namespace topocomp
