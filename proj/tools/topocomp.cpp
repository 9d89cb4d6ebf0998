// Command line front end: compress/decompress raw regular-grid scalar
// fields with topological guarantees, export persistence diagrams, and
// report quality metrics.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "topocomp/codec.hpp"
#include "topocomp/metrics.hpp"
#include "topocomp/pipeline.hpp"
#include "topocomp/raw_io.hpp"

namespace {

using json = nlohmann::json;
using namespace topocomp;

Dims3 parse_dims(const std::string& text) {
  Dims3 d{1, 1, 1};
  int n = 0;
  std::size_t pos = 0;
  while (pos <= text.size() && n < 4) {
    const std::size_t comma = text.find(',', pos);
    const std::string part = text.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (part.empty()) throw IoError("malformed dims: " + text);
    if (n >= 3) throw IoError("too many grid dimensions: " + text);
    d[n++] = std::uint32_t(std::stoul(part));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (n < 2) throw IoError("dims needs at least NX,NY");
  return d;
}

RawDType parse_dtype(const std::string& text) {
  if (text == "f32") return RawDType::F32;
  if (text == "f64") return RawDType::F64;
  throw IoError("unsupported dtype: " + text);
}

RawGridInfo grid_info(const std::string& path, const std::string& dims_flag,
                      const std::string& dtype_flag) {
  if (dims_flag.empty()) {
    RawGridInfo info = read_sidecar(path);
    if (!dtype_flag.empty()) info.dtype = parse_dtype(dtype_flag);
    return info;
  }
  RawGridInfo info;
  info.dims = parse_dims(dims_flag);
  info.dtype = dtype_flag.empty() ? RawDType::F64 : parse_dtype(dtype_flag);
  return info;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

ScalarField load_field(const std::string& path, const std::string& dims_flag,
                       const std::string& dtype_flag) {
  if (has_suffix(path, ".topc")) {
    const auto bytes = read_file(path);
    return decompress(bytes);
  }
  return read_raw_grid(path, grid_info(path, dims_flag, dtype_flag));
}

json metric_or_null(double v) {
  if (std::isinf(v) || std::isnan(v)) return nullptr;
  return v;
}

int run(int argc, char** argv) {
  CLI::App app{"Topology-preserving lossy compressor for regular-grid scalar fields"};
  app.require_subcommand(1);

  // compress
  std::string c_in, c_out, c_dims, c_dtype, c_eps, c_external;
  double c_eps_abs = -1.0;
  bool c_pointwise = false, c_skip = false;
  auto* c = app.add_subcommand("compress", "Compress a raw grid into a .topc archive");
  c->add_option("input", c_in, "input .raw file")->required();
  c->add_option("--dims", c_dims, "grid dims NX,NY[,NZ] (default: sidecar)");
  c->add_option("--dtype", c_dtype, "f32|f64 (default: sidecar or f64)");
  c->add_option("--epsilon", c_eps, "persistence threshold, percent of range (e.g. 5 or 5%)");
  c->add_option("--epsilon-abs", c_eps_abs, "persistence threshold, absolute");
  c->add_flag("--pointwise", c_pointwise, "bound pointwise error by 3*eps/2");
  c->add_option("--external", c_external, "attach an external lossy stream (uq8)");
  c->add_flag("--skip-simplification", c_skip, "quantize the raw input directly");
  c->add_option("-o,--output", c_out, "output .topc path")->required();

  // decompress
  std::string d_in, d_out, d_dtype;
  auto* d = app.add_subcommand("decompress", "Decompress a .topc archive to a raw grid");
  d->add_option("input", d_in, "input .topc file")->required();
  d->add_option("-o,--output", d_out, "output .raw path")->required();
  d->add_option("--dtype", d_dtype, "f32|f64 (default: dtype recorded in the archive)");

  // diagram
  std::string g_in, g_out, g_dims, g_dtype;
  auto* g = app.add_subcommand("diagram", "Export the persistence diagram as CSV");
  g->add_option("input", g_in, "input .raw or .topc file")->required();
  g->add_option("--dims", g_dims, "grid dims for raw input");
  g->add_option("--dtype", g_dtype, "f32|f64 for raw input");
  g->add_option("-o,--output", g_out, "output .csv path")->required();

  // compare
  std::string m_a, m_b, m_dims, m_dtype;
  bool m_diagrams = false;
  auto* m = app.add_subcommand("compare", "Quality metrics between two fields (JSON)");
  m->add_option("a", m_a, "reference .raw file")->required();
  m->add_option("b", m_b, "other .raw or .topc file")->required();
  m->add_option("--dims", m_dims, "grid dims for raw inputs");
  m->add_option("--dtype", m_dtype, "f32|f64 for raw inputs");
  m->add_flag("--diagrams", m_diagrams, "also write <a>.diagram.csv and <b>.diagram.csv");

  // stats
  std::string s_in;
  auto* s = app.add_subcommand("stats", "Print archive header and size statistics");
  s->add_option("input", s_in, "input .topc file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (*c) {
    const RawGridInfo info = grid_info(c_in, c_dims, c_dtype);
    const ScalarField f = read_raw_grid(c_in, info);
    CompressOptions opts;
    if (!c_eps.empty() && c_eps_abs >= 0.0)
      throw IoError("--epsilon and --epsilon-abs are mutually exclusive");
    if (!c_eps.empty()) {
      std::string t = c_eps;
      if (!t.empty() && t.back() == '%') t.pop_back();
      opts.epsilon = EpsilonSpec::percent(std::stod(t));
    } else if (c_eps_abs >= 0.0) {
      opts.epsilon = EpsilonSpec::absolute(c_eps_abs);
    } else {
      throw IoError("one of --epsilon or --epsilon-abs is required");
    }
    opts.pointwise = c_pointwise;
    opts.skip_simplification = c_skip;
    opts.source_f32 = info.dtype == RawDType::F32;
    if (!c_external.empty()) {
      if (!external_codec_by_name(c_external))
        throw IoError("unknown external codec: " + c_external);
      opts.external_uq8 = true;
    }
    const CompressResult r = compress(f, opts);
    write_file(c_out, r.archive.data(), r.archive.size());
    std::printf("eps_abs=%.17g\nn_c=%u\nn_i=%u\narchive_bytes=%llu\nrate=%.6g\n",
                r.stats.eps_abs, r.stats.n_c, r.stats.n_i,
                (unsigned long long)r.stats.archive_bytes,
                r.stats.compression_rate);
    return 0;
  }

  if (*d) {
    const auto bytes = read_file(d_in);
    const ArchiveHeader h = parse_header(bytes);
    const ScalarField out = decompress(bytes);
    RawDType dtype = (h.flags & kFlagSourceF32) ? RawDType::F32 : RawDType::F64;
    if (!d_dtype.empty()) dtype = parse_dtype(d_dtype);
    write_raw_grid(d_out, out, dtype);
    return 0;
  }

  if (*g) {
    const ScalarField f = load_field(g_in, g_dims, g_dtype);
    const std::string csv = diagram_to_csv(compute_diagram(f));
    write_file(g_out, reinterpret_cast<const std::uint8_t*>(csv.data()),
               csv.size());
    return 0;
  }

  if (*m) {
    const ScalarField a = load_field(m_a, m_dims, m_dtype);
    const ScalarField b = load_field(m_b, m_dims, m_dtype);
    const PersistenceDiagram da = compute_diagram(a);
    const PersistenceDiagram db = compute_diagram(b);
    json out;
    out["bottleneck"] = bottleneck(da, db);
    out["wasserstein"] = wasserstein(da, db);
    out["psnr"] = metric_or_null(psnr(a, b));
    out["max_norm"] = max_norm(a, b);
    out["l2_norm"] = p_norm(a, b, 2.0);
    if (has_suffix(m_b, ".topc")) {
      const auto raw_bytes = read_file(m_a).size();
      const auto archive_bytes = read_file(m_b).size();
      out["compression_rate"] = double(raw_bytes) / double(archive_bytes);
    } else {
      out["compression_rate"] = nullptr;
    }
    if (m_diagrams) {
      const std::string ca = diagram_to_csv(da), cb = diagram_to_csv(db);
      write_file(m_a + ".diagram.csv",
                 reinterpret_cast<const std::uint8_t*>(ca.data()), ca.size());
      write_file(m_b + ".diagram.csv",
                 reinterpret_cast<const std::uint8_t*>(cb.data()), cb.size());
    }
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  if (*s) {
    const auto bytes = read_file(s_in);
    const DecodeResult dr = decode(bytes);
    const ArchiveHeader& h = dr.header;
    const std::uint64_t n_v = std::uint64_t(h.dims[0]) * h.dims[1] * h.dims[2];
    const double scalar = (h.flags & kFlagSourceF32) ? 4.0 : 8.0;
    std::printf("version=%d\n", int(h.version));
    std::printf("flags=0x%02x\n", int(h.flags));
    std::printf("pointwise=%d\n", (h.flags & kFlagPointwise) ? 1 : 0);
    std::printf("external=%d\n", (h.flags & kFlagExternalStream) ? 1 : 0);
    std::printf("baseline=%d\n", (h.flags & kFlagBaseline) ? 1 : 0);
    std::printf("backend=%s\n", (h.flags & kFlagBackendId) ? "?" : "deflate");
    std::printf("source_dtype=%s\n", (h.flags & kFlagSourceF32) ? "f32" : "f64");
    std::printf("dims=%u,%u,%u\n", h.dims[0], h.dims[1], h.dims[2]);
    std::printf("eps_abs=%.17g\n", h.eps);
    std::printf("n_c=%u\nn_i=%u\n", h.n_c, h.n_i);
    std::printf("archive_bytes=%zu\n", bytes.size());
    std::printf("rate=%.6g\n", double(n_v) * scalar / double(bytes.size()));
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const topocomp::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const topocomp::ArchiveError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const topocomp::FieldError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const topocomp::MetricsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
