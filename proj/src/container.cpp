#include "subfid/container.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "json.hpp"
#include "subfid/errors.hpp"

namespace subfid {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kManifest = "manifest.json";

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out |= ((v >> (8 * i)) & 0xff) << (8 * (7 - i));
    return out;
  }
  return v;
}

void write_values(const fs::path& file, const Tensor& t) {
  std::string bytes(t.size() * 16, '\0');
  std::size_t pos = 0;
  for (const cplx& z : t.data()) {
    for (double part : {z.real(), z.imag()}) {
      const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(part));
      std::memcpy(bytes.data() + pos, &bits, 8);
      pos += 8;
    }
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ArgumentError("save_network: cannot write " + file.string());
}

Tensor read_values(const fs::path& file, Shape shape) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw LoadError("load_network: missing tensor file " + file.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), {});
  std::size_t count = 1;
  for (std::size_t e : shape) count *= e;
  if (bytes.size() != count * 16) {
    throw LoadError("load_network: " + file.filename().string() + " holds " +
                    std::to_string(bytes.size()) + " bytes, shape needs " +
                    std::to_string(count * 16));
  }
  std::vector<cplx> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t re = 0, im = 0;
    std::memcpy(&re, bytes.data() + 16 * i, 8);
    std::memcpy(&im, bytes.data() + 16 * i + 8, 8);
    data[i] = cplx(std::bit_cast<double>(to_little(re)), std::bit_cast<double>(to_little(im)));
  }
  return Tensor(std::move(shape), std::move(data));
}

class Writer {
 public:
  explicit Writer(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw ArgumentError("save_network: cannot create " + dir_.string());
  }

  void add(const std::string& name, const Tensor& t, const std::string& axes) {
    const std::string file = name + ".bin";
    write_values(dir_ / file, t);
    table_[name] = {{"file", file}, {"shape", t.shape()}, {"axes", axes}};
  }

  void finish(json manifest) {
    manifest["format_version"] = kContainerVersion;
    manifest["dtype"] = "c128";
    manifest["tensors"] = std::move(table_);
    std::ofstream out(dir_ / kManifest, std::ios::trunc);
    out << manifest.dump(2) << '\n';
    if (!out) throw ArgumentError("save_network: cannot write manifest");
  }

 private:
  fs::path dir_;
  json table_ = json::object();
};

json read_manifest(const fs::path& dir) {
  std::ifstream in(dir / kManifest);
  if (!in) throw LoadError("load_network: no manifest in " + dir.string());
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw LoadError(std::string("load_network: corrupt manifest: ") + e.what());
  }
  if (!m.is_object() || !m.contains("format_version") || !m.contains("kind") ||
      !m.contains("tensors")) {
    throw LoadError("load_network: manifest lacks required fields");
  }
  if (m["format_version"] != kContainerVersion) {
    throw LoadError("load_network: unsupported format_version " +
                    m["format_version"].dump());
  }
  if (m.value("dtype", "") != "c128") throw LoadError("load_network: dtype must be c128");
  return m;
}

Tensor load_tensor(const fs::path& dir, const json& m, const std::string& name,
                   std::size_t rank, const std::string& axes) {
  const json& table = m["tensors"];
  if (!table.contains(name)) throw LoadError("load_network: tensor " + name + " missing");
  const json& entry = table[name];
  if (entry.value("axes", "") != axes) {
    throw LoadError("load_network: tensor " + name + " has axis order '" +
                    entry.value("axes", "") + "', expected '" + axes + "'");
  }
  const Shape shape = entry.at("shape").get<Shape>();
  if (shape.size() != rank) throw LoadError("load_network: tensor " + name + " has wrong rank");
  return read_values(dir / entry.at("file").get<std::string>(), shape);
}

template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const LoadError&) {
    throw;
  } catch (const json::exception& e) {
    throw LoadError(std::string("load_network: malformed manifest: ") + e.what());
  } catch (const ArgumentError& e) {
    throw LoadError(std::string("load_network: inconsistent network: ") + e.what());
  }
}

MatrixProductState read_mps(const fs::path& dir, const json& m) {
  return guarded([&] {
    const auto len = m.at("length").get<std::size_t>();
    const auto d = m.at("phys_dim").get<std::size_t>();
    const auto dims = m.at("bond_dims").get<std::vector<std::size_t>>();
    if (len < 1 || dims.size() != len + 1) throw LoadError("load_network: bad bond_dims");
    std::vector<Tensor> gammas;
    std::vector<std::vector<double>> schmidt;
    for (std::size_t b = 0; b <= len; ++b) {
      const Tensor s = load_tensor(dir, m, "S_" + std::to_string(b), 1, "bond");
      std::vector<double> values;
      for (const cplx& z : s.data()) {
        if (z.imag() != 0.0) throw LoadError("load_network: complex Schmidt value");
        values.push_back(z.real());
      }
      if (values.size() != dims[b]) throw LoadError("load_network: bond_dims mismatch");
      schmidt.push_back(std::move(values));
    }
    for (std::size_t n = 0; n < len; ++n) {
      Tensor g = load_tensor(dir, m, "gamma_" + std::to_string(n), 3, "left,phys,right");
      if (g.extent(1) != d || g.extent(0) != dims[n] || g.extent(2) != dims[n + 1]) {
        throw LoadError("load_network: gamma_" + std::to_string(n) + " shape mismatch");
      }
      gammas.push_back(std::move(g));
    }
    return MatrixProductState(std::move(gammas), std::move(schmidt),
                              m.value("canonical", false));
  });
}

TreeTensorNetwork read_ttn(const fs::path& dir, const json& m) {
  return guarded([&] {
    const auto depth = m.at("depth").get<std::size_t>();
    const auto d = m.at("phys_dim").get<std::size_t>();
    const auto dims = m.at("bond_dims").get<std::vector<std::size_t>>();
    if (depth < 1 || depth > 30 || dims.size() != depth) {
      throw LoadError("load_network: bad depth or bond_dims");
    }
    std::vector<std::vector<Tensor>> layers;
    for (std::size_t t = 1; t < depth; ++t) {
      std::vector<Tensor> layer;
      for (std::size_t p = 0; p < (std::size_t{1} << (depth - t)); ++p) {
        layer.push_back(load_tensor(dir, m, "w_" + std::to_string(t) + "_" + std::to_string(p),
                                    3, "top,left_child,right_child"));
      }
      layers.push_back(std::move(layer));
    }
    Tensor top = load_tensor(dir, m, "top", 2, "left,right");
    TreeTensorNetwork out(d, std::move(layers), std::move(top));
    for (std::size_t t = 0; t < depth; ++t) {
      if (out.bond_dim(t) != dims[t]) throw LoadError("load_network: bond_dims mismatch");
    }
    return out;
  });
}

}  // namespace

void save_network(const fs::path& dir, const MatrixProductState& state) {
  Writer w(dir);
  for (std::size_t b = 0; b <= state.length(); ++b) {
    const auto& s = state.schmidt(b);
    w.add("S_" + std::to_string(b),
          Tensor({s.size()}, std::vector<cplx>(s.begin(), s.end())), "bond");
  }
  for (std::size_t n = 0; n < state.length(); ++n) {
    w.add("gamma_" + std::to_string(n), state.gamma(n), "left,phys,right");
  }
  w.finish({{"kind", "mps"},
            {"length", state.length()},
            {"phys_dim", state.phys_dim()},
            {"bond_dims", state.bond_dims()},
            {"canonical", state.is_canonical()}});
}

void save_network(const fs::path& dir, const TreeTensorNetwork& state) {
  Writer w(dir);
  std::vector<std::size_t> dims;
  for (std::size_t t = 0; t < state.depth(); ++t) dims.push_back(state.bond_dim(t));
  for (std::size_t t = 1; t < state.depth(); ++t) {
    const auto& layer = state.layer(t);
    for (std::size_t p = 0; p < layer.size(); ++p) {
      w.add("w_" + std::to_string(t) + "_" + std::to_string(p), layer[p],
            "top,left_child,right_child");
    }
  }
  w.add("top", state.top(), "left,right");
  w.finish({{"kind", "ttn"},
            {"depth", state.depth()},
            {"phys_dim", state.phys_dim()},
            {"bond_dims", dims}});
}

void save_network(const fs::path& dir, const Network& state) {
  std::visit([&](const auto& s) { save_network(dir, s); }, state);
}

Network load_network(const fs::path& dir) {
  const json m = read_manifest(dir);
  const std::string kind = m["kind"].is_string() ? m["kind"].get<std::string>() : "";
  if (kind == "mps") return read_mps(dir, m);
  if (kind == "ttn") return read_ttn(dir, m);
  throw LoadError("load_network: unknown kind " + m["kind"].dump());
}

MatrixProductState load_mps(const fs::path& dir) {
  Network n = load_network(dir);
  if (auto* s = std::get_if<MatrixProductState>(&n)) return std::move(*s);
  throw LoadError("load_network: " + dir.string() + " holds a TTN, expected an MPS");
}

TreeTensorNetwork load_ttn(const fs::path& dir) {
  Network n = load_network(dir);
  if (auto* s = std::get_if<TreeTensorNetwork>(&n)) return std::move(*s);
  throw LoadError("load_network: " + dir.string() + " holds an MPS, expected a TTN");
}

}  // namespace subfid
