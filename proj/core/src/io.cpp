#include "pdthreat/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pdthreat/error.hpp"

namespace pdthreat {

namespace {

using json = nlohmann::json;

constexpr int kFormatVersion = 1;

class ByteWriter {
 public:
  void raw(std::string_view s) { out_.append(s); }

  template <class T>
  void le(T value) {
    static_assert(std::is_integral_v<T>);
    using U = std::make_unsigned_t<T>;
    U u = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<char>(u & 0xff));
      u = static_cast<U>(u >> 8);
    }
  }

  void f32(float v) { le(std::bit_cast<std::uint32_t>(v)); }

  void header(std::string_view magic, const json& h) {
    raw(magic);
    const std::string text = h.dump();
    le(static_cast<std::uint32_t>(text.size()));
    raw(text);
  }

  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }

  void need(std::size_t count, const char* what) const {
    if (remaining() < count) {
      throw Error(ErrorCode::kHeaderMismatch, std::string("truncated payload reading ") + what);
    }
  }

  template <class T>
  T le() {
    need(sizeof(T), "integer");
    using U = std::make_unsigned_t<T>;
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      u = static_cast<U>(u | (static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i)));
    }
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }

  float f32() { return std::bit_cast<float>(le<std::uint32_t>()); }

  std::uint8_t u8() {
    need(1, "byte");
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }

  json header(std::string_view magic) {
    if (bytes_.size() < 4 || bytes_.substr(0, 4) != magic) {
      throw Error(ErrorCode::kBadMagic, "expected magic " + std::string(magic));
    }
    pos_ = 4;
    const auto len = le<std::uint32_t>();
    need(len, "header");
    json h;
    try {
      h = json::parse(bytes_.substr(pos_, len));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kHeaderMismatch, std::string("bad JSON header: ") + e.what());
    }
    pos_ += len;
    if (h.value("version", 0) != kFormatVersion) {
      throw Error(ErrorCode::kHeaderMismatch, "unsupported format version");
    }
    return h;
  }

  void expect_end() const {
    if (remaining() != 0) {
      throw Error(ErrorCode::kHeaderMismatch,
                  std::to_string(remaining()) + " trailing bytes after payload");
    }
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

template <class T>
T header_field(const json& h, const char* key) {
  try {
    return h.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kHeaderMismatch, std::string("header field '") + key +
                                                "' missing or mistyped");
  }
}

// Exact payload length check before reading, so a short file reports
// HeaderMismatch rather than a partial read.
void expect_payload(const ByteReader& r, std::size_t bytes) {
  if (r.remaining() != bytes) {
    throw Error(ErrorCode::kHeaderMismatch,
                "payload is " + std::to_string(r.remaining()) + " bytes, header declares " +
                    std::to_string(bytes));
  }
}

std::string encode_masks(const MaskSet& m) {
  ByteWriter w;
  w.header("PDM1", json{{"version", kFormatVersion}, {"n_masks", m.n_masks}, {"d", m.dim}});
  for (const auto b : m.bits) w.le(b);
  return w.take();
}

std::string encode_weights(const WeightMatrix& wm) {
  ByteWriter w;
  w.header("PDW1", json{{"version", kFormatVersion}, {"C", wm.num_classes}});
  for (const auto v : wm.values) w.f32(v);
  return w.take();
}

WeightMatrix decode_weights(const std::string& bytes) {
  ByteReader r(bytes);
  const json h = r.header("PDW1");
  WeightMatrix wm;
  wm.num_classes = header_field<std::size_t>(h, "C");
  expect_payload(r, wm.num_classes * wm.num_classes * 4);
  wm.values.resize(wm.num_classes * wm.num_classes);
  for (auto& v : wm.values) v = r.f32();
  return wm;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write to '" + path + "' failed");
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char ch : bytes) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string encode_dataset(const LabeledDataset& ds) {
  ds.validate();
  ByteWriter w;
  w.header("PDT1", json{{"version", kFormatVersion},
                        {"n", ds.n},
                        {"d", ds.dim},
                        {"num_classes", ds.num_classes},
                        {"dtype", "f32"},
                        {"image_domain", ds.image_domain}});
  for (const float v : ds.data) w.f32(v);
  for (const auto l : ds.labels) w.le(l);
  return w.take();
}

LabeledDataset decode_dataset(const std::string& bytes) {
  ByteReader r(bytes);
  const json h = r.header("PDT1");
  LabeledDataset ds;
  ds.n = header_field<std::size_t>(h, "n");
  ds.dim = header_field<std::size_t>(h, "d");
  ds.num_classes = header_field<std::size_t>(h, "num_classes");
  ds.image_domain = h.value("image_domain", false);
  if (h.value("dtype", std::string("f32")) != "f32") {
    throw Error(ErrorCode::kHeaderMismatch, "only dtype f32 is supported");
  }
  expect_payload(r, ds.n * ds.dim * 4 + ds.n * 4);
  ds.data.resize(ds.n * ds.dim);
  for (auto& v : ds.data) v = r.f32();
  ds.labels.resize(ds.n);
  for (auto& l : ds.labels) l = r.le<std::uint32_t>();
  ds.validate();
  return ds;
}

void save_dataset(const LabeledDataset& ds, const std::string& path) {
  write_file(path, encode_dataset(ds));
}

LabeledDataset load_dataset(const std::string& path) { return decode_dataset(read_file(path)); }

std::uint64_t dataset_hash(const LabeledDataset& ds) { return fnv1a64(encode_dataset(ds)); }

std::uint64_t file_hash(const std::string& path) { return fnv1a64(read_file(path)); }

void save_masks(const MaskSet& masks, const std::string& path) {
  masks.validate();
  write_file(path, encode_masks(masks));
}

MaskSet load_masks(const std::string& path) {
  const std::string bytes = read_file(path);
  ByteReader r(bytes);
  const json h = r.header("PDM1");
  MaskSet m;
  m.n_masks = header_field<std::size_t>(h, "n_masks");
  m.dim = header_field<std::size_t>(h, "d");
  expect_payload(r, m.n_masks * m.dim);
  m.bits.resize(m.n_masks * m.dim);
  for (auto& b : m.bits) b = r.u8();
  m.validate();
  return m;
}

void save_weights(const WeightMatrix& w, const std::string& path) {
  if (w.values.size() != w.num_classes * w.num_classes) {
    throw Error(ErrorCode::kInvariantViolation, "weight matrix is not C x C");
  }
  for (const auto v : w.values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvariantViolation, "non-finite weight");
  }
  write_file(path, encode_weights(w));
}

WeightMatrix load_weights(const std::string& path) {
  WeightMatrix wm = decode_weights(read_file(path));
  wm.validate();
  return wm;
}

WeightMatrix load_raw_weights(const std::string& path) {
  WeightMatrix wm = decode_weights(read_file(path));
  for (const auto v : wm.values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteValue, "raw distance not finite");
    if (v < 0.0f) throw Error(ErrorCode::kInvariantViolation, "raw distance negative");
  }
  return wm;
}

std::string encode_index(const RepresentativeIndex& index) {
  index.validate();
  json sizes = json::array();
  for (const auto& b : index.blocks) sizes.push_back(b.size());
  ByteWriter w;
  w.header("PDX1", json{{"version", kFormatVersion},
                        {"num_classes", index.num_classes},
                        {"k", index.k},
                        {"d", index.dim},
                        {"beta", index.beta},
                        {"seed", index.seed},
                        {"source_dataset_hash", index.source_dataset_hash},
                        {"class_sizes", sizes}});
  for (const auto& b : index.blocks) {
    for (const auto id : b.source_ids) w.le(id);
    for (const float v : b.vectors) w.f32(v);
  }
  return w.take();
}

RepresentativeIndex decode_index(const std::string& bytes) {
  ByteReader r(bytes);
  const json h = r.header("PDX1");
  RepresentativeIndex index;
  index.num_classes = header_field<std::size_t>(h, "num_classes");
  index.k = header_field<std::size_t>(h, "k");
  index.dim = header_field<std::size_t>(h, "d");
  index.beta = header_field<double>(h, "beta");
  index.seed = header_field<std::uint64_t>(h, "seed");
  index.source_dataset_hash = header_field<std::uint64_t>(h, "source_dataset_hash");
  std::vector<std::size_t> sizes;
  if (h.contains("class_sizes")) {
    sizes = header_field<std::vector<std::size_t>>(h, "class_sizes");
  } else {
    sizes.assign(index.num_classes, index.k);
  }
  if (sizes.size() != index.num_classes) {
    throw Error(ErrorCode::kHeaderMismatch, "class_sizes length differs from num_classes");
  }
  std::size_t payload = 0;
  for (const auto s : sizes) payload += s * 8 + s * index.dim * 4;
  expect_payload(r, payload);
  index.blocks.resize(index.num_classes);
  for (std::size_t c = 0; c < index.num_classes; ++c) {
    auto& b = index.blocks[c];
    b.source_ids.resize(sizes[c]);
    for (auto& id : b.source_ids) id = r.le<std::uint64_t>();
    b.vectors.resize(sizes[c] * index.dim);
    for (auto& v : b.vectors) v = r.f32();
  }
  r.expect_end();
  index.validate();
  return index;
}

void save_index(const RepresentativeIndex& index, const std::string& path) {
  write_file(path, encode_index(index));
}

RepresentativeIndex load_index(const std::string& path) { return decode_index(read_file(path)); }

std::string hierarchy_to_text(const HierarchyTree& tree) {
  tree.validate();
  std::string out;
  for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
    out += tree.nodes[v] + '\t' + tree.nodes[tree.parent[v]] + '\n';
  }
  out += "#leafmap\n";
  for (std::size_t c = 0; c < tree.leaf_map.size(); ++c) {
    out += std::to_string(c) + '\t' + tree.nodes[tree.leaf_map[c]] + '\n';
  }
  return out;
}

HierarchyTree hierarchy_from_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::pair<std::size_t, std::string>> leaves;
  std::istringstream in(text);
  std::string line;
  bool in_leafmap = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line == "#leafmap") {
      in_leafmap = true;
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw Error(ErrorCode::kMalformedTree,
                  "line " + std::to_string(lineno) + ": expected two tab-separated fields");
    }
    std::string a = line.substr(0, tab);
    std::string b = line.substr(tab + 1);
    if (in_leafmap) {
      std::size_t cls = 0;
      try {
        std::size_t used = 0;
        cls = std::stoul(a, &used);
        if (used != a.size()) throw std::invalid_argument(a);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kMalformedTree,
                    "line " + std::to_string(lineno) + ": bad class id '" + a + "'");
      }
      leaves.emplace_back(cls, std::move(b));
    } else {
      edges.emplace_back(std::move(a), std::move(b));
    }
  }
  return HierarchyTree::from_edges(edges, leaves);
}

void save_hierarchy(const HierarchyTree& tree, const std::string& path) {
  write_file(path, hierarchy_to_text(tree));
}

HierarchyTree load_hierarchy(const std::string& path) {
  return hierarchy_from_text(read_file(path));
}

}  // namespace pdthreat
