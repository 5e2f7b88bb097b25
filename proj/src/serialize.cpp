#include "rsmat/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rsmat/matrix_io.hpp"

namespace rsmat {

static_assert(std::endian::native == std::endian::little, "container I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'R', 'S', 'M', 'T'};

// Every field of a complete matrix, in container order. The visitor sees
// mat(name, node, DenseMatrix&), vec(name, node, std::vector<double>&) and
// idx(name, node, std::vector<Index>&).
template <class V>
void visit_fields(V& v, HodlrMatrix& h) {
  for (int t = 0; t < h.tree.node_count(); ++t) {
    auto& p = h.pairs[static_cast<std::size_t>(t)];
    if (h.tree.node(t).is_leaf()) {
      v.mat("d", t, h.diag[static_cast<std::size_t>(t)]);
      continue;
    }
    v.mat("u_ab", t, p.u_ab);
    v.vec("s_ab", t, p.s_ab);
    v.mat("v_ab", t, p.v_ab);
    v.mat("u_ba", t, p.u_ba);
    v.vec("s_ba", t, p.s_ba);
    v.mat("v_ba", t, p.v_ba);
  }
}

template <class V>
void visit_nested(V& v, const IndexTree& tree, std::vector<NestedNode>& nodes, int t) {
  NestedNode& n = nodes[static_cast<std::size_t>(t)];
  v.mat("u", t, n.u);
  v.mat("v", t, n.v);
  if (tree.node(t).is_leaf()) {
    v.mat("d", t, n.d);
  } else {
    v.mat("b_ab", t, n.b_ab);
    v.mat("b_ba", t, n.b_ba);
  }
}

template <class V>
void visit_fields(V& v, HbsMatrix& h) {
  for (int t = 0; t < h.tree.node_count(); ++t) {
    visit_nested(v, h.tree, h.nodes, t);
    v.vec("y", t, h.y[static_cast<std::size_t>(t)]);
    v.vec("z", t, h.z[static_cast<std::size_t>(t)]);
  }
}

template <class V>
void visit_fields(V& v, HbsIdMatrix& h) {
  for (int t = 0; t < h.tree.node_count(); ++t) {
    visit_nested(v, h.tree, h.nodes, t);
    v.idx("skel_in", t, h.skel_in[static_cast<std::size_t>(t)]);
    v.idx("skel_out", t, h.skel_out[static_cast<std::size_t>(t)]);
  }
}

void size_containers(HodlrMatrix& h) {
  h.pairs.resize(static_cast<std::size_t>(h.tree.node_count()));
  h.diag.resize(h.pairs.size());
}
void size_containers(HbsMatrix& h) {
  const auto n = static_cast<std::size_t>(h.tree.node_count());
  h.nodes.resize(n);
  h.y.resize(n);
  h.z.resize(n);
}
void size_containers(HbsIdMatrix& h) {
  const auto n = static_cast<std::size_t>(h.tree.node_count());
  h.nodes.resize(n);
  h.skel_in.resize(n);
  h.skel_out.resize(n);
}

int built_levels(const HodlrMatrix& h) { return h.built_levels; }
int built_levels(const HbsMatrix& h) { return h.built_levels; }
int built_levels(const HbsIdMatrix& h) { return h.tree.depth(); }
bool has_diagonal(const HodlrMatrix& h) { return h.has_diagonal; }
bool has_diagonal(const HbsMatrix& h) { return h.has_diagonal; }
bool has_diagonal(const HbsIdMatrix&) { return true; }

void require_complete(const CompressedMatrix& m) {
  std::visit(
      [](const auto& h) {
        if (built_levels(h) != h.tree.depth() || !has_diagonal(h))
          throw std::invalid_argument("serialize: only fully built matrices can be written");
      },
      m);
}

struct Header {
  FormatTag tag = FormatTag::hodlr;
  std::uint64_t n = 0;
  std::uint64_t leaf_size = 0;
  std::uint32_t levels = 0;
  std::uint32_t flags = 0;
  std::uint64_t node_count = 0;
};

Header header_of(const CompressedMatrix& m) {
  Header hd;
  hd.tag = format_of(m);
  std::visit(
      [&](const auto& h) {
        hd.n = static_cast<std::uint64_t>(h.tree.size());
        hd.leaf_size = static_cast<std::uint64_t>(h.tree.leaf_size());
        hd.levels = static_cast<std::uint32_t>(built_levels(h));
        hd.flags = has_diagonal(h) ? 1u : 0u;
        hd.node_count = static_cast<std::uint64_t>(h.tree.node_count());
      },
      m);
  return hd;
}

// Empty matrix of the requested format over the tree described by the header.
CompressedMatrix skeleton_from(const Header& hd) {
  if (hd.n == 0 || hd.leaf_size == 0 || hd.n > (1ULL << 40) || hd.leaf_size > (1ULL << 40))
    throw FormatError("container: implausible tree parameters");
  IndexTree tree(static_cast<Index>(hd.n), static_cast<Index>(hd.leaf_size));
  if (hd.node_count != static_cast<std::uint64_t>(tree.node_count()))
    throw FormatError("container: node count does not match the tree");
  if (hd.levels != static_cast<std::uint32_t>(tree.depth()) || hd.flags != 1u)
    throw FormatError("container: matrix is not fully built");
  auto fill = [&](auto h) -> CompressedMatrix {
    h.tree = tree;
    size_containers(h);
    if constexpr (!std::is_same_v<decltype(h), HbsIdMatrix>) {
      h.built_levels = tree.depth();
      h.has_diagonal = true;
    }
    return h;
  };
  switch (hd.tag) {
    case FormatTag::hodlr: return fill(HodlrMatrix{});
    case FormatTag::hbs: return fill(HbsMatrix{});
    case FormatTag::hbsid: return fill(HbsIdMatrix{});
  }
  throw FormatError("container: unknown format tag");
}

// ---- binary

class ByteWriter {
 public:
  template <class T>
  void put(T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void raw(const void* p, std::size_t bytes) { out_.append(static_cast<const char*>(p), bytes); }

  void mat(const char*, int, DenseMatrix& m) {
    put<std::uint64_t>(static_cast<std::uint64_t>(m.rows()));
    put<std::uint64_t>(static_cast<std::uint64_t>(m.cols()));
    raw(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
  }
  void vec(const char*, int, std::vector<double>& v) {
    put<std::uint64_t>(v.size());
    raw(v.data(), v.size() * sizeof(double));
  }
  void idx(const char*, int, std::vector<Index>& v) {
    put<std::uint64_t>(v.size());
    raw(v.data(), v.size() * sizeof(Index));
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(const std::string& bytes) : bytes_(bytes) {}

  template <class T>
  T get(const char* what) {
    need(sizeof(T), what);
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  void raw(void* p, std::size_t bytes, const char* what) {
    need(bytes, what);
    if (bytes > 0) std::memcpy(p, bytes_.data() + pos_, bytes);
    pos_ += bytes;
  }

  void mat(const char* name, int, DenseMatrix& m) {
    const auto rows = get<std::uint64_t>(name);
    const auto cols = get<std::uint64_t>(name);
    const std::size_t count = checked_count(rows, cols, sizeof(double), name);
    std::vector<double> vals(count);
    raw(vals.data(), count * sizeof(double), name);
    m = DenseMatrix(static_cast<Index>(rows), static_cast<Index>(cols), std::move(vals));
  }
  void vec(const char* name, int, std::vector<double>& v) {
    const std::size_t count = checked_count(get<std::uint64_t>(name), 1, sizeof(double), name);
    v.resize(count);
    raw(v.data(), count * sizeof(double), name);
  }
  void idx(const char* name, int, std::vector<Index>& v) {
    const std::size_t count = checked_count(get<std::uint64_t>(name), 1, sizeof(Index), name);
    v.resize(count);
    raw(v.data(), count * sizeof(Index), name);
  }

  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t bytes, const char* what) const {
    if (bytes > bytes_.size() - pos_)
      throw FormatError(std::string("container truncated while reading ") + what);
  }
  std::size_t checked_count(std::uint64_t a, std::uint64_t b, std::size_t width, const char* what) const {
    if (a > (1ULL << 40) || b > (1ULL << 40)) throw FormatError(std::string("implausible dimension in ") + what);
    const std::uint64_t left = (bytes_.size() - pos_) / width;
    if (a != 0 && b > left / a) throw FormatError(std::string("container truncated while reading ") + what);
    return static_cast<std::size_t>(a * b);
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

// ---- sidecar

class JsonWriter {
 public:
  void mat(const char* name, int t, DenseMatrix& m) {
    add(name, t, "matrix", m.rows(), m.cols(), m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
  }
  void vec(const char* name, int t, std::vector<double>& v) {
    add(name, t, "real_vector", static_cast<Index>(v.size()), 1, v.data(), v.size() * sizeof(double));
  }
  void idx(const char* name, int t, std::vector<Index>& v) {
    add(name, t, "index_vector", static_cast<Index>(v.size()), 1, v.data(), v.size() * sizeof(Index));
  }

  nlohmann::json fields = nlohmann::json::array();
  std::string blob;

 private:
  void add(const char* name, int t, const char* kind, Index rows, Index cols, const void* p, std::size_t bytes) {
    fields.push_back({{"name", name}, {"node", t}, {"kind", kind}, {"rows", rows}, {"cols", cols},
                      {"offset", blob.size()}, {"bytes", bytes}});
    blob.append(static_cast<const char*>(p), bytes);
  }
};

class JsonReader {
 public:
  JsonReader(const nlohmann::json& fields, const std::string& blob) : fields_(fields), blob_(blob) {}

  void mat(const char* name, int t, DenseMatrix& m) {
    const auto& f = next(name, t, "matrix");
    const auto rows = f.at("rows").get<Index>(), cols = f.at("cols").get<Index>();
    if (rows < 0 || cols < 0) throw FormatError(std::string("sidecar: negative dimension in ") + name);
    std::vector<double> vals(static_cast<std::size_t>(read_count(f, sizeof(double), name)));
    if (static_cast<Index>(vals.size()) != rows * cols) throw FormatError(std::string("sidecar: size mismatch in ") + name);
    copy(f, vals.data(), vals.size() * sizeof(double));
    m = DenseMatrix(rows, cols, std::move(vals));
  }
  void vec(const char* name, int t, std::vector<double>& v) {
    const auto& f = next(name, t, "real_vector");
    v.resize(read_count(f, sizeof(double), name));
    copy(f, v.data(), v.size() * sizeof(double));
  }
  void idx(const char* name, int t, std::vector<Index>& v) {
    const auto& f = next(name, t, "index_vector");
    v.resize(read_count(f, sizeof(Index), name));
    copy(f, v.data(), v.size() * sizeof(Index));
  }

  bool at_end() const { return pos_ == fields_.size(); }

 private:
  const nlohmann::json& next(const char* name, int t, const char* kind) {
    if (pos_ >= fields_.size()) throw FormatError("sidecar: field table ends early");
    const auto& f = fields_[pos_++];
    if (f.at("name").get<std::string>() != name || f.at("node").get<int>() != t || f.at("kind").get<std::string>() != kind)
      throw FormatError("sidecar: expected field " + std::string(name) + " of node " + std::to_string(t));
    return f;
  }
  std::size_t read_count(const nlohmann::json& f, std::size_t width, const char* name) const {
    const auto offset = f.at("offset").get<std::uint64_t>(), bytes = f.at("bytes").get<std::uint64_t>();
    if (bytes % width != 0 || offset > blob_.size() || bytes > blob_.size() - offset)
      throw FormatError(std::string("sidecar: blob range out of bounds for ") + name);
    return static_cast<std::size_t>(bytes / width);
  }
  void copy(const nlohmann::json& f, void* dst, std::size_t bytes) const {
    if (bytes > 0) std::memcpy(dst, blob_.data() + f.at("offset").get<std::size_t>(), bytes);
  }

  const nlohmann::json& fields_;
  const std::string& blob_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw std::runtime_error("read error on " + path);
  return ss.str();
}

void expect(bool ok, const std::string& what) {
  if (!ok) throw FormatError("inconsistent block shape: " + what);
}

std::string at_node(const char* field, int t) { return std::string(field) + " of node " + std::to_string(t); }

void check_nested_shapes(const IndexTree& tree, const std::vector<NestedNode>& nodes) {
  expect(nodes.size() == static_cast<std::size_t>(tree.node_count()), "node list length");
  auto nd_of = [&](int t) -> const NestedNode& { return nodes[static_cast<std::size_t>(t)]; };
  for (int t = 0; t < tree.node_count(); ++t) {
    const auto& nd = tree.node(t);
    const NestedNode& f = nd_of(t);
    if (nd.parent < 0) {
      expect(f.u.empty() && f.v.empty(), at_node("u/v", t));
    } else if (nd.is_leaf()) {
      expect(f.u.rows() == nd.size(), at_node("u", t));
      expect(f.v.rows() == nd.size(), at_node("v", t));
    } else {
      expect(f.u.rows() == nd_of(nd.left).u.cols() + nd_of(nd.right).u.cols(), at_node("u", t));
      expect(f.v.rows() == nd_of(nd.left).v.cols() + nd_of(nd.right).v.cols(), at_node("v", t));
    }
    if (nd.is_leaf()) {
      expect(f.d.rows() == nd.size() && f.d.cols() == nd.size(), at_node("d", t));
    } else {
      const NestedNode& a = nd_of(nd.left);
      const NestedNode& b = nd_of(nd.right);
      expect(f.b_ab.rows() == a.u.cols() && f.b_ab.cols() == b.v.cols(), at_node("b_ab", t));
      expect(f.b_ba.rows() == b.u.cols() && f.b_ba.cols() == a.v.cols(), at_node("b_ba", t));
    }
  }
}

}  // namespace

FormatTag format_of(const CompressedMatrix& m) {
  switch (m.index()) {
    case 0: return FormatTag::hodlr;
    case 1: return FormatTag::hbs;
    default: return FormatTag::hbsid;
  }
}

const char* format_name(FormatTag tag) {
  switch (tag) {
    case FormatTag::hodlr: return "hodlr";
    case FormatTag::hbs: return "hbs";
    case FormatTag::hbsid: return "hbsid";
  }
  return "unknown";
}

FormatTag parse_format(const std::string& name) {
  if (name == "hodlr") return FormatTag::hodlr;
  if (name == "hbs") return FormatTag::hbs;
  if (name == "hbsid") return FormatTag::hbsid;
  throw std::invalid_argument("unknown format '" + name + "' (expected hodlr, hbs or hbsid)");
}

void check_shapes(const HodlrMatrix& hm) {
  const HodlrMatrix* h = &hm;
  const IndexTree& tree = h->tree;
  expect(h->pairs.size() == static_cast<std::size_t>(tree.node_count()) && h->diag.size() == h->pairs.size(),
         "node list length");
  for (int t = 0; t < tree.node_count(); ++t) {
    const auto& nd = tree.node(t);
    const auto& p = h->pairs[static_cast<std::size_t>(t)];
    if (nd.is_leaf()) {
      const auto& d = h->diag[static_cast<std::size_t>(t)];
      if (h->has_diagonal) expect(d.rows() == nd.size() && d.cols() == nd.size(), at_node("d", t));
      continue;
    }
    if (nd.level >= h->built_levels) continue;
    const Index na = tree.node(nd.left).size(), nb = tree.node(nd.right).size();
    const auto ka = static_cast<Index>(p.s_ab.size()), kb = static_cast<Index>(p.s_ba.size());
    expect(p.u_ab.rows() == na && p.u_ab.cols() == ka, at_node("u_ab", t));
    expect(p.v_ab.rows() == nb && p.v_ab.cols() == ka, at_node("v_ab", t));
    expect(p.u_ba.rows() == nb && p.u_ba.cols() == kb, at_node("u_ba", t));
    expect(p.v_ba.rows() == na && p.v_ba.cols() == kb, at_node("v_ba", t));
  }
}

void check_shapes(const HbsMatrix& hm) {
  const HbsMatrix* h = &hm;
  check_nested_shapes(h->tree, h->nodes);
  expect(h->y.size() == h->nodes.size() && h->z.size() == h->nodes.size(), "weight list length");
  for (int t = 1; t < h->tree.node_count(); ++t) {
    const auto tt = static_cast<std::size_t>(t);
    expect(static_cast<Index>(h->y[tt].size()) == h->nodes[tt].u.cols(), at_node("y", t));
    expect(static_cast<Index>(h->z[tt].size()) == h->nodes[tt].v.cols(), at_node("z", t));
  }
}

void check_shapes(const HbsIdMatrix& h) {
  check_nested_shapes(h.tree, h.nodes);
  expect(h.skel_in.size() == h.nodes.size() && h.skel_out.size() == h.nodes.size(), "skeleton list length");
  for (int t = 0; t < h.tree.node_count(); ++t) {
    const auto tt = static_cast<std::size_t>(t);
    const auto& nd = h.tree.node(t);
    expect(static_cast<Index>(h.skel_in[tt].size()) == h.nodes[tt].u.cols(), at_node("skel_in", t));
    expect(static_cast<Index>(h.skel_out[tt].size()) == h.nodes[tt].v.cols(), at_node("skel_out", t));
    for (const auto* s : {&h.skel_in[tt], &h.skel_out[tt]})
      for (Index i : *s) expect(i >= nd.begin && i < nd.end, at_node("skeleton index", t));
  }
}

void check_shapes(const CompressedMatrix& m) {
  std::visit([](const auto& h) { check_shapes(h); }, m);
}

std::string to_bytes(const CompressedMatrix& m) {
  require_complete(m);
  const Header hd = header_of(m);
  ByteWriter w;
  w.raw(kMagic, sizeof(kMagic));
  w.put<std::uint32_t>(kContainerVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(hd.tag));
  w.put<std::uint64_t>(hd.n);
  w.put<std::uint64_t>(hd.leaf_size);
  w.put<std::uint32_t>(hd.levels);
  w.put<std::uint32_t>(hd.flags);
  w.put<std::uint64_t>(hd.node_count);
  // The visitors take mutable references so one traversal serves both directions.
  CompressedMatrix copy = m;
  std::visit([&](auto& h) { visit_fields(w, h); }, copy);
  return w.take();
}

CompressedMatrix from_bytes(const std::string& bytes) {
  ByteReader r(bytes);
  char magic[4];
  r.raw(magic, sizeof(magic), "magic");
  if (std::memcmp(magic, kMagic, sizeof(magic)) != 0) throw FormatError("not a compressed-matrix container (bad magic)");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kContainerVersion) throw FormatError("unsupported container version " + std::to_string(version));
  Header hd;
  const auto tag = r.get<std::uint32_t>("format tag");
  if (tag < 1 || tag > 3) throw FormatError("unknown format tag " + std::to_string(tag));
  hd.tag = static_cast<FormatTag>(tag);
  hd.n = r.get<std::uint64_t>("N");
  hd.leaf_size = r.get<std::uint64_t>("leaf size");
  hd.levels = r.get<std::uint32_t>("levels");
  hd.flags = r.get<std::uint32_t>("flags");
  hd.node_count = r.get<std::uint64_t>("node count");
  CompressedMatrix m = skeleton_from(hd);
  std::visit([&](auto& h) { visit_fields(r, h); }, m);
  if (!r.at_end()) throw FormatError("trailing bytes after the last field");
  check_shapes(m);
  return m;
}

void save_compressed(const std::string& path, const CompressedMatrix& m) { write_file_atomic(path, to_bytes(m)); }

CompressedMatrix load_compressed(const std::string& path) { return from_bytes(read_file(path)); }

void save_sidecar(const std::string& json_path, const std::string& blob_path, const CompressedMatrix& m) {
  require_complete(m);
  const Header hd = header_of(m);
  JsonWriter w;
  CompressedMatrix copy = m;
  std::visit([&](auto& h) { visit_fields(w, h); }, copy);
  nlohmann::json doc = {{"magic", "RSMT"},
                        {"version", kContainerVersion},
                        {"format", format_name(hd.tag)},
                        {"n", hd.n},
                        {"leaf_size", hd.leaf_size},
                        {"levels", hd.levels},
                        {"has_diagonal", hd.flags == 1u},
                        {"node_count", hd.node_count},
                        {"fields", std::move(w.fields)}};
  write_file_atomic(blob_path, w.blob);
  write_file_atomic(json_path, doc.dump(1) + "\n");
}

CompressedMatrix load_sidecar(const std::string& json_path, const std::string& blob_path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(json_path));
    if (doc.at("magic").get<std::string>() != "RSMT") throw FormatError("sidecar: bad magic");
    if (doc.at("version").get<std::uint32_t>() != kContainerVersion) throw FormatError("sidecar: unsupported version");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("sidecar: ") + e.what());
  }
  const std::string blob = read_file(blob_path);
  try {
    Header hd;
    try {
      hd.tag = parse_format(doc.at("format").get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("sidecar: ") + e.what());
    }
    hd.n = doc.at("n").get<std::uint64_t>();
    hd.leaf_size = doc.at("leaf_size").get<std::uint64_t>();
    hd.levels = doc.at("levels").get<std::uint32_t>();
    hd.flags = doc.at("has_diagonal").get<bool>() ? 1u : 0u;
    hd.node_count = doc.at("node_count").get<std::uint64_t>();
    CompressedMatrix m = skeleton_from(hd);
    JsonReader r(doc.at("fields"), blob);
    std::visit([&](auto& h) { visit_fields(r, h); }, m);
    if (!r.at_end()) throw FormatError("sidecar: extra entries in the field table");
    check_shapes(m);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("sidecar: ") + e.what());
  }
}

Index compressed_size(const CompressedMatrix& m) {
  return std::visit([](const auto& h) { return h.size(); }, m);
}

int compressed_depth(const CompressedMatrix& m) {
  return std::visit([](const auto& h) { return h.tree.depth(); }, m);
}

Index compressed_max_rank(const CompressedMatrix& m) {
  if (const auto* h = std::get_if<HodlrMatrix>(&m)) return hodlr_max_rank(*h);
  if (const auto* h = std::get_if<HbsMatrix>(&m)) return hbs_max_rank(*h);
  return hbs_max_rank(std::get<HbsIdMatrix>(m));
}

std::int64_t compressed_storage_bytes(const CompressedMatrix& m) {
  if (const auto* h = std::get_if<HodlrMatrix>(&m)) return hodlr_storage_bytes(*h);
  if (const auto* h = std::get_if<HbsMatrix>(&m)) return hbs_storage_bytes(*h);
  return hbs_storage_bytes(std::get<HbsIdMatrix>(m));
}

DenseMatrix compressed_apply(const CompressedMatrix& m, const DenseMatrix& x, bool adjoint, Exec exec) {
  if (const auto* h = std::get_if<HodlrMatrix>(&m)) return hodlr_apply(*h, x, adjoint, exec);
  if (const auto* h = std::get_if<HbsMatrix>(&m)) return hbs_apply(*h, x, adjoint, exec);
  return hbs_apply(std::get<HbsIdMatrix>(m), x, adjoint, exec);
}

DenseMatrix compressed_apply_truncated(const CompressedMatrix& m, int level, const DenseMatrix& x, bool adjoint,
                                       Exec exec) {
  if (const auto* h = std::get_if<HodlrMatrix>(&m)) return hodlr_apply_truncated(*h, level, x, adjoint, exec);
  if (const auto* h = std::get_if<HbsMatrix>(&m)) return hbs_apply_truncated(*h, level, x, adjoint, exec);
  return hbs_apply_truncated(std::get<HbsIdMatrix>(m), level, x, adjoint, exec);
}

}  // namespace rsmat
