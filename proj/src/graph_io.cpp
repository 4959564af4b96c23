#include "deanon/graph_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>

#include "deanon/errors.hpp"

namespace deanon {

namespace {

constexpr std::array<char, 4> kMagic{'D', 'N', 'G', 'C'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kFlagWeights = 1;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::string_view next_token(std::string_view& rest) {
  std::size_t i = 0;
  while (i < rest.size() && is_space(rest[i])) ++i;
  std::size_t j = i;
  while (j < rest.size() && !is_space(rest[j])) ++j;
  auto tok = rest.substr(i, j - i);
  rest.remove_prefix(j);
  return tok;
}

std::optional<std::int64_t> parse_int(std::string_view tok) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) return std::nullopt;
  return value;
}

// "# Nodes: 4039 Edges: 88234" -> 4039
std::optional<std::int64_t> declared_nodes(std::string_view comment) {
  auto pos = comment.find("Nodes:");
  if (pos == std::string_view::npos) return std::nullopt;
  auto rest = comment.substr(pos + 6);
  return parse_int(next_token(rest));
}

template <typename T>
void put_le(std::ostream& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((u >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw DataError("graph cache truncated");
  }
  std::make_unsigned_t<T> u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    u |= static_cast<std::make_unsigned_t<T>>(bytes[i]) << (8 * i);
  }
  return static_cast<T>(u);
}

bool is_binary(const std::filesystem::path& path, GraphFormat format) {
  if (format == GraphFormat::automatic) return path.extension() == ".bin";
  return format == GraphFormat::binary_cache;
}

}  // namespace

LoadedGraph read_edge_list(std::istream& in) {
  std::vector<std::pair<std::int64_t, std::int64_t>> raw;
  std::optional<std::int64_t> declared;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest(line);
    while (!rest.empty() && is_space(rest.front())) rest.remove_prefix(1);
    if (rest.empty()) continue;
    if (rest.front() == '#') {
      if (!declared) declared = declared_nodes(rest);
      continue;
    }
    auto a = parse_int(next_token(rest));
    auto b = parse_int(next_token(rest));
    if (!a || !b) {
      throw DataError("line " + std::to_string(line_no) + ": expected two integer vertex ids: '" +
                      line + "'");
    }
    raw.emplace_back(*a, *b);
  }
  if (raw.empty() && !declared) throw DataError("edge list is empty");

  LoadedGraph out;
  std::int64_t lo = 0;
  std::int64_t hi = -1;
  for (auto [a, b] : raw) {
    lo = std::min({lo, a, b});
    hi = std::max({hi, a, b});
  }
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  std::size_t n = 0;
  if (declared && *declared > 0 && lo >= 0 && hi < *declared) {
    n = static_cast<std::size_t>(*declared);
    out.original_ids.resize(n);
    for (std::size_t v = 0; v < n; ++v) out.original_ids[v] = static_cast<std::int64_t>(v);
    for (auto [a, b] : raw) edges.push_back({static_cast<VertexId>(a), static_cast<VertexId>(b)});
  } else {
    auto& ids = out.original_ids;
    ids.reserve(raw.size() * 2);
    for (auto [a, b] : raw) {
      ids.push_back(a);
      ids.push_back(b);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    ids.shrink_to_fit();
    n = ids.size();
    auto dense = [&](std::int64_t id) {
      return static_cast<VertexId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
    };
    for (auto [a, b] : raw) edges.push_back({dense(a), dense(b)});
  }
  out.graph = Graph::from_edges(n, edges, &out.dropped);
  return out;
}

void write_edge_list(const Graph& graph, std::ostream& out) {
  out << "# Nodes: " << graph.num_vertices() << " Edges: " << graph.num_edges() << '\n';
  for (const auto& e : graph.edges()) out << e.u << '\t' << e.v << '\n';
}

Graph read_graph_cache(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw DataError("not a graph cache (bad magic bytes)");
  }
  const auto version = get_le<std::uint32_t>(in);
  if (version != kVersion) throw DataError("unsupported graph cache version " + std::to_string(version));
  const auto flags = get_le<std::uint32_t>(in);
  (void)get_le<std::uint32_t>(in);
  const auto n = get_le<std::uint64_t>(in);
  const auto nnz = get_le<std::uint64_t>(in);
  if (n >= UINT32_MAX || nnz > (std::uint64_t{1} << 40)) throw DataError("graph cache header out of range");

  std::vector<std::uint64_t> offsets(n + 1);
  for (auto& o : offsets) o = get_le<std::uint64_t>(in);
  std::vector<VertexId> neighbors(nnz);
  for (auto& v : neighbors) v = get_le<std::uint32_t>(in);
  std::vector<double> weights;
  if (flags & kFlagWeights) {
    weights.resize(n);
    for (auto& w : weights) w = std::bit_cast<double>(get_le<std::uint64_t>(in));
  }
  return Graph::from_csr(std::move(offsets), std::move(neighbors), std::move(weights));
}

void write_graph_cache(const Graph& graph, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, graph.has_weights() ? kFlagWeights : 0);
  put_le<std::uint32_t>(out, 0);
  put_le<std::uint64_t>(out, graph.num_vertices());
  put_le<std::uint64_t>(out, graph.neighbor_array().size());
  for (auto o : graph.offsets()) put_le<std::uint64_t>(out, o);
  for (auto v : graph.neighbor_array()) put_le<std::uint32_t>(out, v);
  for (double w : graph.weights()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(w));
}

LoadedGraph load_graph(const std::filesystem::path& path, GraphFormat format) {
  const bool binary = is_binary(path, format);
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw DataError("cannot open " + path.string());
  if (!binary) return read_edge_list(in);
  LoadedGraph out;
  out.graph = read_graph_cache(in);
  out.original_ids.resize(out.graph.num_vertices());
  for (std::size_t v = 0; v < out.original_ids.size(); ++v) {
    out.original_ids[v] = static_cast<std::int64_t>(v);
  }
  return out;
}

void save_graph(const Graph& graph, const std::filesystem::path& path, GraphFormat format) {
  const bool binary = is_binary(path, format);
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw DataError("cannot write " + path.string());
  if (binary) {
    write_graph_cache(graph, out);
  } else {
    write_edge_list(graph, out);
  }
  if (!out) throw DataError("write failed for " + path.string());
}

void save_observed_pair(const ObservedPair& pair, const std::string& prefix) {
  save_graph(pair.g1, prefix + ".g1.bin");
  save_graph(pair.g2, prefix + ".g2.bin");
  std::ofstream out(prefix + ".truth.csv");
  if (!out) throw DataError("cannot write " + prefix + ".truth.csv");
  std::ostringstream s;
  s.precision(17);
  s << pair.s;
  out << "# s=" << s.str() << "\n"
      << "g1_id,g2_id\n";
  for (std::size_t a = 0; a < pair.truth.size(); ++a) out << a << ',' << pair.truth[a] << '\n';
}

ObservedPair load_observed_pair(const std::string& prefix) {
  ObservedPair pair;
  pair.g1 = load_graph(prefix + ".g1.bin").graph;
  pair.g2 = load_graph(prefix + ".g2.bin").graph;
  if (pair.g1.num_vertices() != pair.g2.num_vertices()) {
    throw DataError("observed graphs disagree on vertex count");
  }
  const std::string truth_path = prefix + ".truth.csv";
  std::ifstream in(truth_path);
  if (!in) throw DataError("cannot open " + truth_path);
  const std::size_t n = pair.g1.num_vertices();
  pair.truth.assign(n, std::numeric_limits<VertexId>::max());
  std::vector<char> seen(n, 0);
  std::string line;
  std::size_t line_no = 0;
  bool have_s = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind("# s=", 0) == 0) {
      pair.s = std::stod(line.substr(4));
      have_s = true;
      continue;
    }
    if (line.empty() || line.front() == '#' || line.rfind("g1_id", 0) == 0) continue;
    const auto comma = line.find(',');
    auto a = comma == std::string::npos ? std::nullopt : parse_int(std::string_view(line).substr(0, comma));
    auto b = comma == std::string::npos ? std::nullopt
                                        : parse_int(std::string_view(line).substr(comma + 1));
    if (!a || !b || *a < 0 || *b < 0 || static_cast<std::size_t>(*a) >= n ||
        static_cast<std::size_t>(*b) >= n || seen[static_cast<std::size_t>(*b)]) {
      throw DataError(truth_path + ":" + std::to_string(line_no) + ": bad correspondence row");
    }
    seen[static_cast<std::size_t>(*b)] = 1;
    pair.truth[static_cast<std::size_t>(*a)] = static_cast<VertexId>(*b);
  }
  if (!have_s) throw DataError(truth_path + ": missing '# s=' header");
  for (auto t : pair.truth) {
    if (t == std::numeric_limits<VertexId>::max()) throw DataError(truth_path + ": correspondence incomplete");
  }
  return pair;
}

}  // namespace deanon
