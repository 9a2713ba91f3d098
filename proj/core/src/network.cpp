#include "anchorlink/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "anchorlink/error.hpp"

namespace anchorlink {

namespace {

std::string at_line(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line);
}

int parse_int(std::string_view token, const std::string& path, std::size_t line) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw DataError("unparsable integer token '" + std::string(token) + "' at " +
                    at_line(path, line));
  }
  return value;
}

double parse_double(std::string_view token, const std::string& path, std::size_t line) {
  // from_chars<double> is available but strtod keeps this tolerant of
  // leading '+' and exponent forms the same way across libcs.
  std::string buf(token);
  char* end = nullptr;
  double value = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || buf.empty()) {
    throw DataError("unparsable real token '" + buf + "' at " + at_line(path, line));
  }
  return value;
}

}  // namespace

Network::Network(int node_count, std::span<const std::pair<int, int>> edges,
                 std::vector<std::vector<double>> attributes) {
  if (node_count < 0) throw DataError("negative node count");
  if (static_cast<int>(attributes.size()) != node_count) {
    throw DataError("attribute rows (" + std::to_string(attributes.size()) +
                    ") do not match node count (" + std::to_string(node_count) + ")");
  }
  node_count_ = node_count;
  attr_dim_ = node_count > 0 ? static_cast<int>(attributes[0].size()) : 0;
  if (node_count > 0 && attr_dim_ < 1) {
    throw DataError("attribute dimension must be >= 1");
  }
  attrs_.reserve(static_cast<std::size_t>(node_count_) * attr_dim_);
  for (int i = 0; i < node_count_; ++i) {
    if (static_cast<int>(attributes[i].size()) != attr_dim_) {
      throw DataError("ragged attribute row for node " + std::to_string(i) +
                      ": got " + std::to_string(attributes[i].size()) +
                      " values, expected " + std::to_string(attr_dim_));
    }
    attrs_.insert(attrs_.end(), attributes[i].begin(), attributes[i].end());
  }

  std::vector<std::vector<int>> adj(node_count_);
  for (const auto& [u, v] : edges) {
    if (u < 0 || u >= node_count_ || v < 0 || v >= node_count_) {
      throw DataError("edge endpoint out of range: (" + std::to_string(u) + ", " +
                      std::to_string(v) + ") with " + std::to_string(node_count_) +
                      " nodes");
    }
    if (u == v) {
      throw DataError("self-loop on node " + std::to_string(u));
    }
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  offsets_.assign(node_count_ + 1, 0);
  for (int i = 0; i < node_count_; ++i) {
    auto& nbrs = adj[i];
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    offsets_[i + 1] = offsets_[i] + nbrs.size();
  }
  neighbor_ids_.reserve(offsets_[node_count_]);
  for (int i = 0; i < node_count_; ++i) {
    neighbor_ids_.insert(neighbor_ids_.end(), adj[i].begin(), adj[i].end());
  }
}

void Network::check_node(int v) const {
  if (v < 0 || v >= node_count_) {
    throw DataError("node id " + std::to_string(v) + " out of range [0, " +
                    std::to_string(node_count_) + ")");
  }
}

std::span<const int> Network::neighbors(int v) const {
  check_node(v);
  return {neighbor_ids_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

bool Network::has_edge(int u, int v) const {
  auto nbrs = neighbors(u);
  check_node(v);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::span<const double> Network::attributes_of(int v) const {
  check_node(v);
  return {attrs_.data() + static_cast<std::size_t>(v) * attr_dim_,
          static_cast<std::size_t>(attr_dim_)};
}

std::vector<std::pair<int, int>> Network::edge_list() const {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(edge_count());
  for (int u = 0; u < node_count_; ++u) {
    for (int v : neighbors(u)) {
      if (u < v) edges.emplace_back(u, v);
    }
  }
  return edges;
}

void validate_anchors(const AnchorSet& anchors, const Network& source,
                      const Network& target) {
  std::unordered_set<int> seen_s, seen_t;
  for (const auto& [s, t] : anchors.pairs) {
    if (s < 0 || s >= source.node_count()) {
      throw DataError("anchor source id " + std::to_string(s) + " out of range");
    }
    if (t < 0 || t >= target.node_count()) {
      throw DataError("anchor target id " + std::to_string(t) + " out of range");
    }
    if (!seen_s.insert(s).second) {
      throw DataError("source id " + std::to_string(s) + " anchored twice");
    }
    if (!seen_t.insert(t).second) {
      throw DataError("target id " + std::to_string(t) + " anchored twice");
    }
  }
}

namespace {

struct NumberedPair {
  int first;
  int second;
  std::size_t line;
};

std::vector<NumberedPair> read_pair_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<NumberedPair> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string a, b, extra;
    if (!(ss >> a)) continue;  // blank line
    if (!(ss >> b) || (ss >> extra)) {
      throw DataError("expected two integers at " + at_line(path, lineno));
    }
    pairs.push_back({parse_int(a, path, lineno), parse_int(b, path, lineno), lineno});
  }
  return pairs;
}

std::vector<std::pair<int, int>> validate_pairs(const std::vector<NumberedPair>& pairs,
                                                const std::string& path, int lhs_count,
                                                int rhs_count, bool reject_self_loops) {
  std::vector<std::pair<int, int>> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.first < 0 || p.first >= lhs_count || p.second < 0 || p.second >= rhs_count) {
      throw DataError("node id out of range at " + at_line(path, p.line) + ": (" +
                      std::to_string(p.first) + ", " + std::to_string(p.second) + ")");
    }
    if (reject_self_loops && p.first == p.second) {
      throw DataError("self-loop at " + at_line(path, p.line) + ": node " +
                      std::to_string(p.first));
    }
    out.emplace_back(p.first, p.second);
  }
  return out;
}

}  // namespace

Network load_network(const std::string& edge_path, const std::string& attr_path,
                     AttrEncoding encoding) {
  std::ifstream attr_in(attr_path);
  if (!attr_in) throw DataError("cannot open " + attr_path);

  std::vector<std::vector<double>> attrs;
  std::string line;
  std::size_t lineno = 0;

  if (encoding == AttrEncoding::Dense) {
    while (std::getline(attr_in, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::vector<double> row;
      std::size_t start = 0;
      while (start <= line.size()) {
        std::size_t comma = line.find(',', start);
        std::string_view token(line.data() + start,
                               (comma == std::string::npos ? line.size() : comma) - start);
        row.push_back(parse_double(token, attr_path, lineno));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      if (!attrs.empty() && row.size() != attrs.front().size()) {
        throw DataError("ragged attribute row at " + at_line(attr_path, lineno) +
                        ": got " + std::to_string(row.size()) + " values, expected " +
                        std::to_string(attrs.front().size()));
      }
      attrs.push_back(std::move(row));
    }
  } else {
    // one class id per node; one-hot over the observed class range
    std::vector<int> classes;
    int max_class = -1;
    while (std::getline(attr_in, line)) {
      ++lineno;
      std::istringstream ss(line);
      std::string token;
      if (!(ss >> token)) continue;
      int c = parse_int(token, attr_path, lineno);
      if (c < 0) throw DataError("negative class id at " + at_line(attr_path, lineno));
      classes.push_back(c);
      max_class = std::max(max_class, c);
    }
    for (int c : classes) {
      std::vector<double> row(max_class + 1, 0.0);
      row[c] = 1.0;
      attrs.push_back(std::move(row));
    }
  }

  const int node_count = static_cast<int>(attrs.size());
  auto edges = validate_pairs(read_pair_file(edge_path), edge_path, node_count,
                              node_count, /*reject_self_loops=*/true);
  return Network(node_count, edges, std::move(attrs));
}

void save_network(const Network& net, const std::string& edge_path,
                  const std::string& attr_path) {
  std::ofstream edge_out(edge_path);
  if (!edge_out) throw DataError("cannot write " + edge_path);
  for (const auto& [u, v] : net.edge_list()) {
    edge_out << u << ' ' << v << '\n';
  }

  std::ofstream attr_out(attr_path);
  if (!attr_out) throw DataError("cannot write " + attr_path);
  char buf[64];
  for (int i = 0; i < net.node_count(); ++i) {
    auto row = net.attributes_of(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
      if (j) attr_out << ',';
      attr_out << buf;
    }
    attr_out << '\n';
  }
}

AnchorSet load_anchors(const std::string& path, const Network& source,
                       const Network& target) {
  AnchorSet anchors{validate_pairs(read_pair_file(path), path, source.node_count(),
                                   target.node_count(), /*reject_self_loops=*/false)};
  validate_anchors(anchors, source, target);
  return anchors;
}

void save_anchors(const AnchorSet& anchors, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (const auto& [s, t] : anchors.pairs) {
    out << s << ' ' << t << '\n';
  }
}

std::pair<AnchorSet, AnchorSet> split_anchors(const AnchorSet& anchors,
                                              double train_ratio,
                                              std::uint64_t seed) {
  if (anchors.pairs.empty()) throw DataError("cannot split an empty anchor set");
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
    throw UsageError("train ratio must lie in (0, 1)");
  }
  const auto n = anchors.pairs.size();
  const auto train_n =
      static_cast<std::size_t>(std::floor(train_ratio * static_cast<double>(n) + 0.5));
  if (train_n == 0 || train_n == n) {
    throw UsageError("train ratio " + std::to_string(train_ratio) + " leaves an empty split for " +
                     std::to_string(n) + " anchors");
  }
  auto shuffled = anchors.pairs;
  RandomEngine rng(seed);
  rng.shuffle(shuffled);
  AnchorSet train{{shuffled.begin(), shuffled.begin() + train_n}};
  AnchorSet test{{shuffled.begin() + train_n, shuffled.end()}};
  return {std::move(train), std::move(test)};
}

}  // namespace anchorlink
