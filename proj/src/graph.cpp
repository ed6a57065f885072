#include "hdt/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string_view>
#include <unordered_map>

#include "hdt/errors.hpp"

namespace hdt {

Graph Graph::from_edges(std::size_t node_count, std::vector<std::pair<NodeId, NodeId>> edges,
                        std::vector<std::uint64_t> original_labels) {
  for (auto& [u, v] : edges) {
    if (u >= node_count || v >= node_count) {
      throw std::out_of_range("edge endpoint exceeds node count");
    }
    if (u > v) std::swap(u, v);
  }
  std::erase_if(edges, [](const auto& e) { return e.first == e.second; });
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  Graph g;
  g.offsets_.assign(node_count + 1, 0);
  for (const auto& [u, v] : edges) {
    ++g.offsets_[u + 1];
    ++g.offsets_[v + 1];
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.adjacency_.resize(2 * edges.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  // Lists fill in edge order, which is not sorted for the lower endpoint.
  for (const auto& [u, v] : edges) {
    g.adjacency_[cursor[u]++] = v;
    g.adjacency_[cursor[v]++] = u;
  }
  for (std::size_t i = 0; i < node_count; ++i) {
    std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
              g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]));
  }

  if (original_labels.empty()) {
    original_labels.resize(node_count);
    std::iota(original_labels.begin(), original_labels.end(), std::uint64_t{0});
  } else if (original_labels.size() != node_count) {
    throw std::invalid_argument("original label count does not match node count");
  }
  g.labels_ = std::move(original_labels);
  return g;
}

void Graph::check(NodeId i) const {
  if (i >= node_count()) {
    throw std::out_of_range("node id " + std::to_string(i) + " out of range [0, " +
                            std::to_string(node_count()) + ")");
  }
}

std::span<const NodeId> Graph::neighbors(NodeId i) const {
  check(i);
  return neighbors_unchecked(i);
}

std::size_t Graph::degree(NodeId i) const {
  check(i);
  return degree_unchecked(i);
}

std::uint64_t Graph::original_label(NodeId i) const {
  check(i);
  return labels_[i];
}

double Graph::average_degree() const noexcept {
  if (node_count() == 0) return 0.0;
  return static_cast<double>(adjacency_.size()) / static_cast<double>(node_count());
}

bool Graph::has_edge(NodeId i, NodeId j) const {
  const auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

bool Graph::is_connected() const {
  const std::size_t n = node_count();
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::queue<NodeId> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    for (NodeId v : neighbors_unchecked(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == n;
}

std::uint64_t Graph::fingerprint() const noexcept {
  // FNV-1a over node count, offsets and adjacency.
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](std::uint64_t value) {
    for (int b = 0; b < 8; ++b) {
      h ^= (value >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(node_count());
  for (auto o : offsets_) mix(o);
  for (auto a : adjacency_) mix(a);
  return h;
}

namespace {

std::uint64_t parse_id(std::string_view token, std::size_t line_no) {
  std::uint64_t value = 0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(line_no, "expected a non-negative integer node id, got '" +
                                  std::string(token) + "'");
  }
  return value;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

}  // namespace

Graph load_edge_list(std::istream& source, bool symmetrize) {
  std::unordered_map<std::uint64_t, NodeId> dense;
  std::vector<std::uint64_t> labels;
  std::vector<std::pair<NodeId, NodeId>> arcs;

  auto intern = [&](std::uint64_t label) {
    auto [it, inserted] = dense.try_emplace(label, static_cast<NodeId>(labels.size()));
    if (inserted) labels.push_back(label);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    std::string_view rest(line);
    std::vector<std::string_view> tokens;
    while (true) {
      while (!rest.empty() && is_space(rest.front())) rest.remove_prefix(1);
      if (rest.empty()) break;
      std::size_t len = 0;
      while (len < rest.size() && !is_space(rest[len])) ++len;
      tokens.push_back(rest.substr(0, len));
      rest.remove_prefix(len);
    }
    if (tokens.empty() || tokens.front().front() == '#') continue;
    if (tokens.size() != 2) {
      throw ParseError(line_no, "expected two node ids, got " + std::to_string(tokens.size()) +
                                    " fields");
    }
    const auto u = parse_id(tokens[0], line_no);
    const auto v = parse_id(tokens[1], line_no);
    const NodeId du = intern(u);
    const NodeId dv = intern(v);
    arcs.emplace_back(du, dv);
  }
  if (labels.empty()) throw DataError("edge list contains no nodes");

  std::vector<std::pair<NodeId, NodeId>> edges;
  if (symmetrize) {
    edges = std::move(arcs);
  } else {
    std::sort(arcs.begin(), arcs.end());
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
    for (const auto& [u, v] : arcs) {
      if (u < v && std::binary_search(arcs.begin(), arcs.end(), std::pair{v, u})) {
        edges.emplace_back(u, v);
      }
    }
  }
  const std::size_t n = labels.size();
  return Graph::from_edges(n, std::move(edges), std::move(labels));
}

Graph load_edge_list_file(const std::string& path, bool symmetrize) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open edge list '" + path + "'");
  return load_edge_list(in, symmetrize);
}

Graph largest_connected_component(const Graph& raw) {
  const std::size_t n = raw.node_count();
  if (n == 0) throw DataError("graph has no nodes");

  std::vector<std::uint32_t> component(n, UINT32_MAX);
  std::vector<std::size_t> sizes;
  std::vector<std::uint64_t> min_label;
  for (NodeId s = 0; s < n; ++s) {
    if (component[s] != UINT32_MAX) continue;
    const auto c = static_cast<std::uint32_t>(sizes.size());
    sizes.push_back(0);
    min_label.push_back(raw.original_label(s));
    std::queue<NodeId> frontier;
    frontier.push(s);
    component[s] = c;
    while (!frontier.empty()) {
      const NodeId u = frontier.front();
      frontier.pop();
      ++sizes[c];
      min_label[c] = std::min(min_label[c], raw.original_label(u));
      for (NodeId v : raw.neighbors_unchecked(u)) {
        if (component[v] == UINT32_MAX) {
          component[v] = c;
          frontier.push(v);
        }
      }
    }
  }

  std::uint32_t best = 0;
  for (std::uint32_t c = 1; c < sizes.size(); ++c) {
    if (sizes[c] > sizes[best] || (sizes[c] == sizes[best] && min_label[c] < min_label[best])) {
      best = c;
    }
  }

  std::vector<NodeId> remap(n, UINT32_MAX);
  std::vector<std::uint64_t> labels;
  labels.reserve(sizes[best]);
  for (NodeId i = 0; i < n; ++i) {
    if (component[i] == best) {
      remap[i] = static_cast<NodeId>(labels.size());
      labels.push_back(raw.original_label(i));
    }
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < n; ++i) {
    if (component[i] != best) continue;
    for (NodeId j : raw.neighbors_unchecked(i)) {
      if (i < j) edges.emplace_back(remap[i], remap[j]);
    }
  }
  const std::size_t m = labels.size();
  return Graph::from_edges(m, std::move(edges), std::move(labels));
}

Graph load_normalized_graph(const std::string& path, bool symmetrize) {
  return largest_connected_component(load_edge_list_file(path, symmetrize));
}

}  // namespace hdt
