#pragma once

#include <charconv>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "avgraph/avg.hpp"
#include "avgraph/matrix.hpp"
#include "avgraph/visibility.hpp"

namespace avgraph {

/// Shortest round-trip decimal for a weight ("1" stays "1").
inline std::string format_weight(double w) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), w);
  return std::string(buf, res.ptr);
}

enum class GraphFormat { EdgeList, Dot, Csv };

inline GraphFormat parse_graph_format(const std::string& name) {
  if (name == "edgelist") return GraphFormat::EdgeList;
  if (name == "dot") return GraphFormat::Dot;
  if (name == "csv") return GraphFormat::Csv;
  throw std::invalid_argument("unknown graph format \"" + name + "\"");
}

namespace detail {

// Export surface shared by the fixed-rule graphs and the AVG feature matrix:
// 1-based nodes, one line per positive-weight edge.
inline void edges_to_edgelist(std::ostream& os,
                              const std::vector<VisGraph::Edge>& edges) {
  for (const auto& e : edges)
    os << e.u << "\t" << e.v << "\t" << format_weight(e.weight) << "\n";
}

inline void edges_to_dot(std::ostream& os, std::size_t node_count,
                         const std::vector<VisGraph::Edge>& edges) {
  os << "graph avg {\n";
  for (std::size_t v = 1; v <= node_count; ++v) os << "  " << v << ";\n";
  for (const auto& e : edges)
    os << "  " << e.u << " -- " << e.v << " [weight=" << format_weight(e.weight) << "];\n";
  os << "}\n";
}

}  // namespace detail

inline std::vector<VisGraph::Edge> positive_edges(const BandedMatrix& band) {
  std::vector<VisGraph::Edge> edges;
  for (int d = 1; d <= band.bandwidth(); ++d) {
    const auto& diag = band.diagonal(d);
    for (std::size_t f = 0; f < diag.size(); ++f)
      if (diag[f] > 0.0)
        edges.push_back({static_cast<std::uint32_t>(f + 1),
                         static_cast<std::uint32_t>(f + 1 + d), diag[f]});
  }
  return edges;
}

inline void write_edge_list(const VisGraph& g, std::ostream& os) {
  detail::edges_to_edgelist(os, g.edges());
}

inline void write_edge_list(const BandedMatrix& band, std::ostream& os) {
  VisGraph g(band.node_count(), positive_edges(band));
  detail::edges_to_edgelist(os, g.edges());
}

inline void write_dot(const VisGraph& g, std::ostream& os) {
  detail::edges_to_dot(os, g.node_count(), g.edges());
}

inline void write_dot(const BandedMatrix& band, std::ostream& os) {
  VisGraph g(band.node_count(), positive_edges(band));
  detail::edges_to_dot(os, g.node_count(), g.edges());
}

inline void write_adjacency_csv(const Matrix& dense, std::ostream& os) {
  for (std::size_t i = 0; i < dense.rows(); ++i) {
    for (std::size_t j = 0; j < dense.cols(); ++j) {
      if (j) os << ",";
      os << format_weight(dense(i, j));
    }
    os << "\n";
  }
}

inline void write_adjacency_csv(const VisGraph& g, std::ostream& os) {
  Matrix dense(g.node_count(), g.node_count());
  for (const auto& e : g.edges()) {
    dense(e.u - 1, e.v - 1) = e.weight;
    dense(e.v - 1, e.u - 1) = e.weight;
  }
  write_adjacency_csv(dense, os);
}

inline void write_adjacency_csv(const BandedMatrix& band, std::ostream& os) {
  write_adjacency_csv(band.densify(), os);
}

}  // namespace avgraph
