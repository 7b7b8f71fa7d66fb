#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "litmap/error.hpp"
#include "litmap/graph.hpp"
#include "litmap/semantic.hpp"
#include "litmap/text_util.hpp"

namespace litmap {

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default:
        // control characters other than tab/newline are not allowed in XML 1.0
        if (static_cast<unsigned char>(c) < 0x20 && c != '\t' && c != '\n' && c != '\r') out += ' ';
        else out.push_back(c);
    }
  }
  return out;
}

struct GraphmlEdge {
  NodeId u, v;
  double weight;
};

inline std::string graphml_document(const std::vector<std::string>& ids, const std::vector<std::string>& labels,
                                    const Partition* p, const std::vector<GraphmlEdge>& edges, bool directed) {
  if (p && p->n_nodes() != ids.size()) throw DomainError("graphml: partition does not cover graph");
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" "
      "xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" "
      "xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns "
      "http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n"
      "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
      "  <key id=\"community\" for=\"node\" attr.name=\"community\" attr.type=\"int\"/>\n"
      "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n";
  out += std::string("  <graph id=\"G\" edgedefault=\"") + (directed ? "directed" : "undirected") + "\">\n";
  for (NodeId i = 0; i < ids.size(); ++i) {
    out += "    <node id=\"" + xml_escape(ids[i]) + "\">\n";
    out += "      <data key=\"label\">" + xml_escape(labels[i]) + "</data>\n";
    if (p) out += "      <data key=\"community\">" + std::to_string((*p)[i]) + "</data>\n";
    out += "    </node>\n";
  }
  std::size_t k = 0;
  for (const auto& e : edges) {
    out += "    <edge id=\"e" + std::to_string(k++) + "\" source=\"" + xml_escape(ids[e.u]) + "\" target=\"" +
           xml_escape(ids[e.v]) + "\">\n";
    out += "      <data key=\"weight\">" + text::format_double(e.weight) + "</data>\n";
    out += "    </edge>\n";
  }
  out += "  </graph>\n</graphml>\n";
  return out;
}

}  // namespace detail

// Node id is the reference id; label is the title when given, else the id.
inline std::string citation_graphml(const CitationGraph& g, const Partition* p = nullptr,
                                    const std::vector<std::string>* titles = nullptr) {
  if (titles && titles->size() != g.n_nodes()) throw DomainError("graphml: title list does not cover graph");
  std::vector<std::string> labels;
  labels.reserve(g.n_nodes());
  for (NodeId i = 0; i < g.n_nodes(); ++i) {
    labels.push_back(titles && !(*titles)[i].empty() ? (*titles)[i] : g.label(i));
  }
  std::vector<detail::GraphmlEdge> edges;
  for (auto [u, v] : g.edges()) edges.push_back({u, v, 1.0});
  return detail::graphml_document(g.labels(), labels, p, edges, true);
}

inline std::string semantic_graphml(const SemanticGraph& g, const Partition* p = nullptr) {
  std::vector<detail::GraphmlEdge> edges;
  for (NodeId u = 0; u < g.n_nodes(); ++u) {
    for (const auto& a : g.graph.neighbors(u)) {
      if (u < a.to) edges.push_back({u, a.to, a.weight});
    }
  }
  return detail::graphml_document(g.terms, g.terms, p, edges, false);
}

inline void export_graphml(const CitationGraph& g, const Partition* p, const std::filesystem::path& path,
                           const std::vector<std::string>* titles = nullptr) {
  text::write_file(path, citation_graphml(g, p, titles));
}

inline void export_graphml(const SemanticGraph& g, const Partition* p, const std::filesystem::path& path) {
  text::write_file(path, semantic_graphml(g, p));
}

}  // namespace litmap
