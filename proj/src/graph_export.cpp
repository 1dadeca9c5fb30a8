#include "ioforensics/csv.hpp"
#include "ioforensics/graph.hpp"

#include <ostream>

namespace iof {

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_graphml(std::ostream& out, const InteractionGraph& graph) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
         "  <key id=\"corpus\" for=\"node\" attr.name=\"corpus\" attr.type=\"string\"/>\n"
         "  <key id=\"suspension\" for=\"node\" attr.name=\"suspension_status\" attr.type=\"string\"/>\n"
         "  <key id=\"explicit\" for=\"node\" attr.name=\"explicit\" attr.type=\"boolean\"/>\n"
         "  <key id=\"mention\" for=\"edge\" attr.name=\"mention\" attr.type=\"long\"/>\n"
         "  <key id=\"retweet\" for=\"edge\" attr.name=\"retweet\" attr.type=\"long\"/>\n"
         "  <key id=\"reply\" for=\"edge\" attr.name=\"reply\" attr.type=\"long\"/>\n"
         "  <key id=\"quote\" for=\"edge\" attr.name=\"quote\" attr.type=\"long\"/>\n"
         "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n"
         "  <graph id=\"interactions\" edgedefault=\"directed\">\n";
  for (const NodeInfo& n : graph.nodes()) {
    out << "    <node id=\"" << xml_escape(n.user_id) << "\">";
    out << "<data key=\"corpus\">" << (n.corpus ? to_string(*n.corpus) : "external") << "</data>";
    out << "<data key=\"suspension\">" << to_string(n.suspension) << "</data>";
    if (n.explicit_node) out << "<data key=\"explicit\">" << (*n.explicit_node ? "true" : "false") << "</data>";
    out << "</node>\n";
  }
  for (const Edge& e : graph.edges()) {
    out << "    <edge source=\"" << xml_escape(graph.nodes()[e.source].user_id) << "\" target=\""
        << xml_escape(graph.nodes()[e.target].user_id) << "\">"
        << "<data key=\"mention\">" << e.counts.mention << "</data>"
        << "<data key=\"retweet\">" << e.counts.retweet << "</data>"
        << "<data key=\"reply\">" << e.counts.reply << "</data>"
        << "<data key=\"quote\">" << e.counts.quote << "</data>"
        << "<data key=\"weight\">" << e.counts.weight() << "</data></edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
}

void write_edge_list(std::ostream& out, const InteractionGraph& graph) {
  csv::write_row(out, {"source", "target", "mention", "retweet", "reply", "quote", "weight"});
  for (const Edge& e : graph.edges()) {
    csv::write_row(out, {graph.nodes()[e.source].user_id, graph.nodes()[e.target].user_id,
                         std::to_string(e.counts.mention), std::to_string(e.counts.retweet),
                         std::to_string(e.counts.reply), std::to_string(e.counts.quote),
                         std::to_string(e.counts.weight())});
  }
}

}  // namespace iof
