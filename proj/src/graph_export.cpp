#include "hivnet/graph_export.hpp"

#include <ostream>

namespace hivnet {

namespace {

const char* kind_name(PartnershipKind k) {
  return k == PartnershipKind::Steady ? "steady" : "casual";
}

}  // namespace

void export_graphml(const ContactNetwork& net, std::ostream& out) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"stage\" for=\"node\" attr.name=\"stage\" attr.type=\"string\"/>\n"
      << "  <key id=\"age\" for=\"node\" attr.name=\"age\" attr.type=\"int\"/>\n"
      << "  <key id=\"degree\" for=\"node\" attr.name=\"degree\" attr.type=\"int\"/>\n"
      << "  <key id=\"kind\" for=\"edge\" attr.name=\"kind\" attr.type=\"string\"/>\n"
      << "  <key id=\"elapsed\" for=\"edge\" attr.name=\"elapsed\" attr.type=\"int\"/>\n"
      << "  <key id=\"expected_duration\" for=\"edge\" attr.name=\"expected_duration\""
      << " attr.type=\"int\"/>\n"
      << "  <graph id=\"contact_network\" edgedefault=\"undirected\">\n";
  for (std::size_t i = 0; i < net.agents.size(); ++i) {
    const Agent& a = net.agents[i];
    out << "    <node id=\"n" << a.id << "\">\n"
        << "      <data key=\"stage\">" << stage_name(a.stage) << "</data>\n"
        << "      <data key=\"age\">" << a.age << "</data>\n"
        << "      <data key=\"degree\">" << net.degree[i] << "</data>\n"
        << "    </node>\n";
  }
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const Partnership& p = net.edges[e];
    out << "    <edge id=\"e" << e << "\" source=\"n" << p.a << "\" target=\"n" << p.b << "\">\n"
        << "      <data key=\"kind\">" << kind_name(p.kind) << "</data>\n"
        << "      <data key=\"elapsed\">" << p.elapsed << "</data>\n"
        << "      <data key=\"expected_duration\">" << p.expected_duration << "</data>\n"
        << "    </edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
}

void export_dot(const ContactNetwork& net, std::ostream& out) {
  out << "graph contact_network {\n";
  for (std::size_t i = 0; i < net.agents.size(); ++i) {
    const Agent& a = net.agents[i];
    out << "  n" << a.id << " [stage=\"" << stage_name(a.stage) << "\" age=" << a.age
        << " degree=" << net.degree[i] << "];\n";
  }
  for (const auto& e : net.edges) {
    out << "  n" << e.a << " -- n" << e.b << " [kind=\"" << kind_name(e.kind)
        << "\" elapsed=" << e.elapsed << " expected_duration=" << e.expected_duration
        << (e.kind == PartnershipKind::Steady ? "" : " style=dotted") << "];\n";
  }
  out << "}\n";
}

}  // namespace hivnet
