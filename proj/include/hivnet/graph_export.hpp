#pragma once

#include <iosfwd>

#include "hivnet/contact_network.hpp"

namespace hivnet {

/// GraphML 1.0 snapshot. Nodes carry stage, age, degree; edges carry kind,
/// elapsed, expected_duration.
void export_graphml(const ContactNetwork& net, std::ostream& out);

/// Graphviz DOT snapshot with the same attributes.
void export_dot(const ContactNetwork& net, std::ostream& out);

}  // namespace hivnet
