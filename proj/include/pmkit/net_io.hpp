#pragma once

#include <string>
#include <string_view>

#include "pmkit/petri_net.hpp"

namespace pmkit {

// PNML place/transition nets. A transition is silent when it has no <name> or
// carries <toolspecific activity="$invisible$">. Final markings are read from
// <finalmarkings><marking><place idref=..><text>n</text></place>.
PetriNet parse_pnml(std::string_view text);
std::string write_pnml(const PetriNet& net);

// Graphviz rendering; silent transitions are drawn as filled black boxes and
// the initial/final markings as token counts on places.
std::string net_to_dot(const PetriNet& net);

}  // namespace pmkit
