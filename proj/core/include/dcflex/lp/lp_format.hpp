#pragma once

#include <ostream>

#include "dcflex/lp/model.hpp"

namespace dcflex::lp {

// Writes the model in CPLEX LP text format. Unnamed variables are written as
// x<index> and unnamed rows as c<index>; names are sanitized to the LP
// identifier alphabet.
void write_lp_format(const Model& model, std::ostream& out);

}  // namespace dcflex::lp
