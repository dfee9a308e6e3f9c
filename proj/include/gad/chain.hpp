#pragma once

#include <string>
#include <vector>

#include "gad/geometry.hpp"

namespace gad {

// Which move produced a chain entry. "hold" marks a darting check that found
// the state outside every jump region.
enum class Branch { kameleon, dart, hold, rw };

const char* branch_name(Branch b);

struct ChainRecord {
  Pose pose;
  double log_quality = 0.0;
  bool accepted = false;
  Branch branch = Branch::kameleon;
};

}  // namespace gad
