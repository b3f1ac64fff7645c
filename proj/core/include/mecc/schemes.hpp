// The three benchmark schedules the joint design is compared against:
// pure local computing, computation-only cooperation (offload to the helper,
// no relaying) and communication-only cooperation (relay to the AP, no helper
// computing). The restricted problems are small enough for grid search plus
// golden-section polish, deliberately independent of the dual solver.
#pragma once

#include "mecc/model.hpp"

namespace mecc {

enum class SchemeId { local, computation_coop, communication_coop, joint };

const char* scheme_name(SchemeId id);

struct SchemeResult {
  SchemeId scheme = SchemeId::local;
  bool feasible = false;
  double energy_j = 0;
  Allocation allocation;
};

// Everything on the user CPU. Closed form; feasible iff the CPU cap allows.
SchemeResult local_only(const Scenario& s);

// Split between local computing and the helper; relay slots pinned to zero.
SchemeResult computation_coop(const Scenario& s);

struct CommunicationCoopOptions {
  // The loose reading of the benchmark dedicates the whole block to the two
  // relay slots and ignores the server execution tail. Default keeps the
  // execution tail inside the time budget.
  bool literal_full_block = false;
};

// Split between local computing and the AP via the decode-and-forward pair;
// helper computing and the first slot pinned to zero.
SchemeResult communication_coop(const Scenario& s, const CommunicationCoopOptions& opt = {});

}  // namespace mecc
