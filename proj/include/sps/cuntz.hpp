#pragma once

#include "sps/iso_engine.hpp"

#include <string>
#include <vector>

namespace sps {

struct BlockData {
  Index size = 0;
  int period = 1;
  std::vector<Index> residue_sizes;  // sizes of the cyclic residue classes
  bool balanced = true;              // all residue classes of equal size
  Index quotient = 0;                // size / period when balanced, else 0
  std::vector<Index> states;
};

struct CuntzInvariant {
  std::vector<Index> block_sizes;  // sorted ascending
  std::vector<BlockData> blocks;   // same order as block_sizes

  bool operator==(const CuntzInvariant& other) const { return block_sizes == other.block_sizes; }
};

/// Throws NotEssential when some class can be left.
CuntzInvariant cuntz_invariant(const StochasticMatrix& p);

/// "C(T; M_2 ⊕ M_3)" style text; M_1 is written as C.
std::string presentation(const StochasticMatrix& p);
std::string presentation(const CuntzInvariant& inv);
/// Per-block cyclic data, e.g. "r=2, q=2".
std::string presentation_note(const CuntzInvariant& inv);

Verdict decide_cuntz_iso(const StochasticMatrix& p, const StochasticMatrix& q);

}  // namespace sps
