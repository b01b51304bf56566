#pragma once

#include "sps/matrix_core.hpp"

#include <optional>
#include <vector>

namespace sps {

using Adjacency = std::vector<std::vector<Index>>;

/// Out-neighbours of every state in Gr(P), increasing order.
Adjacency successors(const StochasticMatrix& p);
Adjacency predecessors(const StochasticMatrix& p);

struct ClassDecomposition {
  std::vector<std::vector<Index>> classes;  // sorted, ordered by smallest member
  std::vector<bool> essential;              // no edge leaves the class
  std::vector<Index> class_of;              // state -> class position
  std::vector<Index> reordering;            // states listed class by class

  bool all_essential() const;
};

struct CyclicDecomposition {
  int period = 1;
  std::vector<std::vector<Index>> residue_classes;
  std::vector<int> residue;  // state -> residue class
  std::vector<Index> reordering;
};

struct StationaryDistribution {
  RationalVector weights;
};

struct ClassReport {
  std::vector<Index> states;
  bool essential = false;
  bool recurrent = false;
  std::optional<int> period;
};

struct Classification {
  bool essential = false;
  std::vector<ClassReport> classes;
};

struct LimitProfile {
  int residue = 0;
  Rational limit;
};

ClassDecomposition communicating_classes(const StochasticMatrix& p);

/// gcd of return times to i; none when no cycle passes through i.
std::optional<int> period(const StochasticMatrix& p, Index i);

/// Period of the class containing `states`, from BFS levels inside the class.
std::optional<int> class_period(const Adjacency& succ, const std::vector<Index>& states);

bool is_irreducible(const StochasticMatrix& p);
bool is_essential(const StochasticMatrix& p);

CyclicDecomposition cyclic_decomposition(const StochasticMatrix& p);
Classification classify(const StochasticMatrix& p);
StationaryDistribution stationary(const StochasticMatrix& p);
LimitProfile limit_profile(const StochasticMatrix& p, Index i, Index j);

}  // namespace sps
