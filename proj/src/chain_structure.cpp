#include "sps/chain_structure.hpp"

#include "sps/errors.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <deque>
#include <numeric>

namespace sps {
namespace {

std::vector<char> reach_from(const Adjacency& succ, Index s) {
  std::vector<char> seen(succ.size(), 0);
  std::deque<Index> queue{s};
  seen[s] = 1;
  while (!queue.empty()) {
    Index u = queue.front();
    queue.pop_front();
    for (Index v : succ[u])
      if (!seen[v]) {
        seen[v] = 1;
        queue.push_back(v);
      }
  }
  return seen;
}

// BFS levels from `base` using only edges that stay inside `inside`.
std::vector<long> levels_within(const Adjacency& succ, const std::vector<char>& inside, Index base) {
  std::vector<long> level(succ.size(), -1);
  std::deque<Index> queue{base};
  level[base] = 0;
  while (!queue.empty()) {
    Index u = queue.front();
    queue.pop_front();
    for (Index v : succ[u])
      if (inside[v] && level[v] < 0) {
        level[v] = level[u] + 1;
        queue.push_back(v);
      }
  }
  return level;
}

void require_irreducible(const StochasticMatrix& p) {
  if (!is_irreducible(p)) throw NotIrreducible("matrix has more than one communicating class");
}

}  // namespace

Adjacency successors(const StochasticMatrix& p) {
  Adjacency out(static_cast<std::size_t>(p.size()));
  for (Index i = 0; i < p.size(); ++i) p.for_each_nonzero(i, [&](Index j, const Rational&) { out[i].push_back(j); });
  return out;
}

Adjacency predecessors(const StochasticMatrix& p) {
  Adjacency out(static_cast<std::size_t>(p.size()));
  for (Index i = 0; i < p.size(); ++i) p.for_each_nonzero(i, [&](Index j, const Rational&) { out[j].push_back(i); });
  return out;
}

bool ClassDecomposition::all_essential() const {
  return std::all_of(essential.begin(), essential.end(), [](bool e) { return e; });
}

ClassDecomposition communicating_classes(const StochasticMatrix& p) {
  const Index d = p.size();
  const Adjacency succ = successors(p);
  std::vector<std::vector<char>> reach;
  reach.reserve(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) reach.push_back(reach_from(succ, i));

  ClassDecomposition out;
  out.class_of.assign(static_cast<std::size_t>(d), -1);
  for (Index i = 0; i < d; ++i) {
    if (out.class_of[i] >= 0) continue;
    std::vector<Index> members;
    for (Index j = i; j < d; ++j)
      if (reach[i][j] && reach[j][i]) members.push_back(j);
    const Index c = static_cast<Index>(out.classes.size());
    for (Index j : members) out.class_of[j] = c;
    out.classes.push_back(std::move(members));
  }

  out.essential.assign(out.classes.size(), true);
  for (Index u = 0; u < d; ++u)
    for (Index v : succ[u])
      if (out.class_of[u] != out.class_of[v]) out.essential[out.class_of[u]] = false;

  for (const auto& c : out.classes) out.reordering.insert(out.reordering.end(), c.begin(), c.end());
  return out;
}

std::optional<int> class_period(const Adjacency& succ, const std::vector<Index>& states) {
  std::vector<char> inside(succ.size(), 0);
  for (Index s : states) inside[s] = 1;
  const auto level = levels_within(succ, inside, states.front());
  long g = 0;
  for (Index u : states)
    for (Index v : succ[u])
      if (inside[v]) g = std::gcd(g, std::labs(level[u] + 1 - level[v]));
  if (g == 0) return std::nullopt;
  return static_cast<int>(g);
}

std::optional<int> period(const StochasticMatrix& p, Index i) {
  const auto dec = communicating_classes(p);
  return class_period(successors(p), dec.classes[dec.class_of[i]]);
}

bool is_irreducible(const StochasticMatrix& p) {
  return communicating_classes(p).classes.size() == 1;
}

bool is_essential(const StochasticMatrix& p) {
  return communicating_classes(p).all_essential();
}

CyclicDecomposition cyclic_decomposition(const StochasticMatrix& p) {
  require_irreducible(p);
  const Adjacency succ = successors(p);
  std::vector<Index> all(static_cast<std::size_t>(p.size()));
  std::iota(all.begin(), all.end(), Index{0});

  CyclicDecomposition out;
  out.period = class_period(succ, all).value_or(1);
  const auto level = levels_within(succ, std::vector<char>(succ.size(), 1), 0);
  out.residue_classes.resize(static_cast<std::size_t>(out.period));
  out.residue.resize(all.size());
  for (Index s : all) {
    out.residue[s] = static_cast<int>(level[s] % out.period);
    out.residue_classes[out.residue[s]].push_back(s);
  }
  for (const auto& c : out.residue_classes) out.reordering.insert(out.reordering.end(), c.begin(), c.end());
  return out;
}

Classification classify(const StochasticMatrix& p) {
  const auto dec = communicating_classes(p);
  const Adjacency succ = successors(p);
  Classification out;
  out.essential = dec.all_essential();
  for (std::size_t c = 0; c < dec.classes.size(); ++c) {
    ClassReport r;
    r.states = dec.classes[c];
    r.essential = dec.essential[c];
    r.recurrent = dec.essential[c];
    r.period = class_period(succ, r.states);
    out.classes.push_back(std::move(r));
  }
  return out;
}

StationaryDistribution stationary(const StochasticMatrix& p) {
  require_irreducible(p);
  const Index d = p.size();
  // pi (P - I) = 0 transposed, with the last equation replaced by sum(pi) = 1.
  RationalMatrix system = (p.dense() - RationalMatrix::Identity(d, d)).transpose();
  system.row(d - 1).setConstant(Rational(1));
  RationalVector rhs = RationalVector::Zero(d);
  rhs(d - 1) = 1;
  return {system.partialPivLu().solve(rhs)};
}

LimitProfile limit_profile(const StochasticMatrix& p, Index i, Index j) {
  const auto cyc = cyclic_decomposition(p);
  const auto pi = stationary(p);
  const int r = cyc.period;
  LimitProfile out;
  out.residue = ((cyc.residue[j] - cyc.residue[i]) % r + r) % r;
  out.limit = pi.weights(j) * r;
  return out;
}

}  // namespace sps
