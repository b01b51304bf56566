#include "sps/regularity.hpp"

#include "sps/chain_structure.hpp"
#include "sps/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>

namespace sps {
namespace {

// Gr(P) with self-loops removed.
Adjacency streamlined_graph(const StochasticMatrix& p) {
  Adjacency g = successors(p);
  for (Index u = 0; u < static_cast<Index>(g.size()); ++u) std::erase(g[u], u);
  return g;
}

// walk[a][b]: lengths 0..cap of walks a -> b in the streamlined graph.
std::vector<std::vector<std::set<int>>> walk_lengths(const Adjacency& g, int cap) {
  const std::size_t d = g.size();
  std::vector<std::vector<std::set<int>>> out(d, std::vector<std::set<int>>(d));
  for (std::size_t a = 0; a < d; ++a) {
    std::vector<char> frontier(d, 0);
    frontier[a] = 1;
    for (int len = 0; len <= cap; ++len) {
      std::vector<char> next(d, 0);
      for (std::size_t u = 0; u < d; ++u) {
        if (!frontier[u]) continue;
        out[a][u].insert(len);
        for (Index v : g[u]) next[v] = 1;
      }
      frontier = std::move(next);
    }
  }
  return out;
}

struct UnionFind {
  std::vector<Index> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), Index{0}); }
  Index find(Index x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

ReducingCheck is_reducing(const StochasticMatrix& p, const std::vector<Index>& states) {
  const Index d = p.size();
  const Adjacency succ = successors(p);
  std::vector<char> in_s(static_cast<std::size_t>(d), 0);
  for (Index s : states) in_s[s] = 1;

  // BFS over the complement of S, seeded by the edges that leave S.
  std::vector<Index> parent(static_cast<std::size_t>(d), -1);
  std::vector<char> seen(static_cast<std::size_t>(d), 0);
  std::deque<Index> queue;
  for (Index s : states)
    for (Index u : succ[s])
      if (!in_s[u] && !seen[u]) {
        seen[u] = 1;
        parent[u] = s;
        queue.push_back(u);
      }
  while (!queue.empty()) {
    const Index u = queue.front();
    queue.pop_front();
    for (Index v : succ[u]) {
      if (in_s[v]) {
        StreamlinedPath path;
        path.vertices.push_back(v);
        Index x = u;
        for (; !in_s[x]; x = parent[x]) path.vertices.push_back(x);
        path.vertices.push_back(x);
        std::reverse(path.vertices.begin(), path.vertices.end());
        return {false, std::move(path)};
      }
      if (!seen[v]) {
        seen[v] = 1;
        parent[v] = u;
        queue.push_back(v);
      }
    }
  }
  return {true, std::nullopt};
}

std::optional<StreamlinedPath> streamlined_cycle_through(const StochasticMatrix& p, Index i) {
  const Adjacency g = streamlined_graph(p);
  const std::size_t d = g.size();
  std::vector<Index> parent(d, -1);
  std::vector<char> seen(d, 0);
  std::deque<Index> queue;
  for (Index u : g[i]) {
    seen[u] = 1;
    parent[u] = i;
    queue.push_back(u);
  }
  while (!queue.empty()) {
    const Index u = queue.front();
    queue.pop_front();
    for (Index v : g[u]) {
      if (v == i) {
        StreamlinedPath path;
        path.vertices.push_back(i);
        for (Index x = u; x != i; x = parent[x]) path.vertices.push_back(x);
        path.vertices.push_back(i);
        std::reverse(path.vertices.begin(), path.vertices.end());
        return path;
      }
      if (!seen[v]) {
        seen[v] = 1;
        parent[v] = u;
        queue.push_back(v);
      }
    }
  }
  return std::nullopt;
}

SingularityReport singularity_report(const StochasticMatrix& p) {
  const Index d = p.size();
  SingularityReport out;
  out.cap = static_cast<int>(d);
  out.class_of.assign(static_cast<std::size_t>(d), -1);
  for (Index i = 0; i < d; ++i) {
    if (!is_reducing(p, {i}).reducing) continue;
    out.reducing_states.push_back(i);
    if (p.positive(i, i)) out.candidate_singular.push_back(i);
  }

  const auto walks = walk_lengths(streamlined_graph(p), out.cap);
  out.through.assign(static_cast<std::size_t>(d), {});
  for (Index c : out.candidate_singular) {
    auto& table = out.through[c];
    table.assign(static_cast<std::size_t>(d), std::vector<std::set<int>>(static_cast<std::size_t>(d)));
    for (Index i = 0; i < d; ++i)
      for (Index k = 0; k < d; ++k)
        for (int a : walks[i][c])
          for (int b : walks[c][k])
            if (a + b <= out.cap) table[i][k].insert(a + b);
  }

  UnionFind uf(static_cast<std::size_t>(d));
  for (std::size_t x = 0; x < out.candidate_singular.size(); ++x)
    for (std::size_t y = x + 1; y < out.candidate_singular.size(); ++y) {
      const Index c1 = out.candidate_singular[x], c2 = out.candidate_singular[y];
      bool linked = false;
      for (Index i = 0; i < d && !linked; ++i)
        for (Index k = 0; k < d && !linked; ++k)
          linked = !out.through[c1][i][k].empty() && !out.through[c2][i][k].empty();
      if (linked) uf.unite(c1, c2);
    }

  for (Index c : out.candidate_singular) {
    const Index root = uf.find(c);
    if (out.class_of[root] < 0) {
      out.class_of[root] = static_cast<Index>(out.classes.size());
      out.classes.push_back({});
      out.representatives.push_back(root);
    }
    out.class_of[c] = out.class_of[root];
    out.classes[out.class_of[c]].push_back(c);
  }
  return out;
}

ProperTriple proper_triple(const ArvSystem& arv, const SingularityReport& report, Index i, Index k, int n) {
  if (!arv.support(n).contains(i, k))
    throw OffSupport("(" + std::to_string(i) + ", " + std::to_string(k) + ") is not in the support of degree " +
                     std::to_string(n));
  ProperTriple out;
  std::set<Index> classes;
  for (Index c : report.candidate_singular)
    for (int len : report.through[c][i][k]) {
      if (len >= n) break;
      out.lengths.insert(len);
      classes.insert(report.class_of[c]);
    }
  if (out.lengths.empty()) return out;
  out.proper = true;
  out.length = *out.lengths.begin();
  out.class_index = *classes.begin();
  out.representative = report.representatives[*out.class_index];
  out.consistent = out.lengths.size() == 1 && classes.size() == 1;
  return out;
}

ProperTriple proper_triple(const StochasticMatrix& p, const SingularityReport& report, Index i, Index k, int n) {
  return proper_triple(ArvSystem(p, std::max(n, 1)), report, i, k, n);
}

GaugeFamily gauge_family(const StochasticMatrix& p, const SingularityReport& report,
                         const std::vector<Complex>& lambda, int max_degree) {
  if (lambda.size() != report.classes.size())
    throw SizeMismatch("need one scalar per class (" + std::to_string(report.classes.size()) + ")");
  for (const auto& l : lambda)
    if (std::abs(std::abs(l) - 1.0) > 1e-12) throw NotUnitModulus("gauge scalars must have modulus 1");

  const ArvSystem arv(p, max_degree);
  const Index d = p.size();
  GaugeFamily out;
  out.max_degree = max_degree;
  out.scale.push_back(Eigen::MatrixXcd::Identity(d, d));
  for (int n = 1; n <= max_degree; ++n) {
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& [i, k] : arv.support(n).pairs) {
      const auto t = proper_triple(arv, report, i, k, n);
      out.consistent = out.consistent && t.consistent;
      s(i, k) = t.proper ? std::pow(lambda[*t.class_index], n - *t.length) : Complex(1.0);
    }
    out.scale.push_back(std::move(s));
  }

  for (int n = 1; n < max_degree; ++n)
    for (int m = 1; n + m <= max_degree; ++m)
      for (const auto& [i, j] : arv.support(n).pairs)
        for (const auto& [jj, k] : arv.support(m).pairs) {
          if (jj != j) continue;
          const Complex u = umap(arv, fiber_unit(arv, n, i, j), fiber_unit(arv, m, j, k)).coeff(i, k);
          const Complex lhs = out.scale[n](i, j) * out.scale[m](j, k) * u;
          const Complex rhs = out.scale[n + m](i, k) * u;
          out.multiplicativity_defect = std::max(out.multiplicativity_defect, std::abs(lhs - rhs));
        }
  return out;
}

Complex MoebiusMap::operator()(Complex z) const {
  return std::polar(1.0, theta) * (z - w) / (1.0 - std::conj(w) * z);
}

Complex MoebiusMap::inverse(Complex z) const {
  const Complex u = std::polar(1.0, -theta) * z;
  return (u + w) / (1.0 + std::conj(w) * u);
}

Regularization moebius_regularize(const MoebiusMap& t) {
  if (!(std::abs(t.w) < 1.0)) throw NoConvergence("centre must lie in the open unit disk");
  Regularization out;
  const double radius = std::abs(t.w);
  if (radius == 0.0) return out;

  // |T^{-1}(e^{i phi} T(0))| runs from 0 at phi = 0 past |w|; find the crossing.
  const Complex a = t(0.0);
  auto g = [&](double phi) { return std::abs(t.inverse(std::polar(1.0, phi) * a)) - radius; };
  constexpr int kGrid = 360;
  double lo = 0.0, hi = -1.0;
  for (int s = 1; s <= kGrid; ++s) {
    const double phi = 2.0 * std::numbers::pi * s / kGrid;
    if (g(phi) >= 0.0) {
      hi = phi;
      break;
    }
    lo = phi;
  }
  if (hi < 0.0) throw NoConvergence("no sign change on the search grid");
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (g(mid) < 0.0 ? lo : hi) = mid;
  }

  const double phi = std::abs(g(lo)) < std::abs(g(hi)) ? lo : hi;
  out.lambda = std::polar(1.0, phi);
  const Complex b = t.inverse(out.lambda * a);
  const Complex ratio = t.w / b;
  out.mu = ratio / std::abs(ratio);
  out.residual = std::abs(t(out.mu * b));
  if (!(out.residual < 1e-12)) throw NoConvergence("residual " + std::to_string(out.residual) + " above 1e-12");
  return out;
}

}  // namespace sps
