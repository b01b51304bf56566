#include "sps/matrix_core.hpp"

#include "sps/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace sps {
namespace {

std::vector<std::string> default_labels(Index d) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) labels.push_back(std::to_string(i));
  return labels;
}

void validate(const std::vector<std::string>& states, const RationalMatrix& entries) {
  const Index d = static_cast<Index>(states.size());
  if (entries.rows() != entries.cols()) throw ValidationError("matrix is not square");
  if (entries.rows() != d)
    throw ValidationError("expected " + std::to_string(d) + " rows, got " + std::to_string(entries.rows()));
  if (d == 0) throw ValidationError("empty state set");

  std::set<std::string> seen;
  for (const auto& s : states)
    if (!seen.insert(s).second) throw ValidationError("duplicate state label \"" + s + "\"");

  for (Index i = 0; i < d; ++i) {
    Rational sum = 0;
    for (Index j = 0; j < d; ++j) {
      if (entries(i, j) < 0)
        throw ValidationError("negative entry at (" + states[i] + ", " + states[j] + ")");
      sum += entries(i, j);
    }
    if (sum != 1) throw ValidationError("row " + states[i] + " sums to " + to_string(sum) + ", not 1");
  }
}

}  // namespace

std::variant<StochasticMatrix::Dense, StochasticMatrix::Sparse> StochasticMatrix::store(const RationalMatrix& entries) {
  if (entries.rows() < kSparseThreshold) return entries;
  std::vector<Eigen::Triplet<Rational>> triplets;
  for (Index i = 0; i < entries.rows(); ++i)
    for (Index j = 0; j < entries.cols(); ++j)
      if (entries(i, j) != 0) triplets.emplace_back(i, j, entries(i, j));
  Sparse s(entries.rows(), entries.cols());
  s.setFromTriplets(triplets.begin(), triplets.end());
  s.makeCompressed();
  return s;
}

StochasticMatrix::StochasticMatrix(std::vector<std::string> states, const RationalMatrix& entries) {
  validate(states, entries);
  states_ = std::move(states);
  entries_ = store(entries);
}

StochasticMatrix StochasticMatrix::unvalidated(std::vector<std::string> states, const RationalMatrix& entries) {
  return StochasticMatrix(std::move(states), store(entries));
}

StochasticMatrix StochasticMatrix::identity(Index d) {
  return unvalidated(default_labels(d), RationalMatrix::Identity(d, d));
}

StochasticMatrix StochasticMatrix::from_entries(const RationalMatrix& entries) {
  return StochasticMatrix(default_labels(entries.rows()), entries);
}

std::optional<Index> StochasticMatrix::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < states_.size(); ++i)
    if (states_[i] == label) return static_cast<Index>(i);
  return std::nullopt;
}

Rational StochasticMatrix::coeff(Index i, Index j) const {
  if (const auto* d = std::get_if<Dense>(&entries_)) return (*d)(i, j);
  return std::get<Sparse>(entries_).coeff(i, j);
}

RationalMatrix StochasticMatrix::dense() const {
  if (const auto* d = std::get_if<Dense>(&entries_)) return *d;
  return RationalMatrix(std::get<Sparse>(entries_));
}

Eigen::MatrixXd StochasticMatrix::to_double() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(size(), size());
  for (Index i = 0; i < size(); ++i)
    for_each_nonzero(i, [&](Index j, const Rational& v) { out(i, j) = sps::to_double(v); });
  return out;
}

StochasticMatrix StochasticMatrix::permuted(std::span<const Index> sigma) const {
  const Index d = size();
  if (static_cast<Index>(sigma.size()) != d) throw SizeMismatch("permutation length does not match state count");
  RationalMatrix out = RationalMatrix::Zero(d, d);
  std::vector<std::string> labels(states_.size());
  for (Index i = 0; i < d; ++i) {
    labels[sigma[i]] = states_[i];
    for_each_nonzero(i, [&](Index j, const Rational& v) { out(sigma[i], sigma[j]) = v; });
  }
  return unvalidated(std::move(labels), out);
}

StochasticMatrix StochasticMatrix::restricted(std::span<const Index> states) const {
  const Index k = static_cast<Index>(states.size());
  RationalMatrix out(k, k);
  std::vector<std::string> labels;
  for (Index a = 0; a < k; ++a) {
    labels.push_back(states_[states[a]]);
    for (Index b = 0; b < k; ++b) out(a, b) = coeff(states[a], states[b]);
  }
  return unvalidated(std::move(labels), out);
}

StochasticMatrix operator*(const StochasticMatrix& a, const StochasticMatrix& b) {
  const Index d = a.size();
  if (b.size() != d) throw SizeMismatch("product of matrices with different state counts");
  RationalMatrix out = RationalMatrix::Zero(d, d);
  for (Index i = 0; i < d; ++i)
    a.for_each_nonzero(i, [&](Index j, const Rational& x) {
      b.for_each_nonzero(j, [&](Index k, const Rational& y) { out(i, k) += x * y; });
    });
  return StochasticMatrix::unvalidated(a.states(), out);
}

bool StochasticMatrix::same_entries(const StochasticMatrix& other) const {
  if (other.size() != size()) return false;
  for (Index i = 0; i < size(); ++i)
    for (Index j = 0; j < size(); ++j)
      if (coeff(i, j) != other.coeff(i, j)) return false;
  return true;
}

bool SupportSet::contains(Index i, Index j) const {
  return std::binary_search(pairs.begin(), pairs.end(), std::make_pair(i, j));
}

StochasticMatrix load_text(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("states") || !doc.contains("rows"))
    throw ParseError("expected an object with \"states\" and \"rows\"");
  if (!doc["states"].is_array() || !doc["rows"].is_array()) throw ParseError("\"states\" and \"rows\" must be arrays");

  std::vector<std::string> states;
  for (const auto& s : doc["states"]) {
    if (!s.is_string()) throw ParseError("state labels must be strings");
    states.push_back(s.get<std::string>());
  }

  const auto& rows = doc["rows"];
  const Index n_rows = static_cast<Index>(rows.size());
  Index n_cols = n_rows == 0 ? 0 : static_cast<Index>(rows[0].size());
  for (const auto& row : rows) {
    if (!row.is_array()) throw ParseError("each row must be an array");
    if (static_cast<Index>(row.size()) != n_cols) throw ValidationError("rows have different lengths");
  }
  RationalMatrix entries(n_rows, n_cols);
  for (Index i = 0; i < n_rows; ++i)
    for (Index j = 0; j < n_cols; ++j) {
      const auto& cell = rows[i][j];
      if (cell.is_string()) {
        entries(i, j) = parse_rational(cell.get<std::string>());
      } else if (cell.is_number_integer()) {
        entries(i, j) = Rational(cell.get<long long>());
      } else {
        throw ParseError("entries must be strings holding a rational or decimal");
      }
    }
  return StochasticMatrix(std::move(states), entries);
}

StochasticMatrix load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_text(buffer.str());
}

StochasticMatrix power(const StochasticMatrix& p, int n) {
  StochasticMatrix result = StochasticMatrix::unvalidated(p.states(), RationalMatrix::Identity(p.size(), p.size()));
  StochasticMatrix base = p;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

std::vector<StochasticMatrix> powers(const StochasticMatrix& p, int max_degree) {
  std::vector<StochasticMatrix> out;
  out.reserve(static_cast<std::size_t>(max_degree) + 1);
  out.push_back(power(p, 0));
  for (int n = 1; n <= max_degree; ++n) out.push_back(out.back() * p);
  return out;
}

SupportSet support_of(const StochasticMatrix& pn, int degree) {
  SupportSet s;
  s.degree = degree;
  s.size = pn.size();
  for (Index i = 0; i < pn.size(); ++i)
    pn.for_each_nonzero(i, [&](Index j, const Rational&) { s.pairs.emplace_back(i, j); });
  return s;
}

SupportSet support(const StochasticMatrix& p, int n) {
  return support_of(power(p, n), n);
}

std::vector<Triple> triple_support(const StochasticMatrix& pn, const StochasticMatrix& pm) {
  std::vector<Triple> out;
  for (Index i = 0; i < pn.size(); ++i)
    pn.for_each_nonzero(i, [&](Index j, const Rational&) {
      pm.for_each_nonzero(j, [&](Index k, const Rational&) { out.emplace_back(i, j, k); });
    });
  return out;
}

std::pair<SchurMatrix<double>, SchurMatrix<double>> schur_ops(const StochasticMatrix& pn) {
  const Index d = pn.size();
  Eigen::MatrixXd root = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd inv = Eigen::MatrixXd::Zero(d, d);
  for (Index i = 0; i < d; ++i)
    pn.for_each_nonzero(i, [&](Index j, const Rational& v) {
      root(i, j) = std::sqrt(to_double(v));
      inv(i, j) = 1.0 / root(i, j);
    });
  return {SchurMatrix<double>{std::move(root), SchurRole::Sqrt}, SchurMatrix<double>{std::move(inv), SchurRole::Flat}};
}

std::pair<SchurMatrix<double>, SchurMatrix<double>> schur_ops(const StochasticMatrix& p, int n) {
  return schur_ops(power(p, n));
}

}  // namespace sps
