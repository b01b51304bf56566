#pragma once

#include "sps/chain_structure.hpp"
#include "sps/cuntz.hpp"
#include "sps/fock.hpp"
#include "sps/iso_engine.hpp"
#include "sps/regularity.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace sps::cli {

using Json = nlohmann::ordered_json;

/// Top-level document: command echo, input digests, results, warnings.
struct Report {
  Json command = Json::object();
  Json inputs = Json::array();
  Json results = Json::object();
  std::vector<std::string> warnings;

  void add_input(const std::filesystem::path& path);
  Json to_json() const;
};

std::string sha256_file(const std::filesystem::path& path);

Json labels(const StochasticMatrix& p, const std::vector<Index>& states);
Json weights(const StochasticMatrix& p, const std::vector<Index>& states, const RationalVector& w);

Json classification_json(const StochasticMatrix& p, const Classification& c);
Json cyclic_json(const StochasticMatrix& p, const std::vector<Index>& block, const CyclicDecomposition& c);
Json regularity_json(const StochasticMatrix& p, const SingularityReport& r);
Json verdict_json(const StochasticMatrix& p, const StochasticMatrix& q, const Verdict& v);
Json invariant_json(const CuntzInvariant& inv);

}  // namespace sps::cli
