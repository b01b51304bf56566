#include "report.hpp"

#include "sps/errors.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>

namespace sps::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr);
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

void Report::add_input(const std::filesystem::path& path) {
  inputs.push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
}

Json Report::to_json() const {
  Json out;
  out["command"] = command;
  out["inputs"] = inputs;
  out["results"] = results;
  out["warnings"] = warnings;
  return out;
}

Json labels(const StochasticMatrix& p, const std::vector<Index>& states) {
  Json out = Json::array();
  for (Index s : states) out.push_back(p.states()[s]);
  return out;
}

Json weights(const StochasticMatrix& p, const std::vector<Index>& states, const RationalVector& w) {
  Json out = Json::object();
  for (std::size_t a = 0; a < states.size(); ++a) out[p.states()[states[a]]] = to_string(w(static_cast<Index>(a)));
  return out;
}

Json classification_json(const StochasticMatrix& p, const Classification& c) {
  Json classes = Json::array();
  for (const auto& r : c.classes) {
    Json entry;
    entry["states"] = labels(p, r.states);
    entry["essential"] = r.essential;
    entry["recurrent"] = r.recurrent;
    entry["period"] = r.period ? Json(*r.period) : Json(nullptr);
    classes.push_back(entry);
  }
  return {{"essential", c.essential}, {"irreducible", c.classes.size() == 1}, {"classes", classes}};
}

Json cyclic_json(const StochasticMatrix& p, const std::vector<Index>& block, const CyclicDecomposition& c) {
  Json residues = Json::array();
  for (const auto& r : c.residue_classes) {
    std::vector<Index> global;
    for (Index s : r) global.push_back(block[s]);
    residues.push_back(labels(p, global));
  }
  return {{"states", labels(p, block)}, {"period", c.period}, {"residue_classes", residues}};
}

Json regularity_json(const StochasticMatrix& p, const SingularityReport& r) {
  Json classes = Json::array();
  for (const auto& c : r.classes) classes.push_back(labels(p, c));
  Json cycles = Json::object();
  for (Index i = 0; i < p.size(); ++i) {
    const auto cycle = streamlined_cycle_through(p, i);
    cycles[p.states()[i]] = cycle ? labels(p, cycle->vertices) : Json(nullptr);
  }
  return {{"cap", r.cap},
          {"reducing_states", labels(p, r.reducing_states)},
          {"candidate_singular", labels(p, r.candidate_singular)},
          {"classes", classes},
          {"representatives", labels(p, r.representatives)},
          {"streamlined_cycles", cycles}};
}

Json verdict_json(const StochasticMatrix& p, const StochasticMatrix& q, const Verdict& v) {
  Json out;
  out["answer"] = to_string(v.answer);
  if (v.certificate) {
    Json sigma = Json::object();
    for (std::size_t i = 0; i < v.certificate->sigma.size(); ++i)
      sigma[p.states()[i]] = q.states()[v.certificate->sigma[i]];
    out["sigma"] = sigma;
    out["mode"] = to_string(v.certificate->mode);
    out["cutoff"] = v.certificate->mode == CertificateMode::RatioUpToN ? Json(v.certificate->cutoff) : Json(nullptr);
  } else {
    out["sigma"] = nullptr;
    out["mode"] = nullptr;
    out["cutoff"] = nullptr;
  }
  out["reason"] = v.reason;
  if (v.violation) {
    const auto& w = *v.violation;
    out["violation"] = {{"n", w.n},
                        {"m", w.m},
                        {"i", p.states()[w.i]},
                        {"j", p.states()[w.j]},
                        {"k", p.states()[w.k]}};
  }
  return out;
}

Json invariant_json(const CuntzInvariant& inv) {
  Json blocks = Json::array();
  for (const auto& b : inv.blocks) {
    Json entry{{"size", b.size}, {"period", b.period}, {"residue_sizes", b.residue_sizes}};
    entry["q"] = b.balanced ? Json(b.quotient) : Json(nullptr);
    blocks.push_back(entry);
  }
  return {{"block_sizes", inv.block_sizes},
          {"blocks", blocks},
          {"presentation", presentation(inv)},
          {"note", presentation_note(inv)}};
}

}  // namespace sps::cli
