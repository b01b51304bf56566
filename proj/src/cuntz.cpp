#include "sps/cuntz.hpp"

#include "sps/errors.hpp"

#include <algorithm>
#include <tuple>

namespace sps {

CuntzInvariant cuntz_invariant(const StochasticMatrix& p) {
  const auto dec = communicating_classes(p);
  if (!dec.all_essential()) throw NotEssential("matrix has an inessential class");

  CuntzInvariant out;
  for (const auto& cls : dec.classes) {
    BlockData b;
    b.size = static_cast<Index>(cls.size());
    b.states = cls;
    const auto cyc = cyclic_decomposition(p.restricted(cls));
    b.period = cyc.period;
    for (const auto& r : cyc.residue_classes) b.residue_sizes.push_back(static_cast<Index>(r.size()));
    // The starting residue depends on labelling; keep the smallest rotation.
    auto best = b.residue_sizes;
    for (std::size_t k = 1; k < b.residue_sizes.size(); ++k) {
      std::rotate(b.residue_sizes.begin(), b.residue_sizes.begin() + 1, b.residue_sizes.end());
      best = std::min(best, b.residue_sizes);
    }
    b.residue_sizes = best;
    b.balanced = std::adjacent_find(b.residue_sizes.begin(), b.residue_sizes.end(), std::not_equal_to<>()) ==
                 b.residue_sizes.end();
    b.quotient = b.balanced ? b.size / b.period : 0;
    out.blocks.push_back(std::move(b));
  }
  std::stable_sort(out.blocks.begin(), out.blocks.end(),
                   [](const BlockData& x, const BlockData& y) {
                     return std::tie(x.size, x.period, x.residue_sizes) < std::tie(y.size, y.period, y.residue_sizes);
                   });
  for (const auto& b : out.blocks) out.block_sizes.push_back(b.size);
  return out;
}

std::string presentation(const CuntzInvariant& inv) {
  std::string body;
  for (std::size_t k = 0; k < inv.block_sizes.size(); ++k) {
    if (k > 0) body += " ⊕ ";
    body += inv.block_sizes[k] == 1 ? std::string("C") : "M_" + std::to_string(inv.block_sizes[k]);
  }
  return "C(T; " + body + ")";
}

std::string presentation(const StochasticMatrix& p) {
  return presentation(cuntz_invariant(p));
}

std::string presentation_note(const CuntzInvariant& inv) {
  std::string out;
  for (std::size_t k = 0; k < inv.blocks.size(); ++k) {
    const auto& b = inv.blocks[k];
    if (k > 0) out += "; ";
    out += "r=" + std::to_string(b.period) + ", ";
    if (b.balanced) {
      out += "q=" + std::to_string(b.quotient);
    } else {
      out += "residue sizes";
      for (std::size_t j = 0; j < b.residue_sizes.size(); ++j)
        out += (j == 0 ? " " : "/") + std::to_string(b.residue_sizes[j]);
    }
  }
  return out;
}

Verdict decide_cuntz_iso(const StochasticMatrix& p, const StochasticMatrix& q) {
  const auto a = cuntz_invariant(p);
  const auto b = cuntz_invariant(q);
  if (a.block_sizes != b.block_sizes)
    return {Answer::No, std::nullopt, "block sizes differ: " + presentation(a) + " vs " + presentation(b),
            std::nullopt};

  // Pair blocks of equal size in sorted order and match states inside each pair.
  Permutation sigma(static_cast<std::size_t>(p.size()), -1);
  for (std::size_t k = 0; k < a.blocks.size(); ++k)
    for (std::size_t s = 0; s < a.blocks[k].states.size(); ++s) sigma[a.blocks[k].states[s]] = b.blocks[k].states[s];
  return {Answer::Yes, SimilarityCertificate{sigma, CertificateMode::BlockSizes, 0, std::nullopt},
          "equal block sizes " + presentation(a), std::nullopt};
}

}  // namespace sps
