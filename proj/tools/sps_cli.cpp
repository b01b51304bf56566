#include "report.hpp"

#include "sps/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

using namespace sps;
using sps::cli::Json;
using sps::cli::Report;

namespace {

constexpr int kExitUnknown = 2;

struct AnalyzeOptions {
  std::string file;
  bool regularity = false;
  bool cyclic = false;
  bool stationary = false;
};

struct CompareOptions {
  std::string first;
  std::string second;
  std::string mode;
  int max_degree = 12;
};

struct FockOptions {
  std::string file;
  int degree = 16;
  std::string check;
  double tol = 1e-9;
};

int run_analyze(const AnalyzeOptions& o, Report& report) {
  const auto p = load(o.file);
  report.add_input(o.file);
  report.command = {{"name", "analyze"},
                    {"regularity", o.regularity},
                    {"cyclic", o.cyclic},
                    {"stationary", o.stationary}};

  const auto dec = communicating_classes(p);
  const auto cls = classify(p);
  Json& r = report.results;
  r["states"] = p.states();
  r["classification"] = cli::classification_json(p, cls);

  Json stationary_json = Json::array();
  Json cyclic = Json::array();
  Json limits = Json::array();
  for (std::size_t c = 0; c < dec.classes.size(); ++c) {
    if (!dec.essential[c]) continue;
    const auto& block = dec.classes[c];
    const auto sub = p.restricted(block);
    const auto pi = sps::stationary(sub);
    stationary_json.push_back({{"states", cli::labels(p, block)}, {"weights", cli::weights(p, block, pi.weights)}});
    if (o.cyclic) cyclic.push_back(cli::cyclic_json(p, block, cyclic_decomposition(sub)));
    if (o.stationary) {
      Json rows = Json::array();
      for (std::size_t a = 0; a < block.size(); ++a)
        for (std::size_t b = 0; b < block.size(); ++b) {
          const auto lp = limit_profile(sub, static_cast<Index>(a), static_cast<Index>(b));
          rows.push_back({{"i", p.states()[block[a]]},
                          {"j", p.states()[block[b]]},
                          {"residue", lp.residue},
                          {"limit", to_string(lp.limit)}});
        }
      limits.push_back({{"states", cli::labels(p, block)}, {"profile", rows}});
    }
  }
  r["stationary"] = stationary_json;
  if (o.cyclic) r["cyclic"] = cyclic;
  if (o.stationary) r["limit_profiles"] = limits;
  if (!cls.essential) report.warnings.push_back("inessential classes have no stationary distribution; omitted");

  if (o.regularity) {
    const auto sr = singularity_report(p);
    r["regularity"] = cli::regularity_json(p, sr);
    report.warnings.push_back("streamlined witnesses searched up to length " + std::to_string(sr.cap));
  }
  return 0;
}

int run_compare(const CompareOptions& o, Report& report) {
  const auto p = load(o.first);
  const auto q = load(o.second);
  report.add_input(o.first);
  report.add_input(o.second);
  report.command = {{"name", "compare"}, {"mode", o.mode}, {"max_degree", o.max_degree}};

  Verdict v;
  const bool uses_cutoff = o.mode == "eq31" || o.mode == "isometric";
  if (uses_cutoff)
    report.warnings.push_back("ratio identity checked for total degree <= " + std::to_string(o.max_degree) +
                              (o.max_degree == 12 ? " (default)" : ""));

  auto guarded = [&](auto&& search) {
    if (p.size() != q.size())
      return Verdict{Answer::No, std::nullopt,
                     "state counts differ (" + std::to_string(p.size()) + " vs " + std::to_string(q.size()) + ")",
                     std::nullopt};
    return search();
  };

  if (o.mode == "graph") {
    v = guarded([&] { return find_graph_iso(p, q); });
  } else if (o.mode == "weighted") {
    v = guarded([&] { return find_weighted_iso(p, q); });
  } else if (o.mode == "eq31") {
    v = guarded([&] { return find_ratio_iso(p, q, o.max_degree); });
  } else if (o.mode == "isometric") {
    v = decide_isometric(p, q, o.max_degree);
  } else if (o.mode == "algebraic") {
    v = decide_algebraic(p, q);
  } else {
    v = decide_cuntz_iso(p, q);
    report.results["invariants"] = {cli::invariant_json(cuntz_invariant(p)), cli::invariant_json(cuntz_invariant(q))};
  }
  report.results["verdict"] = cli::verdict_json(p, q, v);
  if (v.answer == Answer::Unknown) {
    report.warnings.push_back("UNKNOWN: " + v.reason);
    return kExitUnknown;
  }
  return 0;
}

Json coisometry_table(const StochasticMatrix& p, int cap) {
  const ArvSystem arv(p, cap);
  Json rows = Json::array();
  Rational worst = 0;
  for (int total = 2; total <= cap; ++total)
    for (int n = 1; n < total; ++n) {
      const Rational d = coisometry_defect(arv, n, total - n);
      worst = std::max(worst, d);
      rows.push_back({{"n", n}, {"m", total - n}, {"defect", to_string(d)}});
    }
  return {{"table", rows}, {"max_defect", to_string(worst)}, {"exact_zero", worst == 0}};
}

int run_fock(const FockOptions& o, Report& report) {
  const auto p = load(o.file);
  report.add_input(o.file);
  report.command = {{"name", "fock"}, {"degree", o.degree}, {"check", o.check}, {"tol", o.tol}};
  report.warnings.push_back("truncation cap N=" + std::to_string(o.degree) + (o.degree == 16 ? " (default)" : ""));
  std::ostringstream tol;
  tol << "tolerance " << o.tol << (o.tol == 1e-9 ? " (default)" : "");
  report.warnings.push_back(tol.str());

  Json& r = report.results;
  const int cap = o.degree;

  if (o.check == "coisometry") {
    r["coisometry"] = coisometry_table(p, cap);
    return 0;
  }

  if (o.check == "qprojection") {
    const TruncatedFock fock(p, cap);
    Index total_dim = 0;
    for (int n = 0; n <= cap; ++n) total_dim += fock.dim(n);
    const bool numeric = total_dim <= 256;
    if (!numeric) report.warnings.push_back("numeric cross-check skipped: Fock dimension above 256");
    Json rows = Json::array();
    Rational worst = 0;
    for (int n = 0; n <= cap; ++n) {
      const Rational d = q_projection_identity(fock, n);
      worst = std::max(worst, d);
      Json row{{"n", n}, {"defect", to_string(d)}};
      if (numeric) row["numeric_defect"] = q_projection_numeric(fock, n);
      rows.push_back(row);
    }
    r["qprojection"] = {{"table", rows}, {"max_defect", to_string(worst)}, {"exact_zero", worst == 0}};
    return 0;
  }

  if (o.check == "adjoint") {
    const TruncatedFock fock(p, cap);
    Json rows = Json::array();
    double worst = 0.0;
    for (int n = 1; n <= std::min(cap, 3); ++n) {
      double here = 0.0;
      for (const auto& [i, j] : fock.support(n).pairs) {
        const auto s = shift(fock, Fiber::unit(fock.support(n), i, j));
        here = std::max(here, op_norm(adjoint(s) - s.conjugate_transpose()));
      }
      worst = std::max(worst, here);
      rows.push_back({{"n", n}, {"max_defect", here}});
    }
    r["adjoint"] = {{"table", rows}, {"max_defect", worst}, {"within_tol", worst < o.tol}};
    return 0;
  }

  if (o.check == "cesaro") {
    const TruncatedFock fock(p, cap);
    FockOperator t(fock);
    for (int n = 1; n <= std::min(cap, 3); ++n)
      for (const auto& [i, j] : fock.support(n).pairs) t = t + shift(fock, Fiber::unit(fock.support(n), i, j));
    Json rows = Json::array();
    bool monotone = true;
    double previous = 0.0;
    for (int m = 0; m <= cap; ++m) {
      const double d = op_norm(cesaro(t, m) - t);
      if (m > 0 && d > previous + o.tol) monotone = false;
      previous = d;
      rows.push_back({{"M", m}, {"defect", d}});
    }
    r["cesaro"] = {{"table", rows}, {"non_increasing", monotone}};
    if (!monotone) {
      report.warnings.push_back("Cesaro defect increased somewhere in the window");
      return kExitUnknown;
    }
    return 0;
  }

  if (o.check == "cm") {
    const auto table = cm_convergence(p, 1, cap);
    Json rows = Json::array();
    for (std::size_t a = 0; a < table.degrees.size(); ++a) {
      const auto [i, j, k] = table.argmax[a];
      rows.push_back({{"m", table.degrees[a]},
                      {"max", table.max_value[a]},
                      {"argmax", {p.states()[i], p.states()[j], p.states()[k]}}});
    }
    r["cm"] = {{"n", table.n},
               {"table", rows},
               {"first_below", table.first_below ? Json(*table.first_below) : Json(nullptr)},
               {"threshold", table.threshold},
               {"converged", table.converged}};
    report.warnings.push_back("window m <= " + std::to_string(cap) + " is a truncation; convergence is judged on it");
    return table.converged ? 0 : kExitUnknown;
  }

  // twgap
  const auto sp = support(p, 1);
  Json rows = Json::array();
  bool all = true;
  for (const auto& [i, j] : sp.pairs) {
    const auto seq = tw_gap(p, Fiber::unit(sp, i, j), cap);
    all = all && seq.converged;
    rows.push_back({{"i", p.states()[i]},
                    {"j", p.states()[j]},
                    {"values", seq.values},
                    {"last", seq.estimate},
                    {"converged", seq.converged}});
  }
  r["twgap"] = {{"window", cap}, {"symbols", rows}, {"converged", all}};
  report.warnings.push_back("window m <= " + std::to_string(cap) + " is a truncation; convergence is judged on it");
  return all ? 0 : kExitUnknown;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subproduct systems of stochastic matrices: structure, Fock calculus, isomorphism decisions"};
  app.require_subcommand(1);

  AnalyzeOptions analyze;
  auto* a = app.add_subcommand("analyze", "Class structure, periods, stationary vectors");
  a->add_option("file", analyze.file, "Matrix JSON")->required();
  a->add_flag("--regularity", analyze.regularity, "Reducing states, streamlined cycles, candidate classes");
  a->add_flag("--cyclic", analyze.cyclic, "Cyclic decomposition of each essential class");
  a->add_flag("--stationary", analyze.stationary, "Limit profiles of each essential class");

  CompareOptions compare;
  auto* c = app.add_subcommand("compare", "Decide an isomorphism question for two matrices");
  c->add_option("first", compare.first, "Matrix JSON for P")->required();
  c->add_option("second", compare.second, "Matrix JSON for Q")->required();
  c->add_option("--mode", compare.mode, "Question to decide")
      ->required()
      ->check(CLI::IsMember({"graph", "weighted", "eq31", "isometric", "algebraic", "cuntz"}));
  c->add_option("--max-degree", compare.max_degree, "Cutoff for the ratio identity")
      ->check(CLI::Range(2, 1000))
      ->capture_default_str();

  FockOptions fock;
  auto* f = app.add_subcommand("fock", "Truncated Fock-module checks");
  f->add_option("file", fock.file, "Matrix JSON")->required();
  f->add_option("--degree", fock.degree, "Truncation cap N")->check(CLI::Range(1, 32))->capture_default_str();
  f->add_option("--check", fock.check, "Check to run")
      ->required()
      ->check(CLI::IsMember({"coisometry", "qprojection", "adjoint", "cesaro", "cm", "twgap"}));
  f->add_option("--tol", fock.tol, "Numeric tolerance")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  Report report;
  int code = 0;
  try {
    if (*a) code = run_analyze(analyze, report);
    if (*c) code = run_compare(compare, report);
    if (*f) code = run_fock(fock, report);
  } catch (const sps::Error& e) {
    std::cerr << e.kind() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << report.to_json().dump(2) << "\n";
  return code;
}
