#include "epmat/consensus.hpp"
#include "epmat/ep.hpp"
#include "epmat/expm.hpp"
#include "epmat/io.hpp"
#include "epmat/lcp.hpp"
#include "epmat/minor.hpp"
#include "epmat/pclass.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using json = nlohmann::ordered_json;
using namespace epmat;

constexpr const char* kVersion = "1.0.0";

struct Common {
  std::string format = "human";
  double tol = kDefaultTolBase;
};

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += " ";
    s += argv[i];
  }
  return s;
}

json json_of(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json json_of(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json json_of(const IndexSet& s) {
  json out = json::array();
  for (int e : s.elems()) out.push_back(e);
  return out;
}

json json_of(const PVerdict& v) {
  json out;
  out["is_p"] = v.is_p;
  out["min_principal_minor"] = v.min_principal_minor;
  out["tolerance_used"] = v.tolerance_used;
  out["marginal"] = v.marginal;
  if (v.failing_minor) {
    out["failing_minor"] = {{"alpha", json_of(v.failing_minor->first)},
                            {"value", v.failing_minor->second}};
  }
  return out;
}

json json_of(const EPCertificate& c) {
  json out;
  out["kind"] = to_string(c.kind);
  if (c.kind == EPCertificateKind::TransformOf) {
    out["transform"] = to_string(c.transform);
    if (c.transform == EPTransform::scale) {
      out["scale_factor"] = c.scale_factor;
    }
  }
  out["matrix"] = json_of(c.matrix);
  if (c.diagonal.size() > 0) out["diagonal"] = json_of(c.diagonal);
  if (!c.permutation.empty()) out["permutation"] = c.permutation;
  if (!c.block_sizes.empty()) out["block_sizes"] = c.block_sizes;
  if (c.eigenvectors.size() > 0) {
    out["eigenvectors"] = json_of(c.eigenvectors);
  }
  if (c.eigenvalues.size() > 0) out["eigenvalues"] = json_of(c.eigenvalues);
  if (c.eigenvectors.size() > 0) {
    out["basis_determinant"] = c.basis_determinant;
  }
  if (!c.r_tables.empty()) {
    json tables = json::array();
    for (const Matrix& R : c.r_tables) tables.push_back(json_of(R));
    out["r_tables"] = std::move(tables);
  }
  if (!c.children.empty()) {
    json kids = json::array();
    for (const EPCertificate& k : c.children) kids.push_back(json_of(k));
    out["children"] = std::move(kids);
  }
  return out;
}

json json_of(const EPVerdict& v) {
  json out;
  out["status"] = to_string(v.status);
  out["complex_spectrum"] = v.complex_spectrum;
  if (v.certificate) {
    out["certificate_summary"] = v.certificate->summary();
    out["certificate"] = json_of(*v.certificate);
  }
  if (v.witness) {
    out["witness"] = {{"t", v.witness->t},
                      {"alpha", json_of(v.witness->alpha)},
                      {"minor_value", v.witness->minor_value}};
  }
  if (v.evidence.points > 0) {
    out["evidence"] = {{"t_min", v.evidence.t_min},
                       {"t_max", v.evidence.t_max},
                       {"points", v.evidence.points},
                       {"min_minor", v.evidence.min_minor},
                       {"min_minor_t", v.evidence.min_minor_t},
                       {"truncated", v.evidence.truncated}};
  }
  if (!v.notes.empty()) out["notes"] = v.notes;
  return out;
}

json input_entry(const std::string& path, const std::string& name, int n) {
  return {{"path", path},
          {"digest", file_digest(path)},
          {"name", name},
          {"n", n}};
}

void emit(const Common& common, json& report,
          const std::function<void()>& human,
          std::chrono::steady_clock::time_point start) {
  report["timing_ms"] =
      std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - start)
          .count();
  if (common.format == "machine") {
    std::cout << report.dump(2) << "\n";
  } else {
    human();
  }
}

const char* yesno(bool b) { return b ? "yes" : "no"; }

// ---------------------------------------------------------------- pcheck

int run_pcheck(const Common& common, const std::string& cmdline,
               const std::string& path, int trials, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const NamedMatrix doc = read_matrix_file(path);
  const Matrix& A = doc.value;
  const int n = static_cast<int>(A.rows());

  json report;
  report["command"] = cmdline;
  report["version"] = kVersion;
  report["tolerance"] = common.tol;
  report["seed"] = seed;
  report["inputs"] = {{"matrix", input_entry(path, doc.name, n)}};

  const PVerdict p = is_p_matrix(A, common.tol);
  report["p"] = json_of(p);
  report["p0"] = is_p0_matrix(A, common.tol);
  report["q"] = is_q_matrix(A, common.tol);

  std::optional<bool> sign_sym;
  if (n <= kMaxSignSymmetryOrder) {
    sign_sym = is_sign_symmetric(A, common.tol);
    report["sign_symmetric"] = *sign_sym;
  } else {
    report["sign_symmetric"] = nullptr;
  }

  const KelloggResult kw = kellogg_wedge_check(A, common.tol);
  report["kellogg"] = {{"passes", kw.passes}};
  if (kw.violating_eigenvalue) {
    report["kellogg"]["violating_eigenvalue"] = {
        {"re", kw.violating_eigenvalue->real()},
        {"im", kw.violating_eigenvalue->imag()}};
  }

  std::optional<SignReversalWitness> wit;
  if (!p.is_p) {
    wit = sign_reversal_search(A, trials, seed);
    if (wit) {
      report["sign_reversal_witness"] = {{"x", json_of(wit->x)},
                                         {"products", json_of(wit->products)}};
    }
  }

  const auto horizon = nonneg_horizon(A);
  if (horizon) {
    report["nonneg_horizon"] = *horizon;
  } else {
    report["nonneg_horizon"] = nullptr;
  }

  emit(common, report,
       [&] {
         std::cout << "matrix " << doc.name << " (n=" << n << ")\n";
         std::cout << "P: " << yesno(p.is_p)
                   << "  min principal minor " << format_double(p.min_principal_minor);
         if (p.failing_minor) {
           std::cout << "  failing alpha "
                     << p.failing_minor->first.to_string() << " = "
                     << format_double(p.failing_minor->second);
         }
         if (p.marginal) std::cout << "  [marginal]";
         std::cout << "\n";
         std::cout << "P0: " << yesno(report["p0"].get<bool>()) << "\n";
         std::cout << "Q: " << yesno(report["q"].get<bool>()) << "\n";
         if (sign_sym) {
           std::cout << "sign-symmetric: " << yesno(*sign_sym) << "\n";
         } else {
           std::cout << "sign-symmetric: skipped (n > "
                     << kMaxSignSymmetryOrder << ")\n";
         }
         std::cout << "Kellogg wedge: " << (kw.passes ? "pass" : "FAIL");
         if (kw.violating_eigenvalue) {
           std::cout << "  at " << format_double(kw.violating_eigenvalue->real())
                     << (kw.violating_eigenvalue->imag() >= 0 ? "+" : "")
                     << format_double(kw.violating_eigenvalue->imag()) << "i";
         }
         std::cout << "\n";
         if (wit) {
           std::cout << "sign-reversal witness x = [";
           for (Eigen::Index i = 0; i < wit->x.size(); ++i) {
             if (i) std::cout << ", ";
             std::cout << format_double(wit->x(i));
           }
           std::cout << "]\n";
         }
         if (horizon) {
           std::cout << "nonnegative-matrix horizon: "
                     << format_double(*horizon) << "\n";
         }
       },
       start);
  return 0;
}

// ---------------------------------------------------------------- epcheck

void write_minor_curves(const std::string& path, const Matrix& A,
                        const GridSpec& spec) {
  const int n = static_cast<int>(A.rows());
  if (n > kMaxScreenOrder) {
    throw CapacityError("minor-curve CSV: n > 8 means too many columns");
  }
  const std::vector<double> ts = make_time_grid(spec);
  std::vector<std::string> header{"t"};
  std::vector<IndexSet> cols;
  for (int k = 1; k <= n; ++k) {
    for (const IndexSet& a : enumerate_index_sets(k, n)) {
      header.push_back(a.to_string());
      cols.push_back(a);
    }
  }
  Matrix rows(ts.size(), cols.size() + 1);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    rows(i, 0) = ts[i];
    const Matrix E = expm(A, ts[i]);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      rows(i, j + 1) = minor_of(E, cols[j], cols[j]);
    }
  }
  write_csv(path, header, rows);
}

int run_epcheck(const Common& common, const std::string& cmdline,
                const std::string& path, int grid_points, double t_max,
                bool certificates_only, std::uint64_t seed,
                const std::string& minor_csv) {
  const auto start = std::chrono::steady_clock::now();
  const NamedMatrix doc = read_matrix_file(path);
  const Matrix& A = doc.value;

  ClassifyOptions opt;
  opt.tol_base = common.tol;
  if (grid_points > 0) {
    opt.grid.log_points = grid_points;
    opt.grid.linear_points = grid_points;
  }
  if (t_max > 0) opt.grid.t_max = t_max;
  opt.certificates_only = certificates_only;

  json report;
  report["command"] = cmdline;
  report["version"] = kVersion;
  report["tolerance"] = common.tol;
  report["seed"] = seed;
  report["inputs"] = {
      {"matrix", input_entry(path, doc.name, static_cast<int>(A.rows()))}};

  const EPVerdict v = classify_ep(A, opt);
  report["ep"] = json_of(v);

  if (!minor_csv.empty()) {
    GridSpec spec;
    spec.t_max = t_max > 0 ? t_max : 10.0;
    spec.points = grid_points > 0 ? grid_points : 200;
    write_minor_curves(minor_csv, A, spec);
    report["minor_csv"] = minor_csv;
  }

  const bool cert_ok =
      v.certificate ? v.certificate->verify(common.tol) : false;
  if (v.certificate) report["certificate_verified"] = cert_ok;

  emit(common, report,
       [&] {
         std::cout << "matrix " << doc.name << " (n=" << A.rows() << ")\n";
         std::cout << "verdict: " << to_string(v.status) << "\n";
         if (v.certificate) {
           std::cout << "certificate: " << v.certificate->summary()
                     << (cert_ok ? " (verified)" : " (VERIFY FAILED)")
                     << "\n";
         }
         if (v.complex_spectrum) {
           std::cout << "spectrum: non-real eigenvalue pair present\n";
         }
         if (v.witness) {
           std::cout << "witness: t = " << format_double(v.witness->t)
                     << ", alpha = " << v.witness->alpha.to_string()
                     << ", minor = "
                     << format_double(v.witness->minor_value) << "\n";
         }
         if (v.evidence.points > 0) {
           std::cout << "grid: " << v.evidence.points << " times in ["
                     << format_double(v.evidence.t_min) << ", "
                     << format_double(v.evidence.t_max)
                     << "], min diagonal entry "
                     << format_double(v.evidence.min_minor) << " at t = "
                     << format_double(v.evidence.min_minor_t)
                     << (v.evidence.truncated ? " (overflow-truncated)" : "")
                     << "\n";
         }
         for (const std::string& note : v.notes) {
           std::cout << "note: " << note << "\n";
         }
         if (!minor_csv.empty()) {
           std::cout << "minor curves written to " << minor_csv << "\n";
         }
       },
       start);
  return 0;
}

// ------------------------------------------------------------------- lcp

int run_lcp(const Common& common, const std::string& cmdline,
            const std::string& mpath, const std::string& qpath,
            int random_q, int crosscheck, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const NamedMatrix mdoc = read_matrix_file(mpath);
  const Matrix& M = mdoc.value;

  json report;
  report["command"] = cmdline;
  report["version"] = kVersion;
  report["tolerance"] = common.tol;
  report["seed"] = seed;
  report["inputs"] = {
      {"matrix", input_entry(mpath, mdoc.name, static_cast<int>(M.rows()))}};

  std::optional<LCPResult> direct;
  std::string qname;
  if (!qpath.empty()) {
    const NamedVector qdoc = read_vector_file(qpath);
    qname = qdoc.name;
    report["inputs"]["q"] =
        input_entry(qpath, qdoc.name, static_cast<int>(qdoc.value.size()));
    direct = solve_enumerate(LCPInstance{M, qdoc.value}, common.tol);
    json sols = json::array();
    for (const LCPSolution& s : direct->solutions) {
      sols.push_back({{"z", json_of(s.z)},
                      {"w", json_of(s.w)},
                      {"support", json_of(s.support)},
                      {"degenerate", s.degenerate}});
    }
    report["lcp"] = {{"solutions", std::move(sols)},
                     {"degenerate_family", direct->degenerate_family},
                     {"bases_examined", direct->bases_examined}};
  }

  std::optional<CrosscheckReport> cross;
  const int cross_trials = random_q > 0 ? random_q : crosscheck;
  if (cross_trials > 0) {
    cross = uniqueness_crosscheck(M, cross_trials,
                                  static_cast<unsigned>(seed), common.tol);
    json hist = json::object();
    for (std::size_t m = 0; m < cross->multiplicity_counts.size(); ++m) {
      if (cross->multiplicity_counts[m] > 0) {
        hist[std::to_string(m)] = cross->multiplicity_counts[m];
      }
    }
    report["crosscheck"] = {
        {"trials", cross->trials},
        {"multiplicity_histogram", std::move(hist)},
        {"degenerate_trials", cross->degenerate_trials},
        {"all_unique_nondegenerate", cross->all_unique_nondegenerate}};
  }

  emit(common, report,
       [&] {
         std::cout << "matrix " << mdoc.name << " (n=" << M.rows() << ")\n";
         if (direct) {
           std::cout << "q " << qname << ": " << direct->solutions.size()
                     << " solution(s), " << direct->bases_examined
                     << " bases examined"
                     << (direct->degenerate_family
                             ? ", singular-but-consistent basis seen"
                             : "")
                     << "\n";
           for (const LCPSolution& s : direct->solutions) {
             std::cout << "  z = [";
             for (Eigen::Index i = 0; i < s.z.size(); ++i) {
               if (i) std::cout << ", ";
               std::cout << format_double(s.z(i));
             }
             std::cout << "]  support " << s.support.to_string()
                       << (s.degenerate ? "  [degenerate]" : "") << "\n";
           }
         }
         if (cross) {
           std::cout << "crosscheck over " << cross->trials
                     << " random q: histogram {";
           bool first = true;
           for (std::size_t m = 0; m < cross->multiplicity_counts.size();
                ++m) {
             if (cross->multiplicity_counts[m] == 0) continue;
             if (!first) std::cout << ", ";
             first = false;
             std::cout << m << ": " << cross->multiplicity_counts[m];
           }
           std::cout << "}, degenerate trials "
                     << cross->degenerate_trials << ", unique throughout: "
                     << yesno(cross->all_unique_nondegenerate) << "\n";
         }
       },
       start);
  return 0;
}

// -------------------------------------------------------------- consensus

int run_consensus(const Common& common, const std::string& cmdline,
                  const std::string& path, double t_max_override,
                  int grid_override, int x0_trials, std::uint64_t seed,
                  const std::string& trajectory_csv, int pm_k) {
  const auto start = std::chrono::steady_clock::now();
  Scenario sc = read_scenario_file(path);
  if (t_max_override > 0) sc.grid.t_max = t_max_override;
  if (grid_override > 0) sc.grid.points = grid_override;

  const Matrix L = laplacian(sc.graph);
  const std::vector<double> grid = make_time_grid(sc.grid);

  json report;
  report["command"] = cmdline;
  report["version"] = kVersion;
  report["tolerance"] = common.tol;
  report["seed"] = seed;
  report["inputs"] = {{"scenario", input_entry(path, sc.name, sc.graph.n)}};
  report["laplacian"] = json_of(L);
  report["grid"] = {{"t_max", sc.grid.t_max},
                    {"points", sc.grid.points},
                    {"spacing", to_string(sc.grid.spacing)}};

  ClassifyOptions opt;
  opt.tol_base = common.tol;
  const EPVerdict lv = classify_ep(L, opt);
  report["laplacian_ep"] = json_of(lv);

  const auto audits = audit_sign_nonreversal(L, sc.x0s, grid);
  json jaud = json::array();
  int violations = 0;
  for (const SignReversalAudit& a : audits) {
    json e;
    e["x0"] = json_of(a.x0);
    if (a.first_violation) {
      ++violations;
      e["first_violation"] = {{"t", a.first_violation->t},
                              {"products",
                               json_of(a.first_violation->products)}};
    }
    jaud.push_back(std::move(e));
  }
  report["audits"] = std::move(jaud);
  report["violations"] = violations;

  std::optional<ReversalScenario> hunt;
  if (violations == 0 && lv.status == EPStatus::NotEP &&
      sc.graph.n <= kMaxPrincipalMinorOrder) {
    hunt = find_sign_reversal_scenario(L, grid, x0_trials,
                                       static_cast<unsigned>(seed),
                                       common.tol);
    if (hunt) {
      report["searched_violation"] = {{"x0", json_of(hunt->x0)},
                                      {"t", hunt->t},
                                      {"products",
                                       json_of(hunt->witness.products)}};
    }
  }

  // Consensus value estimate from the slowest mixing mode.
  std::optional<double> lambda2;
  {
    const SpectralInfo info = spectrum(L);
    for (Eigen::Index i = 0; i < info.eigenvalues.size(); ++i) {
      const double re = info.eigenvalues(i).real();
      if (re > 1e-9 * (1.0 + info.spectral_radius)) {
        lambda2 = lambda2 ? std::min(*lambda2, re) : re;
      }
    }
  }
  if (lambda2 && !sc.x0s.empty()) {
    const double T = 50.0 / *lambda2;
    json est = json::array();
    for (const Vector& x0 : sc.x0s) {
      const Vector xT = expm(-L, T) * x0;
      const double c = xT.mean();
      const double dev = (xT.array() - c).abs().maxCoeff();
      est.push_back({{"value", c},
                     {"max_deviation", dev},
                     {"t", T},
                     {"converged", dev <= 1e-6 * std::max(1.0, std::abs(c))}});
    }
    report["consensus_estimates"] = std::move(est);
  }

  if (!trajectory_csv.empty() && !sc.x0s.empty()) {
    std::vector<std::string> header{"t"};
    for (std::size_t v = 0; v < sc.x0s.size(); ++v) {
      for (int i = 1; i <= sc.graph.n; ++i) {
        header.push_back("x" + std::to_string(v + 1) + "_" +
                         std::to_string(i));
      }
    }
    Matrix rows(grid.size(), 1 + sc.x0s.size() * sc.graph.n);
    for (std::size_t r = 0; r < grid.size(); ++r) rows(r, 0) = grid[r];
    for (std::size_t v = 0; v < sc.x0s.size(); ++v) {
      const Matrix traj = simulate(L, sc.x0s[v], grid);
      for (std::size_t r = 0; r < grid.size(); ++r) {
        for (int i = 0; i < sc.graph.n; ++i) {
          rows(r, 1 + v * sc.graph.n + i) = traj(i, r);
        }
      }
    }
    write_csv(trajectory_csv, header, rows);
    report["trajectory_csv"] = trajectory_csv;
  }

  std::optional<PMReport> pm;
  if (pm_k > 0) {
    pm = is_pm_matrix(expm(-L, 1.0), pm_k, common.tol);
    json jpm;
    jpm["is_pm"] = pm->is_pm;
    jpm["k_max"] = pm_k;
    if (pm->failing_power) jpm["failing_power"] = *pm->failing_power;
    report["pm_check"] = std::move(jpm);
  }

  emit(common, report,
       [&] {
         std::cout << "scenario " << sc.name << " (n=" << sc.graph.n << ", "
                   << sc.graph.arcs.size() << " arcs)\n";
         std::cout << "Laplacian EP verdict: " << to_string(lv.status);
         if (lv.certificate) {
           std::cout << " via " << lv.certificate->summary();
         }
         std::cout << "\n";
         std::cout << "audits: " << audits.size() << " initial vector(s), "
                   << violations << " violation(s) on " << grid.size()
                   << " grid times\n";
         for (const SignReversalAudit& a : audits) {
           if (a.first_violation) {
             std::cout << "  violation at t = "
                       << format_double(a.first_violation->t) << " for x0 = [";
             for (Eigen::Index i = 0; i < a.x0.size(); ++i) {
               if (i) std::cout << ", ";
               std::cout << format_double(a.x0(i));
             }
             std::cout << "]\n";
           }
         }
         if (hunt) {
           std::cout << "search found a reversing x0 at t = "
                     << format_double(hunt->t) << "\n";
         }
         if (report.contains("consensus_estimates")) {
           for (const auto& e : report["consensus_estimates"]) {
             std::cout << "consensus estimate " << e["value"].dump()
                       << " (max deviation " << e["max_deviation"].dump()
                       << " at t = " << e["t"].dump() << ")\n";
           }
         }
         if (pm) {
           std::cout << "PM check of exp(-L) up to k=" << pm_k << ": "
                     << yesno(pm->is_pm);
           if (pm->failing_power) {
             std::cout << " (fails at power " << *pm->failing_power << ")";
           }
           std::cout << "\n";
         }
         if (!trajectory_csv.empty()) {
           std::cout << "trajectories written to " << trajectory_csv << "\n";
         }
       },
       start);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"P-matrix and exponential-positivity toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Common common;
  app.add_option("--format", common.format, "Report format")
      ->check(CLI::IsMember({"human", "machine"}))
      ->capture_default_str();
  auto* tol_opt =
      app.add_option("--tol", common.tol,
                     "Base tolerance (env EPMAT_TOL supplies a default)");

  std::string matrix_path, q_path, scenario_path;
  std::string minor_csv, trajectory_csv;
  int trials = 2000, grid_points = 0, random_q = 0, crosscheck = 0;
  int x0_trials = 2000, pm_k = 0;
  double t_max = 0.0;
  bool certificates_only = false;
  std::uint64_t seed = 0;

  CLI::App* pcheck =
      app.add_subcommand("pcheck", "P / P0 / Q / sign-symmetry verdicts");
  pcheck->add_option("matrix", matrix_path, "Matrix file")->required();
  pcheck->add_option("--sign-reversal-trials", trials,
                     "Random trials for the sign-reversal witness search")
      ->capture_default_str();
  pcheck->add_option("--seed", seed, "RNG seed");

  CLI::App* epcheck =
      app.add_subcommand("epcheck", "Exponential-positivity verdict");
  epcheck->add_option("matrix", matrix_path, "Matrix file")->required();
  epcheck->add_option("--grid", grid_points,
                      "Grid points per spacing family (default 512)");
  epcheck->add_option("--t-max", t_max, "Grid horizon (default automatic)");
  epcheck->add_flag("--certificates-only", certificates_only,
                    "Skip the grid falsifier");
  epcheck->add_option("--seed", seed, "RNG seed");
  epcheck->add_option("--minor-csv", minor_csv,
                      "Write principal-minor curves to this CSV");

  CLI::App* lcp = app.add_subcommand(
      "lcp", "Enumerate complementarity solutions for (q, M)");
  lcp->add_option("matrix", matrix_path, "Matrix file (M)")->required();
  lcp->add_option("q", q_path, "Vector file (q)");
  lcp->add_option("--random-q", random_q,
                  "Sample this many standard-normal q and tabulate "
                  "multiplicities");
  lcp->add_option("--crosscheck", crosscheck,
                  "Uniqueness crosscheck trials");
  lcp->add_option("--seed", seed, "RNG seed");

  CLI::App* consensus = app.add_subcommand(
      "consensus", "Audit sign preservation of x' = -Lx over a scenario");
  consensus->add_option("scenario", scenario_path, "Scenario file")
      ->required();
  consensus->add_option("--t-max", t_max, "Override the scenario horizon");
  consensus->add_option("--grid", grid_points,
                        "Override the scenario grid size");
  consensus->add_option("--x0-search-trials", x0_trials,
                        "Trials for the reversing-x0 search")
      ->capture_default_str();
  consensus->add_option("--seed", seed, "RNG seed");
  consensus->add_option("--trajectory-csv", trajectory_csv,
                        "Write trajectories to this CSV");
  consensus->add_option("--pm", pm_k,
                        "Check the PM property of exp(-L) up to this power");

  // global options (--format, --tol) remain usable after the subcommand name
  for (CLI::App* sub : {pcheck, epcheck, lcp, consensus}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    std::cout << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  if (!tol_opt->count()) {
    if (const char* env = std::getenv("EPMAT_TOL")) {
      char* end = nullptr;
      const double v = std::strtod(env, &end);
      if (end == env || *end != '\0' || !(v > 0.0)) {
        std::cerr << "error: EPMAT_TOL is not a positive number: " << env
                  << "\n";
        return 2;
      }
      common.tol = v;
    }
  }

  const std::string cmdline = join_args(argc, argv);
  try {
    if (pcheck->parsed()) {
      return run_pcheck(common, cmdline, matrix_path, trials, seed);
    }
    if (epcheck->parsed()) {
      return run_epcheck(common, cmdline, matrix_path, grid_points, t_max,
                         certificates_only, seed, minor_csv);
    }
    if (lcp->parsed()) {
      if (q_path.empty() && random_q <= 0 && crosscheck <= 0) {
        std::cerr << "error: lcp needs a q file, --random-q, or "
                     "--crosscheck\n";
        return 2;
      }
      return run_lcp(common, cmdline, matrix_path, q_path, random_q,
                     crosscheck, seed);
    }
    if (consensus->parsed()) {
      return run_consensus(common, cmdline, scenario_path, t_max,
                           grid_points, x0_trials, seed, trajectory_csv,
                           pm_k);
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
