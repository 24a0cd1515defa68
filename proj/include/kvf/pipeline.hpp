#pragma once
// Experiment pipeline: a JSON config selects a manifold, a problem ((K) or
// (CK)), an element order and a mesh resolution; the pipeline generates (and
// optionally adapts) the mesh, assembles the pencil, solves for the smallest
// eigenvalues, detects the zero eigenspace and measures errors against the
// catalog's analytic fields.  Writers produce spectrum.csv, fields.vtk,
// report.json and the convergence/orders CSV pair.
//
// Config keys are validated strictly: an unknown key anywhere in the file is
// a config error, raised before any mesh or matrix work starts.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "kvf/adapt.hpp"
#include "kvf/analysis.hpp"
#include "kvf/assemble.hpp"
#include "kvf/lanczos.hpp"
#include "kvf/mesh.hpp"
#include "kvf/meshgen.hpp"
#include "kvf/surfaces.hpp"
#include "kvf/vtk.hpp"

namespace kvf {

// Custom surface of revolution: profile c(t) = (r0 + r1 cos t, z1 sin t).
// Covers tori of arbitrary radii; r0 > |r1| keeps the metric positive and
// r1, z1 != 0 keeps the profile regular.
struct RevolutionSpec {
  double r0 = 2.0, r1 = 1.0, z1 = 1.0;
};

struct ExperimentConfig {
  std::string manifold = "standard_torus";
  std::optional<RevolutionSpec> custom;  // set when "manifold" is an object
  FormKind problem = FormKind::Killing;  // Killing -> (K), Conformal -> (CK)
  ElementType element = ElementType::P2;
  int n = 16;               // structured resolution; curved charts get ~2n^2 triangles
  double target_h = 0.0;    // alternative to n: pick n so max Riemannian edge ~ target_h
  bool use_target_h = false;
  bool adapt = false;
  int adapt_iterations = 10;
  EigOptions eigen;
  bool shift_auto = true;   // no explicit eigen.shift given: scale to sigma ~ -1
  double gap_factor = 1e3;
  bool dump_matrices = false;
  std::string outputs = ".";

  ExperimentConfig() { eigen.k = 8; }
};

inline std::string to_string(FormKind k) {
  switch (k) {
    case FormKind::Mass: return "mass";
    case FormKind::Killing: return "K";
    default: return "CK";
  }
}

namespace detail {

inline void require_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                         const std::string& ctx) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const auto& k : allowed) ok = ok || item.key() == k;
    if (!ok) throw config_error("config: unknown key '" + ctx + item.key() + "'");
  }
}

template <class T>
T get_as(const nlohmann::json& j, const std::string& key, const std::string& ctx) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw config_error("config: bad value for '" + ctx + key + "': " + e.what());
  }
}

}  // namespace detail

inline Manifold make_revolution(const RevolutionSpec& s) {
  if (!(s.r0 - std::abs(s.r1) > 0.0))
    throw config_error("revolution manifold: need r0 > |r1| for a positive radius");
  if (s.r1 == 0.0 || s.z1 == 0.0)
    throw config_error("revolution manifold: need r1 != 0 and z1 != 0 for a regular profile");
  const double r0 = s.r0, r1 = s.r1, z1 = s.z1;
  Manifold m = surface_of_revolution(
      [=](double t) { return r0 + r1 * std::cos(t); }, [=](double t) { return z1 * std::sin(t); },
      [=](double t) { return -r1 * std::sin(t); }, [=](double t) { return z1 * std::cos(t); },
      [=](double t) { return -r1 * std::cos(t); }, [=](double t) { return -z1 * std::sin(t); });
  char buf[96];
  std::snprintf(buf, sizeof buf, "revolution(r0=%g,r1=%g,z1=%g)", r0, r1, z1);
  m.name = buf;
  return m;
}

inline Manifold make_manifold(const ExperimentConfig& cfg) {
  if (cfg.custom) return make_revolution(*cfg.custom);
  return catalog(cfg.manifold);
}

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  if (!j.is_object()) throw config_error("config: top level must be a JSON object");
  detail::require_keys(j,
                       {"manifold", "problem", "element", "n", "target_h", "adapt",
                        "adapt_iterations", "eigen", "gap_factor", "dump_matrices", "outputs"},
                       "");
  ExperimentConfig cfg;

  if (j.contains("manifold")) {
    const auto& m = j.at("manifold");
    if (m.is_string()) {
      cfg.manifold = m.get<std::string>();
    } else if (m.is_object()) {
      detail::require_keys(m, {"type", "r0", "r1", "z1"}, "manifold.");
      const auto type = detail::get_as<std::string>(m, "type", "manifold.");
      if (type != "revolution")
        throw config_error("config: manifold.type '" + type + "' (only 'revolution' is supported)");
      RevolutionSpec s;
      if (m.contains("r0")) s.r0 = detail::get_as<double>(m, "r0", "manifold.");
      if (m.contains("r1")) s.r1 = detail::get_as<double>(m, "r1", "manifold.");
      if (m.contains("z1")) s.z1 = detail::get_as<double>(m, "z1", "manifold.");
      cfg.custom = s;
      char buf[96];
      std::snprintf(buf, sizeof buf, "revolution(r0=%g,r1=%g,z1=%g)", s.r0, s.r1, s.z1);
      cfg.manifold = buf;
    } else {
      throw config_error("config: 'manifold' must be a name or a {type: revolution, ...} object");
    }
  }

  if (j.contains("problem")) {
    const auto p = detail::get_as<std::string>(j, "problem", "");
    if (p == "K") cfg.problem = FormKind::Killing;
    else if (p == "CK") cfg.problem = FormKind::Conformal;
    else throw config_error("config: problem must be \"K\" or \"CK\", got \"" + p + "\"");
  }
  if (j.contains("element")) {
    const auto e = detail::get_as<std::string>(j, "element", "");
    if (e == "P1") cfg.element = ElementType::P1;
    else if (e == "P2") cfg.element = ElementType::P2;
    else throw config_error("config: element must be \"P1\" or \"P2\", got \"" + e + "\"");
  }
  if (j.contains("n") && j.contains("target_h"))
    throw config_error("config: give either 'n' or 'target_h', not both");
  if (j.contains("n")) {
    cfg.n = detail::get_as<int>(j, "n", "");
    if (cfg.n < 1) throw config_error("config: n must be >= 1");
  }
  if (j.contains("target_h")) {
    cfg.target_h = detail::get_as<double>(j, "target_h", "");
    if (!(cfg.target_h > 0.0)) throw config_error("config: target_h must be positive");
    cfg.use_target_h = true;
  }
  if (j.contains("adapt")) cfg.adapt = detail::get_as<bool>(j, "adapt", "");
  if (j.contains("adapt_iterations")) {
    cfg.adapt_iterations = detail::get_as<int>(j, "adapt_iterations", "");
    if (cfg.adapt_iterations < 1) throw config_error("config: adapt_iterations must be >= 1");
  }
  if (j.contains("eigen")) {
    const auto& e = j.at("eigen");
    if (!e.is_object()) throw config_error("config: 'eigen' must be an object");
    detail::require_keys(e,
                         {"k", "tol", "shift", "block_size", "max_iterations", "max_basis",
                          "dense_cutoff", "force_dense", "seed"},
                         "eigen.");
    if (e.contains("k")) cfg.eigen.k = detail::get_as<int>(e, "k", "eigen.");
    if (e.contains("tol")) cfg.eigen.tol = detail::get_as<double>(e, "tol", "eigen.");
    if (e.contains("shift")) {
      cfg.eigen.shift = detail::get_as<double>(e, "shift", "eigen.");
      cfg.shift_auto = false;
      if (!(cfg.eigen.shift < 0.0)) throw config_error("config: eigen.shift must be negative");
    }
    if (e.contains("block_size")) cfg.eigen.block_size = detail::get_as<int>(e, "block_size", "eigen.");
    if (e.contains("max_iterations"))
      cfg.eigen.max_iterations = detail::get_as<int>(e, "max_iterations", "eigen.");
    if (e.contains("max_basis")) cfg.eigen.max_basis = detail::get_as<int>(e, "max_basis", "eigen.");
    if (e.contains("dense_cutoff"))
      cfg.eigen.dense_cutoff = detail::get_as<int>(e, "dense_cutoff", "eigen.");
    if (e.contains("force_dense"))
      cfg.eigen.force_dense = detail::get_as<bool>(e, "force_dense", "eigen.");
    if (e.contains("seed")) cfg.eigen.seed = detail::get_as<std::uint64_t>(e, "seed", "eigen.");
    if (cfg.eigen.k < 1) throw config_error("config: eigen.k must be >= 1");
    if (!(cfg.eigen.tol > 0.0)) throw config_error("config: eigen.tol must be positive");
  }
  if (j.contains("gap_factor")) {
    cfg.gap_factor = detail::get_as<double>(j, "gap_factor", "");
    if (!(cfg.gap_factor > 1.0)) throw config_error("config: gap_factor must exceed 1");
  }
  if (j.contains("dump_matrices")) cfg.dump_matrices = detail::get_as<bool>(j, "dump_matrices", "");
  if (j.contains("outputs")) cfg.outputs = detail::get_as<std::string>(j, "outputs", "");
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw config_error("config: cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw config_error("config: " + path + " is not valid JSON: " + e.what());
  }
  return parse_experiment_config(j);
}

// --- mesh construction -----------------------------------------------------

namespace detail {

inline double riemannian_area(const Triangulation& tri, const MetricField& metric) {
  const auto& rule = triangle_rule_deg5();
  double area = 0.0;
  for (std::size_t t = 0; t < tri.triangles.size(); ++t) {
    const ElemGeom eg = elem_geom(tri, int(t));
    for (const auto& qp : rule) {
      const Vec2 x{qp.l1 * eg.p0.x + qp.l2 * eg.p1.x + qp.l3 * eg.p2.x,
                   qp.l1 * eg.p0.y + qp.l2 * eg.p1.y + qp.l3 * eg.p2.y};
      area += qp.w * eg.area * std::sqrt(det(metric.g(x)));
    }
  }
  return area;
}

// Resolution giving max Riemannian edge <= target on a structured grid of the
// rectangular chart; for curved charts, the triangle count whose uniform h
// matches the target.
inline int resolution_for_target(const ChartDomain& dom, const MetricField& metric, double target) {
  if (dom.kind == ChartDomain::Kind::Rect) {
    const double s1 = dom.hi.x - dom.lo.x, s2 = dom.hi.y - dom.lo.y;
    double worst = 0.0;
    const int probe = 48;
    for (int i = 0; i <= probe; ++i)
      for (int j = 0; j <= probe; ++j) {
        const Vec2 x{dom.lo.x + s1 * i / probe, dom.lo.y + s2 * j / probe};
        const Sym2 g = metric.g(x);
        // longest grid edge at unit resolution: the diagonal
        const double diag =
            std::sqrt(g.a11 * s1 * s1 + 2.0 * std::abs(g.a12) * s1 * s2 + g.a22 * s2 * s2);
        worst = std::max({worst, diag, std::sqrt(g.a11) * s1, std::sqrt(g.a22) * s2});
      }
    int n = std::max(1, int(std::ceil(worst / target)));
    if (dom.identification == Gluing::KleinFlip && n % 2) ++n;
    return n;
  }
  Triangulation probe = generate_structured(dom, 8);
  const double area = riemannian_area(probe, metric);
  const double tris = 4.0 * area / (std::sqrt(3.0) * target * target);
  return std::max(2, int(std::lround(std::sqrt(tris / 2.0))));
}

// Adapt while holding the triangle count near the unadapted mesh, so adapted
// and unadapted runs are comparable: pick target_h from the Riemannian area,
// then rescale and retry until the count lands within 10%.
inline Triangulation adapt_to_count(const Triangulation& base, const MetricField& metric,
                                    const ChartDomain& chart, int iterations) {
  const double want = double(base.triangles.size());
  const double area = riemannian_area(base, metric);
  double h = std::sqrt(4.0 * area / (std::sqrt(3.0) * want));
  Triangulation out = base;
  for (int attempt = 0; attempt < 4; ++attempt) {
    out = adapt(base, metric, h, chart, iterations);
    const double ratio = double(out.triangles.size()) / want;
    if (std::abs(ratio - 1.0) <= 0.10) break;
    h *= std::sqrt(ratio);
  }
  return out;
}

}  // namespace detail

inline Triangulation build_mesh(const Manifold& m, const ExperimentConfig& cfg) {
  const int n = cfg.use_target_h
                    ? detail::resolution_for_target(m.chart, m.metric, cfg.target_h)
                    : cfg.n;
  Triangulation tri = generate_structured(m.chart, n);
  if (cfg.adapt) tri = detail::adapt_to_count(tri, m.metric, m.chart, cfg.adapt_iterations);
  return tri;
}

// --- solve -----------------------------------------------------------------

struct FieldError {
  std::string name;
  double l2_rel = 0.0, h1_rel = 0.0;
};

struct SolveResult {
  Manifold manifold;
  Triangulation mesh;
  DofMap dm;
  EdgeLengthStats edges;
  double min_quality = 0.0;
  Spectrum spectrum;
  ZeroModes zero;
  std::vector<DiscreteField> zero_fields;
  std::vector<FieldError> errors;           // per analytic field, when available
  std::vector<double> ricci_residuals;      // per zero mode
};

inline SolveResult run_solve(const ExperimentConfig& cfg) {
  SolveResult r;
  r.manifold = make_manifold(cfg);
  r.mesh = build_mesh(r.manifold, cfg);
  r.edges = riemannian_edge_stats(r.mesh, r.manifold.metric);
  r.min_quality = min_quality(r.mesh, r.manifold.metric);
  r.dm = build_dofmap(r.mesh, cfg.element, r.manifold.chart);

  const SymSparseMatrix M = assemble_mass(r.mesh, r.dm, r.manifold.metric);
  const SymSparseMatrix A = (cfg.problem == FormKind::Conformal)
                                ? assemble_conformal(r.mesh, r.dm, r.manifold.metric)
                                : assemble_killing(r.mesh, r.dm, r.manifold.metric);

  EigOptions eo = cfg.eigen;
  eo.k = std::min(eo.k, M.n);
  if (cfg.shift_auto) {
    // sigma = shift * mean(diag A / diag M); aim for sigma ~ -1 so the
    // shift-invert spectrum stays well separated near zero.
    const auto da = A.diagonal(), dmg = M.diagonal();
    double mean = 0.0;
    for (int i = 0; i < M.n; ++i) {
      if (!(dmg[i] > 0.0)) throw numerical_error("mass matrix has a nonpositive diagonal entry");
      mean += da[i] / dmg[i];
    }
    mean /= double(M.n);
    eo.shift = -1.0 / std::max(mean, 1.0);
  }

  r.spectrum = solve_smallest(A, M, eo);
  r.zero = zero_eigenspace(r.spectrum, M, cfg.gap_factor);
  for (const auto& v : r.zero.basis) r.zero_fields.push_back(DiscreteField{v});

  std::vector<AnalyticVectorField> exact = r.manifold.known_killing;
  if (cfg.problem == FormKind::Conformal)
    exact.insert(exact.end(), r.manifold.known_conformal_killing.begin(),
                 r.manifold.known_conformal_killing.end());

  if (!exact.empty() && !r.zero_fields.empty()) {
    const auto l2 =
        subspace_error(r.zero_fields, exact, r.mesh, r.dm, r.manifold.metric, NormKind::L2);
    const auto h1 =
        subspace_error(r.zero_fields, exact, r.mesh, r.dm, r.manifold.metric, NormKind::H1);
    for (std::size_t i = 0; i < exact.size(); ++i)
      r.errors.push_back({exact[i].name, l2[i], h1[i]});
  }

  const IdentityKind kind =
      cfg.problem == FormKind::Conformal ? IdentityKind::Conformal : IdentityKind::Killing;
  for (const auto& f : r.zero_fields) {
    const FieldSampler s = make_sampler(r.mesh, r.dm, f);
    r.ricci_residuals.push_back(ricci_identity_residual(s, r.mesh, r.manifold.metric, kind));
  }
  return r;
}

// --- report writers ----------------------------------------------------------

namespace detail {

inline std::string magnitude_string(double x) {
  if (x == 0.0) return "0";
  if (!std::isfinite(x)) return "nan";
  const int e = int(std::floor(std::log10(std::abs(x))));
  return (x < 0 ? std::string("-1e") : std::string("1e")) + std::to_string(e);
}

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline nlohmann::ordered_json make_report(const ExperimentConfig& cfg, const SolveResult& r) {
  nlohmann::ordered_json rep;
  rep["config"] = {
      {"manifold", cfg.manifold},
      {"problem", to_string(cfg.problem)},
      {"element", cfg.element == ElementType::P1 ? "P1" : "P2"},
      {"n", cfg.use_target_h ? nlohmann::ordered_json() : nlohmann::ordered_json(cfg.n)},
      {"target_h",
       cfg.use_target_h ? nlohmann::ordered_json(cfg.target_h) : nlohmann::ordered_json()},
      {"adapt", cfg.adapt},
      {"adapt_iterations", cfg.adapt_iterations},
      {"eigen",
       {{"k", cfg.eigen.k},
        {"tol", cfg.eigen.tol},
        {"shift", cfg.shift_auto ? nlohmann::ordered_json("auto") : nlohmann::ordered_json(cfg.eigen.shift)},
        {"block_size", cfg.eigen.block_size},
        {"max_iterations", cfg.eigen.max_iterations},
        {"max_basis", cfg.eigen.max_basis},
        {"dense_cutoff", cfg.eigen.dense_cutoff},
        {"force_dense", cfg.eigen.force_dense},
        {"seed", cfg.eigen.seed}}},
      {"gap_factor", cfg.gap_factor},
  };
  rep["mesh"] = {
      {"vertices", r.mesh.vertices.size()},   {"triangles", r.mesh.triangles.size()},
      {"dofs", r.dm.n_dofs()},                {"h_max", r.edges.max},
      {"h_mean", r.edges.mean},               {"h_stddev", r.edges.stddev},
      {"min_quality", r.min_quality},         {"adapted", cfg.adapt},
  };
  rep["spectrum"] = {
      {"eigenvalues", r.spectrum.values},
      {"residuals", r.spectrum.residuals},
      {"sigma", r.spectrum.shift_used},
      {"basis_size", r.spectrum.basis_size},
      {"dense_path", r.spectrum.dense_path},
      {"converged", r.spectrum.converged},
  };
  std::vector<std::string> mags;
  for (double v : r.spectrum.values) mags.push_back(detail::magnitude_string(v));
  rep["spectrum"]["magnitudes"] = mags;
  rep["zero_modes"] = {
      {"count", r.zero.count},
      {"inconclusive", r.zero.inconclusive},
  };
  nlohmann::ordered_json errs = nlohmann::ordered_json::array();
  for (const auto& e : r.errors)
    errs.push_back({{"field", e.name},
                    {"l2_rel", e.l2_rel},
                    {"l2_magnitude", detail::magnitude_string(e.l2_rel)},
                    {"h1_rel", e.h1_rel},
                    {"h1_magnitude", detail::magnitude_string(e.h1_rel)}});
  rep["errors"] = errs;
  rep["ricci_identity"] = {
      {"kind", cfg.problem == FormKind::Conformal ? "conformal" : "killing"},
      {"residuals", r.ricci_residuals},
  };
  return rep;
}

inline void write_spectrum_csv(const std::string& path, const Spectrum& sp) {
  std::ofstream os(path);
  if (!os) throw io_error("cannot open " + path);
  os << "index,eigenvalue,residual\n";
  for (std::size_t i = 0; i < sp.values.size(); ++i)
    os << i << "," << detail::fmt17(sp.values[i]) << "," << detail::fmt17(sp.residuals[i]) << "\n";
}

inline void write_solve_outputs(const ExperimentConfig& cfg, const SolveResult& r) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.outputs);
  fs::create_directories(dir);

  write_spectrum_csv((dir / "spectrum.csv").string(), r.spectrum);

  std::vector<NamedField> named;
  std::vector<DiscreteField> extra;  // keep alive for the write
  if (!r.zero_fields.empty()) {
    for (std::size_t i = 0; i < r.zero_fields.size(); ++i)
      named.push_back({"zero_mode_" + std::to_string(i), &r.zero_fields[i]});
  } else {
    const std::size_t kshow = std::min<std::size_t>(4, r.spectrum.vectors.size());
    for (std::size_t i = 0; i < kshow; ++i) extra.push_back(DiscreteField{r.spectrum.vectors[i]});
    for (std::size_t i = 0; i < extra.size(); ++i)
      named.push_back({"eig_" + std::to_string(i), &extra[i]});
  }
  write_vtk((dir / "fields.vtk").string(), r.mesh, r.dm, named);

  std::ofstream os(dir / "report.json");
  if (!os) throw io_error("cannot open " + (dir / "report.json").string());
  os << make_report(cfg, r).dump(2) << "\n";

  if (cfg.dump_matrices) {
    const SymSparseMatrix M = assemble_mass(r.mesh, r.dm, r.manifold.metric);
    const SymSparseMatrix A = (cfg.problem == FormKind::Conformal)
                                  ? assemble_conformal(r.mesh, r.dm, r.manifold.metric)
                                  : assemble_killing(r.mesh, r.dm, r.manifold.metric);
    std::ofstream am(dir / "A.coo"), mm(dir / "M.coo");
    if (!am || !mm) throw io_error("cannot open matrix dump files in " + cfg.outputs);
    A.write_coo(am);
    M.write_coo(mm);
  }
}

// --- convergence study -------------------------------------------------------

struct ConvergenceRun {
  ConvergenceStudy study;  // successful rows, sorted by decreasing h
  struct Failure {
    int n = 0;
    std::string message;
  };
  std::vector<Failure> failures;
  bool orders_valid = false;
  std::string orders_message;
};

// One solve per resolution.  When the manifold has known analytic kernel
// fields the study tracks the modes that should converge to them: the
// eigenvalue column is the largest |lambda| among the leading d = #fields
// eigenvalues and the error columns measure the last analytic field (for
// (CK) the proper conformal partner) against the span of those d
// eigenvectors.  This stays meaningful on coarse meshes where the gap
// detector does not yet see the full cluster.  Without analytic fields the
// detected zero modes are used instead.
inline ConvergenceRun run_convergence(const ExperimentConfig& cfg, std::vector<int> resolutions) {
  if (resolutions.size() < 4)
    throw config_error("convergence: need at least 4 resolutions, got " +
                       std::to_string(resolutions.size()));
  std::sort(resolutions.begin(), resolutions.end());
  ConvergenceRun run;
  for (int n : resolutions) {
    try {
      ExperimentConfig sub = cfg;
      sub.n = n;
      sub.use_target_h = false;
      const SolveResult r = run_solve(sub);
      ConvergenceRow row;
      row.h = r.edges.max;
      row.ntri = int(r.mesh.triangles.size());
      const double nan = std::numeric_limits<double>::quiet_NaN();

      std::vector<AnalyticVectorField> exact = r.manifold.known_killing;
      if (sub.problem == FormKind::Conformal)
        exact.insert(exact.end(), r.manifold.known_conformal_killing.begin(),
                     r.manifold.known_conformal_killing.end());
      if (!exact.empty()) {
        const std::size_t d = exact.size();
        if (r.spectrum.values.size() < d) {
          run.failures.push_back({n, "solver returned fewer eigenpairs than analytic fields"});
          continue;
        }
        for (std::size_t i = 0; i < d; ++i)
          row.eigenvalue = std::max(row.eigenvalue, std::abs(r.spectrum.values[i]));
        std::vector<DiscreteField> lead;
        for (std::size_t i = 0; i < d; ++i) lead.push_back(DiscreteField{r.spectrum.vectors[i]});
        row.l2_rel =
            subspace_error(lead, exact, r.mesh, r.dm, r.manifold.metric, NormKind::L2).back();
        row.h1_rel =
            subspace_error(lead, exact, r.mesh, r.dm, r.manifold.metric, NormKind::H1).back();
      } else if (r.zero.count > 0 && !r.zero.inconclusive) {
        for (int i = 0; i < r.zero.count; ++i)
          row.eigenvalue = std::max(row.eigenvalue, std::abs(r.spectrum.values[i]));
        row.l2_rel = nan;
        row.h1_rel = nan;
      } else {
        run.failures.push_back({n, r.zero.inconclusive
                                       ? "zero eigenspace inconclusive (no clear gap)"
                                       : "no zero modes detected"});
        continue;
      }
      run.study.rows.push_back(row);
    } catch (const std::exception& e) {
      run.failures.push_back({n, e.what()});
    }
  }
  std::sort(run.study.rows.begin(), run.study.rows.end(),
            [](const ConvergenceRow& a, const ConvergenceRow& b) { return a.h > b.h; });
  try {
    run.study.fit();
    run.orders_valid = true;
  } catch (const std::exception& e) {
    run.orders_message = e.what();
  }
  return run;
}

inline void write_convergence_outputs(const ExperimentConfig& cfg, const ConvergenceRun& run) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.outputs);
  fs::create_directories(dir);

  std::ofstream cs(dir / "convergence.csv");
  if (!cs) throw io_error("cannot open " + (dir / "convergence.csv").string());
  cs << "h,ntri,eigenvalue,l2_rel,h1_rel\n";
  for (const auto& row : run.study.rows)
    cs << detail::fmt17(row.h) << "," << row.ntri << "," << detail::fmt17(row.eigenvalue) << ","
       << detail::fmt17(row.l2_rel) << "," << detail::fmt17(row.h1_rel) << "\n";
  for (const auto& f : run.failures) cs << "# failed: n=" << f.n << ": " << f.message << "\n";

  std::ofstream os(dir / "orders.csv");
  if (!os) throw io_error("cannot open " + (dir / "orders.csv").string());
  os << "column,order,saturated,points\n";
  if (run.orders_valid) {
    const auto line = [&](const char* name, const OrderFit& f) {
      os << name << "," << detail::fmt17(f.order) << "," << (f.saturated ? 1 : 0) << ","
         << f.n_used << "\n";
    };
    line("eigenvalue", run.study.eigenvalue_order);
    line("l2_rel", run.study.l2_order);
    line("h1_rel", run.study.h1_order);
  } else {
    os << "# order fit unavailable: " << run.orders_message << "\n";
  }
}

}  // namespace kvf
