// Command-line front end.  Three subcommands:
//
//   solve        one experiment; writes spectrum.csv, fields.vtk, report.json
//   convergence  a resolution sweep; writes convergence.csv and orders.csv
//   export       convert a saved mesh to a legacy VTK file
//
// Options can come from a JSON config file (--config) and/or flags; flags
// override the file.  Exit codes: 0 success, 2 configuration error,
// 3 numerical or I/O failure.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "kvf/meshio.hpp"
#include "kvf/pipeline.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::string manifold, problem, element, outputs;
  int n = 0;
  double target_h = 0.0;
  bool adapt = false;
  int adapt_iterations = 0;
  int k = 0;
  double tol = 0.0, shift = 0.0, gap_factor = 0.0;
  std::uint64_t seed = 0;
  int threads = 1;
  bool dump_matrices = false;
};

void add_common_options(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "JSON config file; flags override its keys");
  sub->add_option("--manifold", f.manifold,
                  "flat_torus, standard_torus, klein_bottle, or enneper");
  sub->add_option("--problem", f.problem, "K or CK")->check(CLI::IsMember({"K", "CK"}));
  sub->add_option("--element", f.element, "P1 or P2")->check(CLI::IsMember({"P1", "P2"}));
  sub->add_option("--n", f.n, "structured resolution (curved charts get ~2n^2 triangles)");
  sub->add_option("--target-h", f.target_h, "pick the resolution from a Riemannian edge target");
  sub->add_flag("--adapt,!--no-adapt", f.adapt, "metric-adapted remeshing");
  sub->add_option("--adapt-iterations", f.adapt_iterations, "adaptation sweeps");
  sub->add_option("--k", f.k, "number of eigenpairs");
  sub->add_option("--tol", f.tol, "eigensolver residual tolerance");
  sub->add_option("--shift", f.shift, "spectral shift, in units of mean diag(A)/diag(M)");
  sub->add_option("--seed", f.seed, "seed for the eigensolver starting block");
  sub->add_option("--gap-factor", f.gap_factor, "relative gap separating zero modes");
  sub->add_option("--threads", f.threads, "reserved; solves are single-threaded")
      ->check(CLI::PositiveNumber);
  sub->add_flag("--dump-matrices", f.dump_matrices, "also write A.coo and M.coo");
  sub->add_option("--outputs", f.outputs, "output directory (all paths are relative to it)");
}

// Merge the config file (if any) with the flags that were actually given,
// then run everything through the strict parser so both sources get the
// same validation.
kvf::ExperimentConfig merge_config(CLI::App* sub, const Flags& f) {
  nlohmann::json j = nlohmann::json::object();
  if (sub->count("--config")) {
    std::ifstream is(f.config_path);
    if (!is) throw kvf::config_error("config: cannot open " + f.config_path);
    try {
      j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
      throw kvf::config_error("config: " + f.config_path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw kvf::config_error("config: top level must be a JSON object");
  }
  if (sub->count("--n") && sub->count("--target-h"))
    throw kvf::config_error("give either --n or --target-h, not both");
  if (sub->count("--manifold")) j["manifold"] = f.manifold;
  if (sub->count("--problem")) j["problem"] = f.problem;
  if (sub->count("--element")) j["element"] = f.element;
  if (sub->count("--n")) {
    j.erase("target_h");
    j["n"] = f.n;
  }
  if (sub->count("--target-h")) {
    j.erase("n");
    j["target_h"] = f.target_h;
  }
  if (sub->count("--adapt") || sub->count("--no-adapt")) j["adapt"] = f.adapt;
  if (sub->count("--adapt-iterations")) j["adapt_iterations"] = f.adapt_iterations;
  if (sub->count("--k")) j["eigen"]["k"] = f.k;
  if (sub->count("--tol")) j["eigen"]["tol"] = f.tol;
  if (sub->count("--shift")) j["eigen"]["shift"] = f.shift;
  if (sub->count("--seed")) j["eigen"]["seed"] = f.seed;
  if (sub->count("--gap-factor")) j["gap_factor"] = f.gap_factor;
  if (sub->count("--dump-matrices")) j["dump_matrices"] = f.dump_matrices;
  if (sub->count("--outputs")) j["outputs"] = f.outputs;
  return kvf::parse_experiment_config(j);
}

int run(int argc, char** argv) {
  CLI::App app{"Killing and conformal Killing vector fields on compact surfaces"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* solve = app.add_subcommand("solve", "run one experiment");
  add_common_options(solve, f);

  CLI::App* conv = app.add_subcommand("convergence", "run a resolution sweep");
  add_common_options(conv, f);
  std::vector<int> resolutions;
  conv->add_option("--resolutions", resolutions, "at least 4 structured resolutions")
      ->required()
      ->expected(-1);

  CLI::App* exp = app.add_subcommand("export", "convert a saved mesh to VTK");
  std::string mesh_path, vtk_name = "mesh.vtk", exp_outputs = ".";
  exp->add_option("--mesh", mesh_path, "mesh file to convert")->required();
  exp->add_option("--out", vtk_name, "output file name");
  exp->add_option("--outputs", exp_outputs, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (app.got_subcommand(solve)) {
    const kvf::ExperimentConfig cfg = merge_config(solve, f);
    const kvf::SolveResult r = kvf::run_solve(cfg);
    kvf::write_solve_outputs(cfg, r);
    std::cout << "manifold " << r.manifold.name << ", " << r.mesh.triangles.size()
              << " triangles, " << r.dm.n_dofs() << " dofs\n"
              << "zero modes: " << r.zero.count << (r.zero.inconclusive ? " (inconclusive)" : "")
              << "\n";
    return 0;
  }
  if (app.got_subcommand(conv)) {
    const kvf::ExperimentConfig cfg = merge_config(conv, f);
    const kvf::ConvergenceRun run = kvf::run_convergence(cfg, resolutions);
    kvf::write_convergence_outputs(cfg, run);
    for (const auto& fail : run.failures)
      std::cerr << "resolution n=" << fail.n << " failed: " << fail.message << "\n";
    if (run.orders_valid)
      std::cout << "orders: eigenvalue " << run.study.eigenvalue_order.order << ", l2 "
                << run.study.l2_order.order << ", h1 " << run.study.h1_order.order << "\n";
    if (!run.failures.empty())
      throw kvf::numerical_error("convergence: " + std::to_string(run.failures.size()) +
                                 " of " + std::to_string(run.failures.size() + run.study.rows.size()) +
                                 " resolutions failed (partial results written)");
    return 0;
  }
  // export
  const kvf::Triangulation tri = kvf::read_mesh(mesh_path);
  const kvf::DofMap dm = kvf::build_dofmap(tri, kvf::ElementType::P1, kvf::ChartDomain{});
  namespace fs = std::filesystem;
  fs::create_directories(exp_outputs);
  kvf::write_vtk((fs::path(exp_outputs) / vtk_name).string(), tri, dm, {});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const kvf::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
