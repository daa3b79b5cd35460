#include "rbeigs/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>

#include "rbeigs/csv.hpp"
#include "rbeigs/errors.hpp"

namespace rbeigs {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

std::string flag_str(int flag) { return flag < 0 ? "na" : std::to_string(flag); }

std::vector<std::string> mu_header(std::size_t d) {
  std::vector<std::string> h;
  for (std::size_t i = 0; i < d; ++i)
    h.push_back(d == 1 ? "mu" : "mu" + std::to_string(i + 1));
  return h;
}

}  // namespace

ExperimentContext::ExperimentContext(ExperimentConfig cfg)
    : cfg_(std::move(cfg)), problem_(&builtin_problem(cfg_.problem_name)) {
  mesh_ = build_mesh(problem_->mesh_for(cfg_.h, cfg_.element_order));
}

EigenSolution ExperimentContext::solve_fom(std::span<const double> mu, std::size_t pairs,
                                           AssembledPencil* pencil_out) const {
  AssembledPencil pencil = assemble(*problem_, mesh_, mu);
  SolverOptions opts = cfg_.solver;
  opts.block_size = pairs;
  opts.seed = cfg_.seed;
  EigenSolution sol = lobpcg(pencil.a, pencil.m, opts);
  sol.metric_sparse = nullptr;  // the pencil may be moved out below
  if (pencil_out) *pencil_out = std::move(pencil);
  return sol;
}

ReducedBasis ExperimentContext::offline_basis() const {
  SolverOptions opts = cfg_.solver;
  opts.seed = cfg_.seed;
  const DenseMatrix snapshots =
      collect_snapshots(*problem_, mesh_, cfg_.train, cfg_.p, opts);
  return build_basis(snapshots, cfg_.train, cfg_.p);
}

std::string ExperimentContext::mu_tag(std::span<const double> mu) const {
  std::string tag;
  char buf[32];
  for (std::size_t i = 0; i < mu.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%g", mu[i]);
    if (i) tag += "_";
    tag += buf;
  }
  return tag;
}

std::filesystem::path ExperimentContext::basis_path() const {
  return cfg_.out_dir / (cfg_.problem_name + "_basis.bin");
}

int cmd_fom(const ExperimentContext& ctx, std::span<const double> mu) {
  const ExperimentConfig& cfg = ctx.config();
  std::filesystem::create_directories(cfg.out_dir);
  AssembledPencil pencil;
  EigenSolution sol;
  try {
    sol = ctx.solve_fom(mu, cfg.p, &pencil);
  } catch (const NoConvergence& e) {
    std::cerr << "fom: solver failed: " << e.what() << "\n";
    return 2;
  }
  const std::string tag = ctx.mu_tag(mu);
  CsvWriter csv(cfg.out_dir / (cfg.problem_name + "_fom_" + tag + ".csv"));
  csv.header({"k", "lambda", "residual"});
  for (std::size_t k = 0; k < sol.values.size(); ++k)
    csv.row({std::to_string(k + 1), format_g17(sol.values[k]),
             format_g17(sol.residual_norms[k])});
  if (cfg.write_eigenvectors) {
    // lift free DOFs back to mesh nodes (Dirichlet nodes are zero)
    std::vector<std::vector<double>> fields(sol.vectors.cols());
    std::vector<std::string> names;
    for (std::size_t k = 0; k < sol.vectors.cols(); ++k) {
      fields[k].assign(ctx.mesh().num_nodes(), 0.0);
      for (std::size_t f = 0; f < pencil.dofs.n_free(); ++f)
        fields[k][pencil.dofs.free_to_node[f]] = sol.vectors(f, k);
      names.push_back("phi" + std::to_string(k + 1));
    }
    write_point_cloud_csv(cfg.out_dir / (cfg.problem_name + "_fom_" + tag + "_vectors.csv"),
                          ctx.mesh(), fields, names);
  }
  if (cfg.write_matrices) {
    write_matrix_market(cfg.out_dir / (cfg.problem_name + "_A_" + tag + ".mtx"), pencil.a);
    write_matrix_market(cfg.out_dir / (cfg.problem_name + "_M_" + tag + ".mtx"), pencil.m);
  }
  return 0;
}

int cmd_offline(const ExperimentContext& ctx) {
  const ExperimentConfig& cfg = ctx.config();
  std::filesystem::create_directories(cfg.out_dir);
  ReducedBasis basis;
  try {
    basis = ctx.offline_basis();
  } catch (const NoConvergence& e) {
    std::cerr << "offline: " << e.what() << "\n";
    return 2;
  }
  save_basis(ctx.basis_path(), basis);
  if (cfg.write_basis_csv)
    export_basis_csv(cfg.out_dir / (cfg.problem_name + "_basis.csv"), basis);
  const std::size_t full = cfg.p * cfg.train.size();
  CsvWriter csv(cfg.out_dir / (cfg.problem_name + "_offline_summary.csv"));
  std::vector<std::string> hdr = mu_header(ctx.problem().param_dim());
  hdr.insert(hdr.end(), {"p", "r", "qr_truncated"});
  csv.header(hdr);
  for (const auto& mu : cfg.train) {
    std::vector<std::string> row;
    for (double v : mu) row.push_back(format_g17(v));
    row.push_back(std::to_string(cfg.p));
    row.push_back(std::to_string(basis.rank()));
    row.push_back(std::to_string(full - basis.rank()));
    csv.row(row);
  }
  return 0;
}

std::vector<SweepRow> run_sweep_rows(const ExperimentContext& ctx, const ReducedBasis& basis) {
  const ExperimentConfig& cfg = ctx.config();
  const std::vector<std::vector<double>> points = cfg.test.points();
  const std::size_t p = cfg.p;

  // affine offline split once, when the problem admits it
  std::optional<AffineReducedOperators> affine;
  if (ctx.problem().has_affine)
    affine = project_affine(assemble_affine_terms(ctx.problem(), ctx.mesh()), basis);

  std::vector<std::vector<SweepRow>> per_point(points.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t ip = 0; ip < static_cast<std::int64_t>(points.size()); ++ip) {
    const std::vector<double>& mu = points[ip];
    std::vector<SweepRow>& rows = per_point[ip];
    try {
      const double t0 = now_ms();
      AssembledPencil pencil = assemble(ctx.problem(), ctx.mesh(), mu);
      SolverOptions opts = cfg.solver;
      opts.block_size = std::min(p + 1, pencil.a.n());
      opts.seed = cfg.seed;
      const EigenSolution fom = lobpcg(pencil.a, pencil.m, opts);
      const double t1 = now_ms();
      const ReducedOperators ops = affine
                                       ? affine->reduce_at(mu)
                                       : project_operators(pencil.a, pencil.m, basis);
      const RomSolution rom = solve_reduced(ops, basis);
      const double t2 = now_ms();

      const std::size_t usable = std::min(p, fom.values.size());
      const SpectralPartition part = partition_spectrum(
          std::span<const double>(fom.values.data(), usable), cfg.partition_tol);
      const EigvecErrors errs =
          eigvec_errors(fom.vectors.cols_slice(0, usable), part, rom.vectors,
                        rom.values, pencil.m, nullptr);
      for (std::size_t k = 0; k < usable; ++k) {
        SweepRow row;
        row.mu = mu;
        row.k = k + 1;
        row.lambda = fom.values[k];
        row.lambda_tilde = rom.values[k];
        row.eigval_err = rom.values[k] - fom.values[k];
        row.eps = errs.eps[k];
        row.fom_ms = t1 - t0;
        row.rom_ms = t2 - t1;
        rows.push_back(std::move(row));
      }
    } catch (const std::exception& e) {
      SweepRow row;
      row.mu = mu;
      row.lambda = row.lambda_tilde = row.eigval_err = row.eps = kNaN;
      std::string what = e.what();
      std::replace(what.begin(), what.end(), ',', ';');
      row.status = what;
      rows.assign(1, std::move(row));
    }
  }

  std::vector<SweepRow> rows;
  for (auto& pr : per_point)
    for (auto& r : pr) rows.push_back(std::move(r));
  return rows;
}

int cmd_sweep(const ExperimentContext& ctx) {
  const ExperimentConfig& cfg = ctx.config();
  std::filesystem::create_directories(cfg.out_dir);
  ReducedBasis basis;
  try {
    basis = load_basis(ctx.basis_path());
  } catch (const IoError& e) {
    std::cerr << "sweep: " << e.what() << " (run the offline stage first)\n";
    return 3;
  }
  if (basis.rank() < cfg.p) {
    std::cerr << "sweep: basis rank " << basis.rank() << " is below p = " << cfg.p << "\n";
    return 3;
  }
  const std::vector<SweepRow> rows = run_sweep_rows(ctx, basis);

  const std::size_t d = ctx.problem().param_dim();
  CsvWriter csv(cfg.out_dir / (cfg.problem_name + "_sweep.csv"));
  std::vector<std::string> hdr = mu_header(d);
  hdr.insert(hdr.end(), {"k", "lambda", "lambda_tilde", "eigval_err", "eps", "status"});
  csv.header(hdr);
  // wall-clock goes to a sidecar so the main CSV stays run-to-run identical
  CsvWriter timing(cfg.out_dir / (cfg.problem_name + "_sweep_timings.csv"));
  std::vector<std::string> thdr = mu_header(d);
  thdr.insert(thdr.end(), {"fom_ms", "rom_ms"});
  timing.header(thdr);

  std::size_t failures = 0, total_points = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& r = rows[i];
    std::vector<std::string> fields;
    for (double v : r.mu) fields.push_back(format_g17(v));
    fields.push_back(std::to_string(r.k));
    fields.push_back(format_g17(r.lambda));
    fields.push_back(format_g17(r.lambda_tilde));
    fields.push_back(format_g17(r.eigval_err));
    fields.push_back(format_g17(r.eps));
    fields.push_back(r.status);
    csv.row(fields);
    if (i == 0 || rows[i - 1].mu != r.mu) {
      ++total_points;
      if (r.status != "ok") ++failures;
      std::vector<std::string> trow;
      for (double v : r.mu) trow.push_back(format_g17(v));
      trow.push_back(format_g17(r.fom_ms));
      trow.push_back(format_g17(r.rom_ms));
      timing.row(trow);
    }
  }
  if (failures == total_points && total_points > 0) {
    std::cerr << "sweep: every test point failed\n";
    return 2;
  }
  return 0;
}

BoundReport run_bounds_at(const ExperimentContext& ctx, const ReducedBasis& basis,
                          std::span<const double> mu) {
  const ExperimentConfig& cfg = ctx.config();
  AssembledPencil pencil = assemble(ctx.problem(), ctx.mesh(), mu);
  SolverOptions opts = cfg.solver;
  opts.block_size = std::min(basis.rank() + 1, pencil.a.n());
  opts.seed = cfg.seed;
  const EigenSolution fom = lobpcg(pencil.a, pencil.m, opts);

  ReducedOperators ops = project_operators(pencil.a, pencil.m, basis);
  const RomSolution rom = solve_reduced(ops, basis);

  BoundOptions bopts;
  bopts.partition_rel_tol = cfg.partition_tol;
  bopts.shift = cfg.shift;
  return verify_bounds(pencil.a, pencil.m, fom, rom, basis, bopts);
}

int cmd_bounds(const ExperimentContext& ctx, const std::vector<std::vector<double>>& mus) {
  const ExperimentConfig& cfg = ctx.config();
  std::filesystem::create_directories(cfg.out_dir);
  ReducedBasis basis;
  try {
    basis = load_basis(ctx.basis_path());
  } catch (const IoError& e) {
    std::cerr << "bounds: " << e.what() << " (run the offline stage first)\n";
    return 3;
  }
  bool any_fail = false;
  for (const auto& mu : mus) {
    BoundReport report;
    try {
      report = run_bounds_at(ctx, basis, mu);
    } catch (const NoConvergence& e) {
      std::cerr << "bounds: solver failed at mu = " << ctx.mu_tag(mu) << ": " << e.what()
                << "\n";
      return 2;
    }
    const std::size_t d = ctx.problem().param_dim();
    CsvWriter csv(cfg.out_dir /
                  (cfg.problem_name + "_bounds_" + ctx.mu_tag(mu) + ".csv"));
    std::vector<std::string> hdr = mu_header(d);
    hdr.insert(hdr.end(), {"k", "lambda", "lambda_tilde", "kappa", "kappa_sq_lambda",
                           "tau", "eps", "delta", "lower_ok", "upper_ok", "vec_ok",
                           "shift_t"});
    csv.header(hdr);
    for (const BoundRow& r : report.rows) {
      std::vector<std::string> fields;
      for (double v : mu) fields.push_back(format_g17(v));
      fields.push_back(std::to_string(r.k));
      fields.push_back(format_g17(r.lambda));
      fields.push_back(format_g17(r.lambda_tilde));
      fields.push_back(format_g17(r.kappa));
      fields.push_back(format_g17(r.kappa_sq_lambda));
      fields.push_back(format_g17(r.tau));
      fields.push_back(format_g17(r.eps));
      fields.push_back(format_g17(r.delta));
      fields.push_back(flag_str(r.lower_ok));
      fields.push_back(flag_str(r.upper_ok));
      fields.push_back(flag_str(r.vec_ok));
      fields.push_back(format_g17(report.shift_t));
      csv.row(fields);
    }
    if (report.any_applicable_fail()) any_fail = true;
  }
  return any_fail ? 1 : 0;
}

int cmd_list_problems() {
  for (const std::string& name : builtin_problem_names()) {
    const ParametricProblem& p = builtin_problem(name);
    std::string box;
    for (std::size_t i = 0; i < p.param_box.size(); ++i) {
      if (i) box += " x ";
      box += "[" + format_g17(p.param_box[i][0]) + ", " + format_g17(p.param_box[i][1]) + "]";
    }
    std::cout << name << "  dim=" << p.dim << "  D=" << box << "  p=" << p.default_p
              << "\n    " << p.description << "\n";
  }
  return 0;
}

}  // namespace rbeigs
