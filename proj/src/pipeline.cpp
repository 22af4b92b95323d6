#include "mhom/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <random>
#include <sstream>

#include "mhom/corrector.hpp"
#include "mhom/errors.hpp"
#include "mhom/homogenize.hpp"
#include "mhom/output.hpp"
#include "mhom/parallel.hpp"
#include "mhom/verify.hpp"

namespace mhom {

namespace {

using nlohmann::ordered_json;

ordered_json mat_json(const Mat2 &m) { return ordered_json::array({{m.a11, m.a12}, {m.a21, m.a22}}); }

std::string dump(const ordered_json &j) { return j.dump(2) + "\n"; }

void note(const RunOptions &opts, const std::string &msg) {
  if (opts.log) *opts.log << msg << '\n';
}

std::string join_seeds(const std::vector<std::uint64_t> &seeds) {
  std::string s;
  for (auto x : seeds) s += (s.empty() ? "" : " ") + std::to_string(x);
  return s;
}

ordered_json report_json(const MeshReport &r) {
  ordered_json j;
  j["min_angle_deg"] = r.min_angle_deg;
  j["max_aspect"] = r.max_aspect;
  j["conforming"] = r.conforming;
  j["oriented"] = r.oriented;
  j["normals_consistent"] = r.normals_consistent;
  j["pairing_residual"] = r.pairing_residual;
  j["ok"] = r.ok();
  j["issues"] = r.issues;
  return j;
}

}  // namespace

std::string describe_plan(const ExperimentConfig &cfg, const std::string &command, const RunOptions &opts) {
  std::ostringstream out;
  out << "command: " << command << '\n';
  out << "config hash: " << cfg.hash() << '\n';
  out << "output dir: " << opts.out_dir << '\n';
  out << "jobs: " << opts.jobs << '\n';
  out << "resolved settings:\n";
  std::istringstream lines(cfg.canonical());
  for (std::string line; std::getline(lines, line);) out << "  " << line << '\n';
  const auto seeds = cfg.seed_list();
  out << "seeds (" << seeds.size() << "): " << join_seeds(seeds) << '\n';
  if (command == "mesh") out << "writes: cell.mesh, domain.mesh, mesh_report.json\n";
  if (command == "corrector") out << "writes: corrector_flux.csv, energy_profile.csv\n";
  if (command == "effective") out << "writes: effective.json\n";
  if (command == "homogenize") out << "writes: convergence.csv, report.json\n";
  if (command == "verify") out << "writes: verify_report.json\n";
  return out.str();
}

int cmd_mesh(const ExperimentConfig &cfg, const RunOptions &opts) {
  const CellMesh cell = build_cell_mesh(cfg.interface_spec(), cfg.h);
  const MembraneMesh domain = tile_domain_mesh(cell, cfg.deformation(), cfg.eps_list().front(), cfg.membranes);
  std::ostringstream cell_txt, domain_txt;
  write_mesh(cell_txt, cell.mesh);
  write_mesh(domain_txt, domain);
  ordered_json rep;
  rep["config_hash"] = cfg.hash();
  rep["cell"] = report_json(mesh_report(cell.mesh));
  rep["cell"]["nodes"] = cell.mesh.num_nodes();
  rep["cell"]["triangles"] = cell.mesh.num_triangles();
  rep["cell"]["interface_nodes"] = cell.interface_nodes;
  rep["domain"] = report_json(mesh_report(domain));
  rep["domain"]["eps"] = cfg.eps_list().front();
  rep["domain"]["nodes"] = domain.num_nodes();
  rep["domain"]["triangles"] = domain.num_triangles();
  rep["domain"]["membranes"] = domain.interface_pairs.size() / static_cast<std::size_t>(cell.interface_nodes);

  OutputTransaction tx(opts.out_dir);
  tx.write("cell.mesh", cell_txt.str());
  tx.write("domain.mesh", domain_txt.str());
  tx.write("mesh_report.json", dump(rep));
  tx.commit();
  note(opts, "wrote mesh files to " + opts.out_dir);
  return 0;
}

int cmd_corrector(const ExperimentConfig &cfg, const RunOptions &opts) {
  const CellMesh cell = build_cell_mesh(cfg.interface_spec(), cfg.h);
  const auto seeds = cfg.seed_list();
  const auto dirs = cfg.direction_vectors();
  const DeformationMap map = cfg.deformation();
  const Conductivity A = cfg.conductivity_field();
  const bool membranes = cfg.membranes != MembraneRule::None;

  std::vector<std::string> flux_rows(seeds.size()), energy_rows(seeds.size());
  parallel_for(seeds.size(), opts.jobs, [&](std::size_t i) {
    const TruncatedProblem problem(cell, map.with_seed(seeds[i]), A, cfg.n, cfg.delta, {}, membranes);
    std::string rows, erows;
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      const CorrectorSolution sol = problem.solve(dirs[d]);
      const auto [fp, fm] = sol.window_flux(cfg.m);
      rows += std::to_string(seeds[i]) + "," + cfg.directions[d] + "," + format_double(cfg.delta) + "," +
              std::to_string(cfg.n) + "," + std::to_string(cfg.m) + "," + format_double(fp.x) + "," +
              format_double(fp.y) + "," + format_double(fm.x) + "," + format_double(fm.y) + "\n";
      if (d == 0) {
        const auto E = energy_profile(sol);
        for (std::size_t k = 0; k < E.size(); ++k)
          erows += std::to_string(seeds[i]) + "," + std::to_string(k + 1) + "," + format_double(E[k]) + "\n";
      }
    }
    flux_rows[i] = rows;
    energy_rows[i] = erows;
  });

  std::string flux = "seed,p,delta,n,m,F11,F12,F21,F22\n", energy = "seed,k,E_k\n";
  for (const auto &r : flux_rows) flux += r;
  for (const auto &r : energy_rows) energy += r;
  OutputTransaction tx(opts.out_dir);
  tx.write("corrector_flux.csv", flux);
  tx.write("energy_profile.csv", energy);
  tx.commit();
  note(opts, "wrote corrector outputs for " + std::to_string(seeds.size()) + " seed(s) to " + opts.out_dir);
  return 0;
}

namespace {

EffectiveRun effective_run(const ExperimentConfig &cfg, int jobs) {
  EffectiveRun run;
  run.map = cfg.deformation();
  run.A = cfg.conductivity_field();
  run.spec = cfg.interface_spec();
  run.h = cfg.h;
  run.n = cfg.n;
  run.m = cfg.m;
  run.delta = cfg.delta;
  run.seeds = cfg.seed_list();
  run.membranes = cfg.membranes != MembraneRule::None;
  run.jobs = jobs;
  return run;
}

}  // namespace

int cmd_effective(const ExperimentConfig &cfg, const RunOptions &opts) {
  EffectiveResult res = run_effective(effective_run(cfg, opts.jobs));
  res.tensor.config_hash = cfg.hash();
  const Conductivity A = cfg.conductivity_field();
  const EllipticityVerdict verdict = ellipticity_check(res.tensor, A.lambda(), A.Lambda());

  ordered_json j;
  j["A0"] = mat_json(res.tensor.A0);
  j["stderr"] = mat_json(res.tensor.stderr_);
  j["rho"] = res.volume.rho;
  j["theta"] = res.volume.theta;
  j["N"] = res.tensor.N;
  j["config_hash"] = cfg.hash();
  j["rho_stderr"] = res.volume.rho_stderr;
  j["theta_stderr"] = res.volume.theta_stderr;
  j["eigenvalues"] = verdict.eigenvalues;
  j["energy_residuals"] = verdict.energy_residuals;
  OutputTransaction tx(opts.out_dir);
  tx.write("effective.json", dump(j));
  tx.commit();
  note(opts, "wrote effective.json to " + opts.out_dir);
  return 0;
}

double discrete_theta(const CellMesh &cell, const DeformationMap &map) {
  const auto minus_area = [&](int bit) {
    double area = 0.0;
    const auto &m = cell.mesh;
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
      if (m.regions[t] != Region::Minus) continue;
      const auto &tri = m.triangles[t];
      std::array<Vec2, 3> p;
      for (int i = 0; i < 3; ++i) p[i] = bit ? bump_apply(map.bump_params(), m.vertices[tri[i]]) : m.vertices[tri[i]];
      area += 0.5 * cross(p[1] - p[0], p[2] - p[0]);
    }
    return area;
  };
  switch (map.kind()) {
    case MapKind::Bump: return minus_area(1);
    case MapKind::Bernoulli: return 0.5 * (minus_area(0) + minus_area(1));
    default: return minus_area(0);
  }
}

HomogenizedCoefficients homogenized_coefficients(const ExperimentConfig &cfg, const CellMesh &cell, int jobs) {
  HomogenizedCoefficients hc;
  hc.theta = discrete_theta(cell, cfg.deformation());
  if (!cfg.effective_json.empty()) {
    std::ifstream in(cfg.effective_json);
    if (!in) throw ConfigError("homogenize.effective", cfg.lines.count("homogenize.effective") ? cfg.lines.at("homogenize.effective") : 0,
                               "cannot read " + cfg.effective_json);
    const auto j = nlohmann::json::parse(in);
    const auto &a = j.at("A0");
    hc.A0 = {a[0][0].get<double>(), a[0][1].get<double>(), a[1][0].get<double>(), a[1][1].get<double>()};
    hc.source = cfg.effective_json;
    return hc;
  }
  const Conductivity A = cfg.conductivity_field();
  if (cfg.map == MapKind::Identity && cfg.membranes != MembraneRule::None) {
    hc.A0 = periodic_tensor(cell, A);
    hc.source = "periodic-cell";
    return hc;
  }
  EffectiveResult res = run_effective(effective_run(cfg, jobs));
  hc.A0 = res.tensor.A0;
  hc.source = "monte-carlo";
  return hc;
}

int cmd_homogenize(const ExperimentConfig &cfg, const RunOptions &opts) {
  const CellMesh cell = build_cell_mesh(cfg.interface_spec(), cfg.h);
  const HomogenizedCoefficients hc = homogenized_coefficients(cfg, cell, opts.jobs);
  const Conductivity A = cfg.conductivity_field();
  const auto f = source_function(cfg.source);
  const HomogSolution u0 = solve_homog(hc.A0, f, cfg.homog_n);

  const DeformationMap map = cfg.deformation();
  std::vector<std::uint64_t> seeds = cfg.seed_list();
  if (cfg.map != MapKind::Bernoulli) seeds.resize(1);
  const auto eps = cfg.eps_list();
  const std::size_t ne = eps.size();
  std::vector<ConvergenceRow> rows(seeds.size() * ne);
  parallel_for(rows.size(), opts.jobs, [&](std::size_t idx) {
    const std::uint64_t seed = seeds[idx / ne];
    const double e = eps[idx % ne];
    const HeteroSolution ue = solve_hetero(cell, map.with_seed(seed), e, f, A, cfg.membranes);
    rows[idx] = error_suite(ue, u0, A, hc.theta, f);
    rows[idx].seed = seed;
  });

  std::string csv =
      "seed,eps,l2_error,jump_l2,jump_over_sqrt_eps,flux_res_1,flux_res_2,flux_res_3,mass_res_1,mass_res_2,"
      "mass_res_3,mass_res_4,grad_plus,grad_minus\n";
  for (const auto &r : rows) {
    csv += std::to_string(r.seed) + "," + format_double(r.eps) + "," + format_double(r.l2_error) + "," +
           format_double(r.jump_l2) + "," + format_double(r.jump_over_sqrt_eps);
    for (double x : r.flux_res) csv += "," + format_double(x);
    for (double x : r.mass_res) csv += "," + format_double(x);
    csv += "," + format_double(r.grad_plus) + "," + format_double(r.grad_minus) + "\n";
  }

  ordered_json rep;
  rep["config_hash"] = cfg.hash();
  rep["A0"] = mat_json(hc.A0);
  rep["A0_source"] = hc.source;
  rep["theta"] = hc.theta;
  rep["source"] = to_string(cfg.source);
  rep["eps"] = eps;
  ordered_json per_seed = ordered_json::array();
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    std::vector<double> l2, ratio, jump;
    for (std::size_t k = 0; k < ne; ++k) {
      l2.push_back(rows[s * ne + k].l2_error);
      ratio.push_back(rows[s * ne + k].energy_ratio());
      jump.push_back(rows[s * ne + k].jump_over_sqrt_eps);
    }
    ordered_json js;
    js["seed"] = seeds[s];
    bool decreasing = true;
    for (std::size_t k = 1; k < ne; ++k) decreasing = decreasing && l2[k] < l2[k - 1];
    js["l2_strictly_decreasing"] = decreasing;
    if (ne >= 3) {
      try {
        const RateFit fit = rate_fit(eps, l2);
        js["l2_rate"] = {{"exponent", fit.exponent}, {"r2", fit.r2}};
      } catch (const DegenerateFit &e) {
        js["l2_rate"] = {{"error", e.what()}};
      }
    }
    const auto spread = [](const std::vector<double> &v) {
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      return *lo > 0.0 ? *hi / *lo - 1.0 : 0.0;
    };
    js["energy_ratio_spread"] = spread(ratio);
    js["jump_ratio_spread"] = spread(jump);
    per_seed.push_back(js);
  }
  rep["seeds"] = per_seed;

  OutputTransaction tx(opts.out_dir);
  tx.write("convergence.csv", csv);
  tx.write("report.json", dump(rep));
  tx.commit();
  note(opts, "wrote convergence.csv and report.json to " + opts.out_dir);
  return 0;
}

int cmd_verify(const ExperimentConfig &cfg, const RunOptions &opts) {
  ordered_json checks = ordered_json::array();
  bool all_ok = true;
  const auto record = [&](const std::string &name, bool ok, ordered_json detail) {
    all_ok = all_ok && ok;
    checks.push_back({{"name", name}, {"passed", ok}, {"detail", std::move(detail)}});
    note(opts, std::string(ok ? "PASS " : "FAIL ") + name);
  };

  {
    std::mt19937_64 rng(cfg.master_seed);
    int passed = 0;
    std::string first_error;
    for (int i = 0; i < cfg.induction_instances; ++i) {
      try {
        backward_induction_bound(generate_instance(rng));
        ++passed;
      } catch (const HypothesisViolation &e) {
        if (first_error.empty()) first_error = e.what();
      }
    }
    record("backward_induction", passed == cfg.induction_instances,
           {{"instances", cfg.induction_instances}, {"passed", passed}, {"first_error", first_error}});
  }

  {
    BumpParams bp;
    bp.amplitude = cfg.bump_amplitude;
    const std::array<std::pair<std::string, DeformationMap>, 3> maps{
        std::pair{std::string("identity"), DeformationMap::identity()},
        std::pair{std::string("scaling"), DeformationMap::scaling(2.0)},
        std::pair{std::string("bump"), DeformationMap::bump(bp)}};
    ordered_json detail;
    bool ok = true;
    for (const auto &[name, map] : maps) {
      const auto one = surface_integral_crosscheck(map, [](Vec2) { return 1.0; }, cfg.interface_spec());
      const auto x1 = surface_integral_crosscheck(map, [](Vec2 x) { return x.x; }, cfg.interface_spec());
      detail[name] = {{"f=1", one.diff}, {"f=x1", x1.diff}};
      ok = ok && one.diff <= 1e-8 && x1.diff <= 1e-8;
    }
    record("surface_integral_crosscheck", ok, detail);
  }

  {
    BumpParams bp;
    bp.amplitude = cfg.bump_amplitude;
    const MapBounds b = DeformationMap::bump(bp).sample_bounds(200);
    record("bump_det_bound", b.mu >= 0.5, {{"mu", b.mu}, {"M", b.M}});
  }

  {
    const DeformationMap field = DeformationMap::bernoulli(cfg.master_seed);
    std::mt19937_64 rng(cfg.master_seed ^ 0x5eedULL);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_int_distribution<int> shift(-50, 50);
    int mismatches = 0;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Vec2 y{u01(rng), u01(rng)};
      const CellIndex k{shift(rng), shift(rng)};
      const Vec2 lhs = field.apply(y + Vec2{double(k.x), double(k.y)}) - Vec2{double(k.x), double(k.y)};
      const Vec2 rhs = field.shifted(k).apply(y);
      const double d = norm(lhs - rhs);
      worst = std::max(worst, d);
      if (d > 1e-12) ++mismatches;
    }
    record("stationarity", mismatches == 0, {{"samples", 100}, {"mismatches", mismatches}, {"max_diff", worst}});
  }

  {
    const CellMesh cell = build_cell_mesh(cfg.interface_spec(), cfg.h);
    const MeshReport r = mesh_report(cell.mesh);
    record("cell_mesh_quality", r.ok(), report_json(r));
  }

  {
    const CellMesh coarse = build_cell_mesh(cfg.interface_spec(), 0.25);
    AssemblyOptions ao;
    ao.node_to_dof = periodic_dof_map(coarse);
    ao.fixed_nodes = std::vector<int>{coarse.sides[0][0]};
    const DiscreteSystem sys =
        assemble(coarse.mesh, FormSpec{cfg.conductivity_field(), 1.0, 0.0}, LoadSpec{nullptr, Vec2{1.0, 0.0}}, ao);
    const std::vector<double> dense = dense_solve(sys.K_free, sys.load_free);
    const CgResult cg = pcg(sys.K_free, sys.load_free);
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < dense.size(); ++i) {
      diff = std::max(diff, std::fabs(dense[i] - cg.x[i]));
      scale = std::max(scale, std::fabs(dense[i]));
    }
    record("dense_vs_cg", diff <= 1e-8 * std::max(1.0, scale), {{"dofs", dense.size()}, {"max_abs_diff", diff}});
  }

  ordered_json rep;
  rep["config_hash"] = cfg.hash();
  rep["all_passed"] = all_ok;
  rep["checks"] = checks;
  OutputTransaction tx(opts.out_dir);
  tx.write("verify_report.json", dump(rep));
  tx.commit();
  return all_ok ? 0 : 1;
}

}  // namespace mhom
