#include "run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

namespace ddej {
namespace {

Scheme scheme_for(const RunConfig& cfg) {
  if (cfg.scheme) return *cfg.scheme;
  return cfg.m == 0 ? Scheme::rk4_deterministic : Scheme::heun_stratonovich;
}

EquationSpec equation_of(const RunConfig& cfg) {
  return EquationSpec{cfg.manifold, cfg.fields, cfg.delay, cfg.initial_curve};
}

SolverConfig solver_config(const RunConfig& cfg, double h) {
  SolverConfig sc;
  sc.step = h;
  sc.horizon = cfg.horizon;
  sc.scheme = scheme_for(cfg);
  sc.fictitious_steps = cfg.fictitious_steps;
  sc.metric_projection = cfg.metric_projection;
  return sc;
}

nlohmann::json vec_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vec_from_json(const nlohmann::json& a) {
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
  return v;
}

std::filesystem::path ensure_dir(const std::string& out_dir) {
  std::filesystem::path p(out_dir);
  std::filesystem::create_directories(p);
  return p;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file " + path.string());
  out << text;
}

// Max absolute difference between the frame carried by the lifted solution
// and the frame obtained by transporting the base path, node by node.
double frame_discrepancy(const SolutionPath& lifted, const LiftedPath& lp) {
  if (lp.times.size() != lifted.grid.size())
    throw ContractError("lift comparison grids differ in size");
  double worst = 0.0;
  for (std::size_t j = 0; j < lp.times.size(); ++j) {
    if (std::abs(lp.times[j] - lifted.grid[j]) > 1e-9)
      throw ContractError("lift comparison grids differ");
    worst = std::max(worst,
                     (lp.nodes[j].frame - lifted.frames[j]).cwiseAbs().maxCoeff());
  }
  return worst;
}

// Discrepancy between the two lift routes for a fixed realized driver.
double lift_discrepancy(const RunConfig& cfg, const DriverPath& driver, double h) {
  EquationSpec eq = equation_of(cfg);
  SolverConfig sc = solver_config(cfg, h);
  FramePoint p0{ChartPoint{cfg.initial_curve.start_point()}, cfg.initial_frame};
  SolutionPath lifted = solve_lifted_ddej(eq, p0, driver, sc);
  LiftedPath lp = lift_path(cfg.manifold, lifted.path, p0);
  return frame_discrepancy(lifted, lp);
}

// Sup over common grid nodes in [0, T] of the state difference between two
// resolutions (fine grid contains the coarse one).
double grid_discrepancy(const SolutionPath& coarse, const SolutionPath& fine) {
  double worst = 0.0;
  for (int j = 0; j < coarse.num_nodes(); ++j) {
    double t = coarse.grid[j];
    if (t < 0.0) continue;
    worst = std::max(
        worst, (coarse.values[j] - fine.value_at(t)).cwiseAbs().maxCoeff());
  }
  return worst;
}

nlohmann::json run_simulate(const RunConfig& cfg, const std::filesystem::path& dir) {
  SolutionPath sol = solve_one(cfg, cfg.step, derive_seed(cfg.seed, 0));
  std::string csv = cfg.prefix + ".csv";
  std::string meta = cfg.prefix + "_meta.json";
  write_solution_csv((dir / csv).string(), sol, cfg.output_frames);
  write_sidecar_json((dir / meta).string(), sol, cfg.dump_driver);

  double det_min = 1.0, det_max = 1.0;
  for (const auto& f : sol.frames) {
    double d = f.determinant();
    det_min = std::min(det_min, d);
    det_max = std::max(det_max, d);
  }
  nlohmann::json report;
  report["mode"] = "simulate";
  report["files"] = {csv, meta};
  report["nodes"] = sol.num_nodes();
  report["jumps"] = static_cast<int>(sol.jump_nodes.size());
  report["final_state"] = vec_json(sol.values.back());
  report["frame_det_min"] = det_min;
  report["frame_det_max"] = det_max;
  report["warnings"] = sol.warnings;
  return report;
}

nlohmann::json run_ensemble(const RunConfig& cfg, const std::filesystem::path& dir) {
  const int n = cfg.ensemble;
  std::vector<Eigen::VectorXd> finals(n);
  std::vector<int> jump_counts(n, 0);
  std::vector<std::string> files;
  std::vector<std::exception_ptr> errors(n);

  auto worker = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      try {
        SolutionPath sol = solve_one(cfg, cfg.step, derive_seed(cfg.seed, i));
        finals[i] = sol.values.back();
        jump_counts[i] = static_cast<int>(sol.jump_nodes.size());
        if (cfg.write_trajectories) {
          char name[64];
          std::snprintf(name, sizeof(name), "%s_%05d.csv", cfg.prefix.c_str(), i);
          write_solution_csv((dir / name).string(), sol, cfg.output_frames);
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  int threads = std::max(1, cfg.threads);
  if (threads == 1 || n == 1) {
    worker(0, n);
  } else {
    threads = std::min(threads, n);
    std::vector<std::thread> pool;
    int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back(worker, t * chunk, std::min(n, (t + 1) * chunk));
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  if (cfg.write_trajectories)
    for (int i = 0; i < n; ++i) {
      char name[64];
      std::snprintf(name, sizeof(name), "%s_%05d.csv", cfg.prefix.c_str(), i);
      files.emplace_back(name);
    }

  const int dim = cfg.manifold.dim;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (const auto& v : finals) mean += v;
  mean /= n;
  Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
  if (n > 1) {
    for (const auto& v : finals) var += (v - mean).cwiseAbs2();
    var /= (n - 1);
  }
  double mean_jumps = 0.0;
  for (int c : jump_counts) mean_jumps += c;
  mean_jumps /= n;

  nlohmann::json report;
  report["mode"] = "ensemble";
  report["trajectories"] = n;
  report["files"] = files;
  report["final_mean"] = vec_json(mean);
  report["final_variance"] = vec_json(var);
  report["mean_jump_count"] = mean_jumps;
  return report;
}

nlohmann::json run_transport(const RunConfig& cfg, const std::filesystem::path&) {
  if (!cfg.curve) throw ConfigError("transport mode requires a curve");
  TransportMatrix p = transport_segment(cfg.manifold, *cfg.curve);

  nlohmann::json report;
  report["mode"] = "transport";
  report["from"] = vec_json(p.from_point.coords);
  report["to"] = vec_json(p.to_point.coords);
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < p.matrix.rows(); ++r)
    rows.push_back(vec_json(p.matrix.row(r).transpose()));
  report["matrix"] = rows;
  report["determinant"] = p.matrix.determinant();

  bool closed = (p.from_point.coords - p.to_point.coords).cwiseAbs().maxCoeff() < 1e-12;
  report["closed_loop"] = closed;
  if (cfg.manifold.metric && cfg.manifold.dim == 2) {
    // Rotation angle in the orthonormal gauge u -> L^T u with g = L L^T.
    Eigen::MatrixXd g0 = (*cfg.manifold.metric)(p.from_point);
    Eigen::MatrixXd g1 = (*cfg.manifold.metric)(p.to_point);
    Eigen::MatrixXd l0 = Eigen::LLT<Eigen::MatrixXd>(g0).matrixL();
    Eigen::MatrixXd l1 = Eigen::LLT<Eigen::MatrixXd>(g1).matrixL();
    Eigen::MatrixXd o =
        l1.transpose() * p.matrix * l0.transpose().partialPivLu().inverse();
    report["orthonormal_angle"] = std::atan2(o(1, 0), o(0, 0));
    report["orthogonality_defect"] =
        (o.transpose() * o - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff();
  }
  return report;
}

nlohmann::json run_lift_check(const RunConfig& cfg, const std::filesystem::path&) {
  nlohmann::json results = nlohmann::json::array();

  if (cfg.m == 0) {
    for (double h : cfg.step_list) {
      DriverPath driver = build_driver(cfg, h, derive_seed(cfg.seed, 0));
      nlohmann::json row;
      row["h"] = h;
      row["max_frame_discrepancy"] = lift_discrepancy(cfg, driver, h);
      results.push_back(row);
    }
  } else {
    // Per path, a Brownian-bridge chain keeps the driver consistent across
    // resolutions; discrepancies are summarized by the median over paths.
    std::vector<std::vector<double>> per_h(cfg.step_list.size());
    for (int i = 0; i < cfg.paths; ++i) {
      std::uint64_t s = derive_seed(cfg.seed, i);
      DriverPath driver = build_driver(cfg, cfg.step_list[0], s);
      for (std::size_t k = 0; k < cfg.step_list.size(); ++k) {
        if (k > 0) driver = refine_half(driver, derive_seed(s, 1000 + k));
        per_h[k].push_back(lift_discrepancy(cfg, driver, cfg.step_list[k]));
      }
    }
    for (std::size_t k = 0; k < cfg.step_list.size(); ++k) {
      auto& v = per_h[k];
      std::sort(v.begin(), v.end());
      double med = v.size() % 2 ? v[v.size() / 2]
                                : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
      nlohmann::json row;
      row["h"] = cfg.step_list[k];
      row["median_frame_discrepancy"] = med;
      row["paths"] = v;
      results.push_back(row);
    }
  }

  nlohmann::json report;
  report["mode"] = "lift-check";
  report["results"] = results;
  return report;
}

nlohmann::json run_convergence(const RunConfig& cfg, const std::filesystem::path&) {
  std::vector<double> discrepancies;

  if (cfg.m == 0) {
    std::vector<SolutionPath> sols;
    for (double h : cfg.step_list)
      sols.push_back(solve_one(cfg, h, derive_seed(cfg.seed, 0)));
    for (std::size_t k = 0; k + 1 < sols.size(); ++k)
      discrepancies.push_back(grid_discrepancy(sols[k], sols[k + 1]));
  } else {
    std::vector<std::vector<double>> per_pair(cfg.step_list.size() - 1);
    for (int i = 0; i < cfg.paths; ++i) {
      std::uint64_t s = derive_seed(cfg.seed, i);
      DriverPath driver = build_driver(cfg, cfg.step_list[0], s);
      EquationSpec eq = equation_of(cfg);
      SolutionPath prev = solve_sddej(eq, driver, solver_config(cfg, cfg.step_list[0]));
      for (std::size_t k = 1; k < cfg.step_list.size(); ++k) {
        driver = refine_half(driver, derive_seed(s, 1000 + k));
        SolutionPath cur = solve_sddej(eq, driver, solver_config(cfg, cfg.step_list[k]));
        per_pair[k - 1].push_back(grid_discrepancy(prev, cur));
        prev = std::move(cur);
      }
    }
    for (auto& v : per_pair) {
      std::sort(v.begin(), v.end());
      discrepancies.push_back(v.size() % 2
                                  ? v[v.size() / 2]
                                  : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]));
    }
  }

  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t k = 0; k < discrepancies.size(); ++k) {
    nlohmann::json row;
    row["h_coarse"] = cfg.step_list[k];
    row["h_fine"] = cfg.step_list[k + 1];
    row["discrepancy"] = discrepancies[k];
    if (k > 0 && discrepancies[k] > 0.0)
      row["ratio"] = discrepancies[k - 1] / discrepancies[k];
    rows.push_back(row);
  }
  nlohmann::json report;
  report["mode"] = "convergence";
  report["results"] = rows;
  return report;
}

}  // namespace

DriverPath build_driver(const RunConfig& cfg, double h, std::uint64_t trajectory_seed) {
  DriverPath d = sample_brownian(trajectory_seed, h, cfg.horizon, cfg.m);
  JumpSchedule raw;
  switch (cfg.jump_kind) {
    case JumpKind::none:
      break;
    case JumpKind::schedule:
      raw = cfg.schedule;
      break;
    case JumpKind::poisson:
      if (!cfg.mark_law) throw ConfigError("poisson jumps require a mark law");
      raw = sample_poisson_schedule(trajectory_seed, cfg.poisson_rate, cfg.horizon,
                                    *cfg.mark_law, cfg.m);
      break;
  }
  d.schedule = snap_schedule(raw, h, cfg.horizon);
  return d;
}

SolutionPath solve_one(const RunConfig& cfg, double h, std::uint64_t trajectory_seed) {
  EquationSpec eq = equation_of(cfg);
  SolverConfig sc = solver_config(cfg, h);
  DriverPath driver = build_driver(cfg, h, trajectory_seed);
  if (sc.scheme == Scheme::rk4_deterministic) {
    if (cfg.m != 0) throw ConfigError("rk4 scheme requires a driver without Brownian components");
    return solve_ddej(eq, driver, sc);
  }
  return solve_sddej(eq, driver, sc);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_solution_csv(const std::string& path, const SolutionPath& sol, bool frames) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file " + path);
  const int dim = static_cast<int>(sol.values.front().size());
  out << "t";
  for (int i = 0; i < dim; ++i) out << ",x_" << (i + 1);
  if (frames)
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) out << ",e_" << (r + 1) << (c + 1);
  out << "\n";
  for (int j = 0; j < sol.num_nodes(); ++j) {
    out << format_double(sol.grid[j]);
    for (int i = 0; i < dim; ++i) out << "," << format_double(sol.values[j][i]);
    if (frames)
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) out << "," << format_double(sol.frames[j](r, c));
    out << "\n";
  }
}

void write_sidecar_json(const std::string& path, const SolutionPath& sol, bool dump_driver) {
  nlohmann::json meta;
  nlohmann::json jumps = nlohmann::json::array();
  for (std::size_t k = 0; k < sol.jump_nodes.size(); ++k) {
    int node = sol.jump_nodes[k];
    nlohmann::json j;
    j["time"] = sol.grid[node];
    j["mark"] = vec_json(sol.driver.schedule.marks[k]);
    j["pre"] = vec_json(sol.left_values[k]);
    j["post"] = vec_json(sol.values[node]);
    jumps.push_back(j);
  }
  meta["jumps"] = jumps;
  nlohmann::json dets = nlohmann::json::array();
  for (const auto& f : sol.frames) dets.push_back(f.determinant());
  meta["frame_determinants"] = dets;
  meta["warnings"] = sol.warnings;
  meta["step"] = sol.h;
  meta["delay_steps"] = sol.delay_steps;
  if (dump_driver) meta["driver"] = driver_to_json(sol.driver);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file " + path);
  out << meta.dump(2) << "\n";
}

nlohmann::json driver_to_json(const DriverPath& d) {
  nlohmann::json j;
  j["h"] = d.h;
  j["horizon"] = d.horizon;
  j["m"] = d.m;
  nlohmann::json inc = nlohmann::json::array();
  for (const auto& v : d.increments) inc.push_back(vec_json(v));
  j["increments"] = inc;
  j["jump_times"] = d.schedule.times;
  nlohmann::json marks = nlohmann::json::array();
  for (const auto& v : d.schedule.marks) marks.push_back(vec_json(v));
  j["jump_marks"] = marks;
  return j;
}

DriverPath driver_from_json(const nlohmann::json& j) {
  DriverPath d;
  d.h = j.at("h").get<double>();
  d.horizon = j.at("horizon").get<double>();
  d.m = j.at("m").get<int>();
  for (const auto& v : j.at("increments")) d.increments.push_back(vec_from_json(v));
  d.schedule.times = j.at("jump_times").get<std::vector<double>>();
  for (const auto& v : j.at("jump_marks")) d.schedule.marks.push_back(vec_from_json(v));
  d.schedule.validate();
  return d;
}

nlohmann::json run_experiment(const RunConfig& cfg, const std::string& out_dir) {
  std::filesystem::path dir = ensure_dir(out_dir);
  nlohmann::json report;
  if (cfg.mode == "simulate") {
    report = run_simulate(cfg, dir);
  } else if (cfg.mode == "ensemble") {
    report = run_ensemble(cfg, dir);
  } else if (cfg.mode == "transport") {
    report = run_transport(cfg, dir);
  } else if (cfg.mode == "lift-check") {
    report = run_lift_check(cfg, dir);
  } else if (cfg.mode == "convergence") {
    report = run_convergence(cfg, dir);
  } else {
    throw ConfigError("unknown mode " + cfg.mode);
  }
  report["seed"] = cfg.seed;
  write_text(dir / "report.json", report.dump(2) + "\n");
  return report;
}

nlohmann::json run_config_text(const std::string& config_json, const std::string& out_dir) {
  RunConfig cfg = parse_config(config_json);
  return run_experiment(cfg, out_dir);
}

}  // namespace ddej
