#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ddej {

using nlohmann::json;

namespace {

Eigen::VectorXd to_vector(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of numbers");
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

Eigen::MatrixXd to_matrix(const json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ConfigError(std::string(what) + " must be an array of rows");
  const size_t rows = j.size(), cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw ConfigError(std::string(what) + " rows must have equal length");
    for (size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

VectorFieldSpec parse_field(const json& j, int dim) {
  const std::string type = j.value("type", "");
  if (type == "zero") return zero_field(dim);
  if (type == "constant") {
    Eigen::VectorXd c = to_vector(j.at("components"), "field components");
    if (c.size() != dim) throw ConfigError("constant field components must match the chart dimension");
    return constant_field(std::move(c));
  }
  if (type == "linear") {
    Eigen::MatrixXd m = to_matrix(j.at("matrix"), "field matrix");
    if (m.rows() != dim || m.cols() != dim)
      throw ConfigError("linear field matrix must be dim x dim");
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
    if (j.contains("offset")) b = to_vector(j["offset"], "field offset");
    if (b.size() != dim) throw ConfigError("linear field offset must match the chart dimension");
    return linear_field(std::move(m), std::move(b));
  }
  if (type == "rotation") {
    if (dim != 2) throw ConfigError("rotation field requires a 2-d chart");
    return rotation_field(j.value("scale", 1.0));
  }
  throw ConfigError("unknown field type '" + type + "'");
}

MarkLaw parse_mark_law(const json& j, int m) {
  const std::string type = j.value("type", "");
  if (type == "constant") return ConstantMark{to_vector(j.at("value"), "mark value")};
  if (type == "gaussian") {
    GaussianMark g;
    g.mean = to_vector(j.at("mean"), "mark mean");
    if (j.contains("covariance")) {
      g.covariance = to_matrix(j["covariance"], "mark covariance");
    } else if (j.contains("cov_diag")) {
      const Eigen::VectorXd d = to_vector(j["cov_diag"], "mark cov_diag");
      g.covariance = d.asDiagonal();
    } else {
      g.covariance = Eigen::MatrixXd::Identity(m + 1, m + 1);
    }
    return g;
  }
  if (type == "uniform")
    return UniformBoxMark{to_vector(j.at("lo"), "mark lo"), to_vector(j.at("hi"), "mark hi")};
  throw ConfigError("unknown mark law '" + type + "'");
}

// Sampled initial curve from CSV with columns t, x_1..x_n, v_1..v_n.
PathSegment load_curve_csv(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open curve file '" + path + "'");
  PathSegment seg;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {  // header
      first = false;
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<int>(row.size()) != 1 + 2 * dim)
      throw ConfigError("curve file rows need 1 + 2*dim columns (t, x.., v..)");
    seg.times.push_back(row[0]);
    seg.points.push_back(Eigen::Map<Eigen::VectorXd>(row.data() + 1, dim));
    seg.velocities.push_back(Eigen::Map<Eigen::VectorXd>(row.data() + 1 + dim, dim));
  }
  seg.validate();
  return seg;
}

PathSegment parse_transport_curve(const json& j, int dim) {
  const std::string type = j.value("type", "");
  const int nodes = j.value("nodes", 1000);
  if (nodes < 2) throw ConfigError("transport curve needs at least 2 nodes");
  if (type == "latitude_loop") {
    if (dim != 2) throw ConfigError("latitude_loop requires a 2-d chart");
    const double theta = j.at("theta").get<double>();
    const double turns = j.value("turns", 1.0);
    PathSegment seg;
    for (int i = 0; i < nodes; ++i) {
      const double t = static_cast<double>(i) / (nodes - 1);
      Eigen::VectorXd p(2), v(2);
      p << theta, 2.0 * M_PI * turns * t;
      v << 0.0, 2.0 * M_PI * turns;
      seg.times.push_back(t);
      seg.points.push_back(p);
      seg.velocities.push_back(v);
    }
    return seg;
  }
  if (type == "chart_line") {
    const Eigen::VectorXd from = to_vector(j.at("from"), "curve from");
    const Eigen::VectorXd to = to_vector(j.at("to"), "curve to");
    if (from.size() != dim || to.size() != dim)
      throw ConfigError("curve endpoints must match the chart dimension");
    PathSegment seg;
    const Eigen::VectorXd v = to - from;
    for (int i = 0; i < nodes; ++i) {
      const double t = static_cast<double>(i) / (nodes - 1);
      seg.times.push_back(t);
      seg.points.push_back(from + t * v);
      seg.velocities.push_back(v);
    }
    return seg;
  }
  if (type == "curve_file") return load_curve_csv(j.at("path").get<std::string>(), dim);
  throw ConfigError("unknown transport curve type '" + type + "'");
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  RunConfig cfg;
  static const std::set<std::string> modes = {"simulate", "lift-check", "transport",
                                              "convergence", "ensemble"};
  cfg.mode = j.value("mode", "");
  if (!modes.count(cfg.mode))
    throw ConfigError("mode must be one of simulate | lift-check | transport | convergence | ensemble");

  cfg.seed = j.value("seed", 0ull);
  cfg.threads = j.value("threads", 1);
  if (cfg.threads < 1) throw ConfigError("threads must be >= 1");

  if (!j.contains("manifold")) throw ConfigError("missing 'manifold' section");
  const auto& jm = j["manifold"];
  cfg.manifold = builtin_manifold(jm.value("name", ""), jm.value("dim", 0));
  const int dim = cfg.manifold.dim;

  if (cfg.mode == "transport") {
    if (!j.contains("curve")) throw ConfigError("transport mode needs a 'curve' section");
    cfg.curve = parse_transport_curve(j["curve"], dim);
    return cfg;
  }

  // Driver.
  if (j.contains("driver")) {
    const auto& jd = j["driver"];
    cfg.m = jd.value("brownian_components", 0);
    if (cfg.m < 0) throw ConfigError("brownian_components must be >= 0");
    if (jd.contains("jumps")) {
      const auto& jj = jd["jumps"];
      const std::string type = jj.value("type", "none");
      if (type == "schedule") {
        cfg.jump_kind = JumpKind::schedule;
        for (const auto& t : jj.at("times")) cfg.schedule.times.push_back(t.get<double>());
        for (const auto& mk : jj.at("marks"))
          cfg.schedule.marks.push_back(to_vector(mk, "jump mark"));
        cfg.schedule.validate();
        for (const auto& mk : cfg.schedule.marks)
          if (mk.size() != cfg.m + 1)
            throw ConfigError("jump marks must have length m + 1");
      } else if (type == "poisson") {
        cfg.jump_kind = JumpKind::poisson;
        cfg.poisson_rate = jj.at("rate").get<double>();
        if (cfg.poisson_rate < 0.0) throw ConfigError("jump rate must be nonnegative");
        cfg.mark_law = parse_mark_law(jj.at("mark"), cfg.m);
      } else if (type != "none") {
        throw ConfigError("unknown jump spec type '" + type + "'");
      }
    }
  }

  // Fields.
  if (!j.contains("fields")) throw ConfigError("missing 'fields' array");
  for (const auto& jf : j["fields"]) cfg.fields.push_back(parse_field(jf, dim));
  if (static_cast<int>(cfg.fields.size()) != cfg.m + 1)
    throw ConfigError("need exactly m + 1 fields (drift first), got " +
                      std::to_string(cfg.fields.size()));

  // Grid.
  cfg.delay = j.value("delay", 0.0);
  cfg.step = j.value("step", 0.0);
  cfg.horizon = j.value("horizon", 0.0);
  if (cfg.delay <= 0.0) throw ConfigError("delay must be positive");
  if (cfg.step <= 0.0) throw ConfigError("step must be positive");
  if (cfg.horizon <= 0.0) throw ConfigError("horizon must be positive");
  auto is_multiple = [](double value, double h) {
    const double r = value / h;
    return std::abs(r - std::llround(r)) <= 1e-9 && std::llround(r) >= 1;
  };
  if (!is_multiple(cfg.delay, cfg.step)) throw ConfigError("step must divide the delay exactly");
  if (!is_multiple(cfg.horizon, cfg.step)) throw ConfigError("step must divide the horizon exactly");

  if (j.contains("scheme")) {
    const std::string s = j["scheme"].get<std::string>();
    if (s == "rk4" || s == "rk4_deterministic")
      cfg.scheme = Scheme::rk4_deterministic;
    else if (s == "heun" || s == "heun_stratonovich")
      cfg.scheme = Scheme::heun_stratonovich;
    else
      throw ConfigError("unknown scheme '" + s + "'");
  }
  cfg.fictitious_steps = j.value("fictitious_steps", 64);
  if (cfg.fictitious_steps < 1) throw ConfigError("fictitious_steps must be >= 1");
  cfg.metric_projection = j.value("metric_projection", false);

  // Initial condition.
  if (!j.contains("initial")) throw ConfigError("missing 'initial' section");
  const auto& ji = j["initial"];
  const std::string itype = ji.value("type", "");
  if (itype == "constant") {
    const Eigen::VectorXd p = to_vector(ji.at("point"), "initial point");
    if (p.size() != dim) throw ConfigError("initial point must match the chart dimension");
    cfg.initial_curve = constant_segment(p, -cfg.delay, 0.0);
  } else if (itype == "curve_file") {
    cfg.initial_curve = load_curve_csv(ji.at("path").get<std::string>(), dim);
    if (std::abs(cfg.initial_curve.start_time() + cfg.delay) > 1e-9 ||
        std::abs(cfg.initial_curve.end_time()) > 1e-9)
      throw ConfigError("initial curve file must span exactly [-delay, 0]");
  } else {
    throw ConfigError("initial.type must be 'constant' or 'curve_file'");
  }
  if (!cfg.manifold.domain_check(ChartPoint{cfg.initial_curve.end_point()}))
    throw ConfigError("initial curve endpoint lies outside the chart domain");

  // Output.
  if (j.contains("output")) {
    const auto& jo = j["output"];
    cfg.output_frames = jo.value("frames", false);
    cfg.dump_driver = jo.value("driver_dump", false);
    cfg.write_trajectories = jo.value("write_trajectories", true);
    cfg.prefix = jo.value("prefix", std::string("traj"));
  }

  cfg.ensemble = j.value("ensemble", 1);
  if (cfg.ensemble < 1) throw ConfigError("ensemble size must be >= 1");

  // Refinement lists for lift-check / convergence.
  if (j.contains("steps")) {
    for (const auto& s : j["steps"]) cfg.step_list.push_back(s.get<double>());
    if (cfg.step_list.empty()) throw ConfigError("'steps' must be a nonempty array");
    for (size_t i = 0; i < cfg.step_list.size(); ++i) {
      if (cfg.step_list[i] <= 0.0) throw ConfigError("steps must be positive");
      if (i > 0 && std::abs(cfg.step_list[i - 1] / cfg.step_list[i] - 2.0) > 1e-9)
        throw ConfigError("steps must halve successively");
      if (!is_multiple(cfg.delay, cfg.step_list[i]) || !is_multiple(cfg.horizon, cfg.step_list[i]))
        throw ConfigError("every step in 'steps' must divide the delay and the horizon");
    }
  } else if (cfg.mode == "lift-check" || cfg.mode == "convergence") {
    cfg.step_list = {cfg.step, cfg.step / 2.0};
    if (!is_multiple(cfg.delay, cfg.step_list[1]))
      throw ConfigError("step/2 must divide the delay (or give an explicit 'steps' list)");
  }

  cfg.initial_frame = Eigen::MatrixXd::Identity(dim, dim);
  if (j.contains("initial_frame")) {
    cfg.initial_frame = to_matrix(j["initial_frame"], "initial_frame");
    if (cfg.initial_frame.rows() != dim || cfg.initial_frame.cols() != dim)
      throw ConfigError("initial_frame must be dim x dim");
  }
  cfg.paths = j.value("paths", 20);
  if (cfg.paths < 1) throw ConfigError("paths must be >= 1");

  return cfg;
}

}  // namespace ddej
