#include "ddej.h"

#include <cstring>
#include <new>
#include <string>

#include "config.hpp"
#include "errors.hpp"
#include "run.hpp"
#include "solver.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ddej_status status_of(const ddej::Error& e) {
  switch (e.category()) {
    case ddej::ErrorCategory::config:
      return DDEJ_ERR_CONFIG;
    case ddej::ErrorCategory::numerical:
      return DDEJ_ERR_NUMERICAL;
    case ddej::ErrorCategory::domain:
      return DDEJ_ERR_DOMAIN;
    case ddej::ErrorCategory::contract:
    case ddej::ErrorCategory::range:
      return DDEJ_ERR_INTERNAL;
  }
  return DDEJ_ERR_INTERNAL;
}

template <typename Fn>
ddej_status guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return DDEJ_OK;
  } catch (const ddej::Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DDEJ_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return DDEJ_ERR_INTERNAL;
  }
}

}  // namespace

struct ddej_solution {
  ddej::SolutionPath sol;
};

extern "C" {

const char* ddej_version(void) { return "0.1.0"; }

const char* ddej_last_error(void) { return g_last_error.c_str(); }

void ddej_free_string(char* s) { delete[] s; }

ddej_status ddej_run_config(const char* config_json, const char* out_dir,
                            char** report_json_out) {
  return guard([&] {
    if (!config_json || !out_dir) throw ddej::ConfigError("null argument");
    nlohmann::json report = ddej::run_config_text(config_json, out_dir);
    if (report_json_out) *report_json_out = dup_string(report.dump(2));
  });
}

ddej_status ddej_simulate(const char* config_json, ddej_solution** out) {
  return guard([&] {
    if (!config_json || !out) throw ddej::ConfigError("null argument");
    ddej::RunConfig cfg = ddej::parse_config(config_json);
    if (cfg.mode != "simulate")
      throw ddej::ConfigError("ddej_simulate requires mode \"simulate\"");
    auto* handle = new ddej_solution{
        ddej::solve_one(cfg, cfg.step, ddej::derive_seed(cfg.seed, 0))};
    *out = handle;
  });
}

void ddej_solution_free(ddej_solution* s) { delete s; }

int ddej_solution_dim(const ddej_solution* s) {
  return s ? static_cast<int>(s->sol.values.front().size()) : 0;
}

int ddej_solution_num_nodes(const ddej_solution* s) {
  return s ? s->sol.num_nodes() : 0;
}

ddej_status ddej_solution_node(const ddej_solution* s, int j, double* t_out,
                               double* coords_out, double* frame_out) {
  return guard([&] {
    if (!s) throw ddej::ConfigError("null solution handle");
    if (j < 0 || j >= s->sol.num_nodes())
      throw ddej::RangeError("node index out of range");
    const int dim = static_cast<int>(s->sol.values[j].size());
    if (t_out) *t_out = s->sol.grid[j];
    if (coords_out)
      for (int i = 0; i < dim; ++i) coords_out[i] = s->sol.values[j][i];
    if (frame_out)
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) frame_out[r * dim + c] = s->sol.frames[j](r, c);
  });
}

int ddej_solution_num_jumps(const ddej_solution* s) {
  return s ? static_cast<int>(s->sol.jump_nodes.size()) : 0;
}

ddej_status ddej_solution_jump(const ddej_solution* s, int k, double* t_out,
                               double* pre_out, double* post_out) {
  return guard([&] {
    if (!s) throw ddej::ConfigError("null solution handle");
    if (k < 0 || k >= static_cast<int>(s->sol.jump_nodes.size()))
      throw ddej::RangeError("jump index out of range");
    int node = s->sol.jump_nodes[k];
    const int dim = static_cast<int>(s->sol.values[node].size());
    if (t_out) *t_out = s->sol.grid[node];
    if (pre_out)
      for (int i = 0; i < dim; ++i) pre_out[i] = s->sol.left_values[k][i];
    if (post_out)
      for (int i = 0; i < dim; ++i) post_out[i] = s->sol.values[node][i];
  });
}

}  // extern "C"
