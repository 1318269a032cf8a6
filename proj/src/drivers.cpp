#include "drivers.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace ddej {

namespace {

int grid_steps(double h, double T, const char* what) {
  if (h <= 0.0) throw ConfigError("step h must be positive");
  const double ratio = T / h;
  const long long n = std::llround(ratio);
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9)
    throw ConfigError(std::string(what) + " must be a multiple of the step h");
  return static_cast<int>(n);
}

Eigen::VectorXd sample_mark(const MarkLaw& law, std::mt19937_64& rng, int m) {
  const int len = m + 1;
  if (const auto* c = std::get_if<ConstantMark>(&law)) {
    if (c->value.size() != len) throw ConfigError("constant mark length must be m + 1");
    return c->value;
  }
  if (const auto* g = std::get_if<GaussianMark>(&law)) {
    if (g->mean.size() != len) throw ConfigError("gaussian mark mean length must be m + 1");
    Eigen::LLT<Eigen::MatrixXd> llt(g->covariance);
    if (llt.info() != Eigen::Success)
      throw ConfigError("gaussian mark covariance must be positive definite");
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(len);
    for (int i = 0; i < len; ++i) z[i] = normal(rng);
    return g->mean + llt.matrixL() * z;
  }
  const auto& u = std::get<UniformBoxMark>(law);
  if (u.lo.size() != len || u.hi.size() != len)
    throw ConfigError("uniform mark bounds length must be m + 1");
  Eigen::VectorXd out(len);
  for (int i = 0; i < len; ++i) {
    std::uniform_real_distribution<double> unif(u.lo[i], u.hi[i]);
    out[i] = unif(rng);
  }
  return out;
}

}  // namespace

void JumpSchedule::validate() const {
  if (marks.size() != times.size())
    throw ConfigError("jump schedule needs one mark per jump time");
  for (size_t i = 0; i < times.size(); ++i) {
    if (times[i] <= 0.0) throw ConfigError("jump times must be positive");
    if (i > 0 && times[i] <= times[i - 1])
      throw ConfigError("jump times must strictly increase");
  }
}

int count_jumps(const JumpSchedule& schedule, double t) {
  auto it = std::upper_bound(schedule.times.begin(), schedule.times.end(), t);
  return static_cast<int>(it - schedule.times.begin());
}

Eigen::VectorXd DriverPath::continuous_part(double t) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m + 1);
  out[0] = t;
  if (m == 0) return out;
  const double pos = t / h;
  int j = static_cast<int>(std::floor(pos));
  j = std::clamp(j, 0, steps());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < j; ++k) b += increments[k];
  const double frac = pos - j;
  if (frac > 0.0 && j < steps()) b += frac * increments[j];
  out.tail(m) = b;
  return out;
}

Eigen::VectorXd DriverPath::value(double t) const {
  Eigen::VectorXd out = continuous_part(t);
  const int nj = count_jumps(schedule, t);
  for (int k = 0; k < nj; ++k) out += schedule.marks[k];
  return out;
}

JumpSchedule snap_schedule(const JumpSchedule& schedule, double h, double T) {
  schedule.validate();
  const int steps = grid_steps(h, T, "horizon T");
  JumpSchedule out;
  std::set<long long> used;
  for (size_t i = 0; i < schedule.times.size(); ++i) {
    if (schedule.times[i] > T) continue;
    long long node = std::llround(schedule.times[i] / h);
    if (node < 1) node = 1;
    while (node <= steps && used.count(node)) ++node;
    if (node > steps)
      throw ConfigError("cannot place jump on the grid: too many jumps near the horizon");
    used.insert(node);
    out.times.push_back(node * h);
    out.marks.push_back(schedule.marks[i]);
  }
  // Collision handling may only push times forward, so order is preserved,
  // but re-check the invariant.
  out.validate();
  return out;
}

DriverPath deterministic_integrator(const JumpSchedule& schedule, double T, double h) {
  for (const auto& mark : schedule.marks)
    if (mark.size() != 1) throw ConfigError("deterministic integrator needs scalar marks");
  DriverPath d;
  d.h = h;
  d.horizon = T;
  d.m = 0;
  d.increments.assign(grid_steps(h, T, "horizon T"), Eigen::VectorXd(0));
  d.schedule = snap_schedule(schedule, h, T);
  return d;
}

DriverPath sample_brownian(std::uint64_t seed, double h, double T, int m) {
  if (m < 0) throw ConfigError("number of Brownian components must be >= 0");
  DriverPath d;
  d.h = h;
  d.horizon = T;
  d.m = m;
  const int steps = grid_steps(h, T, "horizon T");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(h));
  d.increments.reserve(steps);
  for (int j = 0; j < steps; ++j) {
    Eigen::VectorXd dw(m);
    for (int i = 0; i < m; ++i) dw[i] = normal(rng);
    d.increments.push_back(std::move(dw));
  }
  return d;
}

JumpSchedule sample_poisson_schedule(std::uint64_t seed, double rate, double T,
                                     const MarkLaw& mark_law, int m) {
  if (rate < 0.0) throw ConfigError("jump rate must be nonnegative");
  JumpSchedule out;
  if (rate == 0.0) return out;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::exponential_distribution<double> expo(rate);
  double t = 0.0;
  while (true) {
    t += expo(rng);
    if (t > T) break;
    out.times.push_back(t);
    out.marks.push_back(sample_mark(mark_law, rng, m));
  }
  return out;
}

DriverPath refine_half(const DriverPath& driver, std::uint64_t seed) {
  DriverPath d;
  d.h = driver.h / 2.0;
  d.horizon = driver.horizon;
  d.m = driver.m;
  std::mt19937_64 rng(seed ^ 0xd1b54a32d192ed03ull);
  std::normal_distribution<double> normal(0.0, std::sqrt(driver.h / 4.0));
  d.increments.reserve(driver.increments.size() * 2);
  for (const auto& dw : driver.increments) {
    Eigen::VectorXd xi(d.m);
    for (int i = 0; i < d.m; ++i) xi[i] = normal(rng);
    d.increments.push_back(0.5 * dw + xi);
    d.increments.push_back(0.5 * dw - xi);
  }
  d.schedule = driver.schedule;  // old nodes remain nodes of the finer grid
  return d;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace ddej
