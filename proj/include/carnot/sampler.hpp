#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <vector>

#include "carnot/holder.hpp"
#include "carnot/parallel.hpp"
#include "carnot/path.hpp"
#include "carnot/rng.hpp"
#include "carnot/stats.hpp"
#include "carnot/subelliptic.hpp"

namespace carnot {

enum class DriftMode { none, divergence_form };

struct SamplerConfig {
  int steps_per_unit = 256;       // Euler steps per unit time
  std::uint64_t seed = 0;
  DriftMode drift = DriftMode::none;
  double fd_step = 1e-4;          // finite-difference step for the drift
  int min_steps = 1;
  int threads = 0;                // for the M-path estimators; 0 = hardware

  void validate() const {
    require(steps_per_unit >= 1, "SamplerConfig: steps_per_unit must be >= 1");
    require(fd_step > 0.0, "SamplerConfig: fd_step must be positive");
    require(min_steps >= 1, "SamplerConfig: min_steps must be >= 1");
  }
};

namespace detail {

/// Symmetric square root of 2a with an ellipticity check on the eigenvalues.
inline Eigen::MatrixXd diffusion_root(const Eigen::MatrixXd& a, double lambda,
                                      std::int64_t step) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const auto& ev = es.eigenvalues();
  const double slack = 1e-9 * std::max(1.0, lambda);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < 1.0 / lambda - slack || ev[i] > lambda + slack)
      throw EllipticityViolation(
          "diffusion field eigenvalue " + std::to_string(ev[i]) +
              " outside [1/Lambda, Lambda] at step " + std::to_string(step),
          step);
  }
  Eigen::VectorXd roots(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) roots[i] = std::sqrt(2.0 * std::max(ev[i], 0.0));
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
}

/// Divergence-form drift b^j = sum_i U_i a^{ij}, by central differences along
/// the flows x -> x exp(t e_i) of the generating fields.
inline Eigen::VectorXd divergence_drift(const SubellipticField& a, const GroupElement& x,
                                        double fd) {
  const int d = a.dim();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  std::vector<double> dir(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < d; ++i) {
    dir[static_cast<std::size_t>(i)] = fd;
    const Eigen::MatrixXd ap = a(x * exp_level1(dir, x.depth()));
    dir[static_cast<std::size_t>(i)] = -fd;
    const Eigen::MatrixXd am = a(x * exp_level1(dir, x.depth()));
    dir[static_cast<std::size_t>(i)] = 0.0;
    b += (ap.row(i) - am.row(i)).transpose() / (2.0 * fd);
  }
  return b;
}

}  // namespace detail

/// Euler scheme for the subelliptic diffusion on the group, consuming noise
/// from an externally owned stream:
///   X_{k+1} = X_k exp(sigma(X_k) dB_k + b(X_k) dt),  sigma sigma^T = 2 a.
/// The factor 2 pins the generator normalization: for constant a the level-1
/// increment covariance over [0,t] is exactly 2 a t.
inline GroupPath simulate_diffusion_stream(const SubellipticField& a, const GroupElement& x0,
                                           double T, const SamplerConfig& cfg, Rng& rng) {
  cfg.validate();
  require_dims(a.dim() == x0.dim(), "simulate_diffusion: field/start dimension mismatch");
  require(T >= 0.0, "simulate_diffusion: T must be nonnegative");
  const int d = x0.dim(), N = x0.depth();

  if (T == 0.0) return GroupPath({0.0}, {x0});

  const int steps = std::max(cfg.min_steps,
                             static_cast<int>(std::ceil(cfg.steps_per_unit * T)));
  const double dt = T / steps;
  const double sqdt = std::sqrt(dt);

  std::vector<double> times(static_cast<std::size_t>(steps) + 1);
  std::vector<GroupElement> vals;
  vals.reserve(times.size());
  times[0] = 0.0;
  vals.push_back(x0);

  const bool constant = a.is_constant();
  Eigen::MatrixXd sigma;
  if (constant) sigma = detail::diffusion_root(a(x0), a.lambda(), 0);

  std::vector<double> inc(static_cast<std::size_t>(d));
  for (int k = 0; k < steps; ++k) {
    const GroupElement& x = vals.back();
    if (!constant) sigma = detail::diffusion_root(a(x), a.lambda(), k);
    Eigen::VectorXd noise(d);
    for (int j = 0; j < d; ++j) noise[j] = rng.gaussian() * sqdt;
    Eigen::VectorXd v = sigma * noise;
    if (cfg.drift == DriftMode::divergence_form)
      v += detail::divergence_drift(a, x, cfg.fd_step) * dt;
    for (int j = 0; j < d; ++j) inc[static_cast<std::size_t>(j)] = v[j];
    vals.push_back(x * exp_level1(inc, N));
    times[static_cast<std::size_t>(k) + 1] = dt * (k + 1);
  }
  times.back() = T;
  return GroupPath(std::move(times), std::move(vals));
}

/// As above, with the path's RNG substream derived from (seed, path_index),
/// so M paths are reproducible independently of how work is scheduled.
///
/// Euler stepping assumes the field can be evaluated pointwise along the
/// path; merely measurable fields are outside what the scheme can simulate
/// faithfully, so the shipped fields are constant, smooth in the first
/// level, or mollified variants.
inline GroupPath simulate_diffusion(const SubellipticField& a, const GroupElement& x0, double T,
                                    const SamplerConfig& cfg, std::uint64_t path_index = 0) {
  Rng rng(cfg.seed, path_index);
  return simulate_diffusion_stream(a, x0, T, cfg, rng);
}

// ---------------------------------------------------------------------------

/// Monte Carlo estimates of the short-time generator moments at x0:
/// first^k  ~ E[X^k_{0,t}] / t        (drift of the level-1 coordinates)
/// second^kl ~ E[X^k X^l] / t         (limit 2 a^{kl} at x0)
/// area^kl  ~ E[antisym level-2] / t  (limit 0)
struct MomentEstimates {
  Eigen::VectorXd first, first_se;
  Eigen::MatrixXd second, second_se;
  Eigen::MatrixXd area, area_se;
  double t = 0.0;
  std::int64_t samples = 0;
};

inline MomentEstimates generator_moments(const SubellipticField& a, const GroupElement& x0,
                                         double t, std::int64_t M, const SamplerConfig& cfg) {
  require(t > 0.0, "generator_moments: t must be positive");
  require(M >= 1000, "generator_moments: need M >= 1000");
  const int d = x0.dim();

  std::vector<Eigen::VectorXd> lvl1(static_cast<std::size_t>(M));
  std::vector<Eigen::MatrixXd> lvl2(static_cast<std::size_t>(M));
  const GroupElement x0_inv = group_inverse(x0);
  parallel_for(static_cast<std::size_t>(M), cfg.threads, [&](std::size_t i) {
    GroupPath p = simulate_diffusion(a, x0, t, cfg, i);
    const GroupElement inc = GroupElement(mul(x0_inv.series(), p.value(p.size() - 1).series()));
    Eigen::VectorXd v(d);
    for (int j = 0; j < d; ++j) v[j] = inc.level1()[static_cast<std::size_t>(j)];
    lvl1[i] = v;
    Eigen::MatrixXd m(d, d);
    const auto& l2 = inc.series().level(2);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) m(r, c) = l2[static_cast<std::size_t>(r * d + c)];
    lvl2[i] = m;
  });

  MomentEstimates out;
  out.t = t;
  out.samples = M;
  out.first = Eigen::VectorXd::Zero(d);
  out.first_se = Eigen::VectorXd::Zero(d);
  out.second = Eigen::MatrixXd::Zero(d, d);
  out.second_se = Eigen::MatrixXd::Zero(d, d);
  out.area = Eigen::MatrixXd::Zero(d, d);
  out.area_se = Eigen::MatrixXd::Zero(d, d);

  for (int j = 0; j < d; ++j) {
    OnlineMoments om;
    for (const auto& v : lvl1) om.add(v[j]);
    out.first[j] = om.mean() / t;
    out.first_se[j] = om.standard_error() / t;
  }
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      OnlineMoments prod, ar;
      for (std::size_t i = 0; i < lvl1.size(); ++i) {
        prod.add(lvl1[i][r] * lvl1[i][c]);
        ar.add(0.5 * (lvl2[i](r, c) - lvl2[i](c, r)));
      }
      out.second(r, c) = prod.mean() / t;
      out.second_se(r, c) = prod.standard_error() / t;
      out.area(r, c) = ar.mean() / t;
      out.area_se(r, c) = ar.standard_error() / t;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

struct ProbabilityEstimate {
  std::int64_t successes = 0;
  std::int64_t samples = 0;
  double estimate = 0.0;
  Interval wilson;
};

/// Per-path supremum of dist(X_0, X_t) over the grid of [0, eps].
/// The short window is resolved with at least `min_steps` Euler steps.
inline std::vector<double> sup_distance_samples(const SubellipticField& a,
                                                const GroupElement& x0, double eps,
                                                std::int64_t M, SamplerConfig cfg) {
  require(eps > 0.0, "sup_distance_samples: eps must be positive");
  cfg.min_steps = std::max(cfg.min_steps, 16);
  std::vector<double> sup(static_cast<std::size_t>(M), 0.0);
  parallel_for(static_cast<std::size_t>(M), cfg.threads, [&](std::size_t i) {
    GroupPath p = simulate_diffusion(a, x0, eps, cfg, i);
    IncrementTable tab(p);
    double s = 0.0;
    for (std::size_t j = 1; j < p.size(); ++j) s = std::max(s, tab.dist(0, j));
    sup[i] = s;
  });
  return sup;
}

/// P[ sup_{t <= eps} dist(X_0, X_t) > c ] by M independent paths.
inline ProbabilityEstimate tail_sup_probability(const SubellipticField& a, const GroupElement& x0,
                                                double c, double eps, std::int64_t M,
                                                const SamplerConfig& cfg) {
  require(c >= 0.0, "tail_sup_probability: c must be nonnegative");
  const auto sup = sup_distance_samples(a, x0, eps, M, cfg);
  ProbabilityEstimate out;
  out.samples = M;
  for (double s : sup)
    if (s > c) ++out.successes;
  out.estimate = static_cast<double>(out.successes) / static_cast<double>(M);
  out.wilson = wilson_interval(out.successes, M);
  return out;
}

struct ConditionalEstimate {
  std::int64_t survivors = 0;   // paths inside the ball at time s
  std::int64_t returns = 0;     // survivors inside the ball again at s + eps
  std::int64_t samples = 0;
  double estimate = 0.0;
  Interval wilson;
};

/// P[ X_{s+eps} in B(center, C2 sqrt(eps)) | X_s in B(center, C2 sqrt(eps)) ]
/// by rejection: simulate to s, keep paths inside the ball, continue them to
/// s + eps.  Throws InsufficientConditioningMass when fewer than `min_survivors`
/// paths satisfy the conditioning event.
inline ConditionalEstimate ball_return_probability(const SubellipticField& a,
                                                   const GroupElement& x0,
                                                   const GroupElement& center, double C2,
                                                   double s, double eps, std::int64_t M,
                                                   const SamplerConfig& cfg,
                                                   std::int64_t min_survivors = 50) {
  require(C2 > 0.0 && eps > 0.0 && s >= 0.0, "ball_return_probability: inputs must be positive");
  const double radius = C2 * std::sqrt(eps);

  std::vector<unsigned char> in_at_s(static_cast<std::size_t>(M), 0);
  std::vector<unsigned char> in_at_se(static_cast<std::size_t>(M), 0);
  parallel_for(static_cast<std::size_t>(M), cfg.threads, [&](std::size_t i) {
    Rng rng(cfg.seed, i);
    // leg one: [0, s]; leg two: [s, s+eps] continuing the same substream
    GroupElement xs = x0;
    if (s > 0.0) {
      GroupPath p1 = simulate_diffusion_stream(a, x0, s, cfg, rng);
      xs = p1.value(p1.size() - 1);
    }
    if (group_distance(center, xs) > radius) return;
    in_at_s[i] = 1;
    GroupPath p2 = simulate_diffusion_stream(a, xs, eps, cfg, rng);
    const GroupElement xe = p2.value(p2.size() - 1);
    if (group_distance(center, xe) <= radius) in_at_se[i] = 1;
  });

  ConditionalEstimate out;
  out.samples = M;
  for (std::size_t i = 0; i < in_at_s.size(); ++i) {
    out.survivors += in_at_s[i];
    out.returns += in_at_se[i];
  }
  if (out.survivors < min_survivors)
    throw InsufficientConditioningMass(
        "insufficient conditioning mass: " + std::to_string(out.survivors) + " of " +
            std::to_string(M) + " paths inside the ball at time s",
        out.survivors, M);
  out.estimate = static_cast<double>(out.returns) / static_cast<double>(out.survivors);
  out.wilson = wilson_interval(out.returns, out.survivors);
  return out;
}

// ---------------------------------------------------------------------------
// JSON report shape shared by the sampler estimators:
//   {config, seed, estimates, standard_errors, wilson_intervals}

inline nlohmann::json sampler_config_to_json(const SamplerConfig& cfg) {
  return {{"steps_per_unit", cfg.steps_per_unit},
          {"seed", cfg.seed},
          {"drift", cfg.drift == DriftMode::divergence_form ? "divergence_form" : "none"},
          {"fd_step", cfg.fd_step},
          {"min_steps", cfg.min_steps}};
}

namespace detail {

inline nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

inline nlohmann::json vector_json(const Eigen::VectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace detail

inline nlohmann::json moment_report_json(const MomentEstimates& m, const SamplerConfig& cfg) {
  return {{"config", sampler_config_to_json(cfg)},
          {"seed", cfg.seed},
          {"estimates",
           {{"t", m.t},
            {"samples", m.samples},
            {"first", detail::vector_json(m.first)},
            {"second", detail::matrix_json(m.second)},
            {"area", detail::matrix_json(m.area)}}},
          {"standard_errors",
           {{"first", detail::vector_json(m.first_se)},
            {"second", detail::matrix_json(m.second_se)},
            {"area", detail::matrix_json(m.area_se)}}},
          {"wilson_intervals", nlohmann::json::object()}};
}

inline nlohmann::json tail_report_json(const ProbabilityEstimate& p, double c, double eps,
                                       const SamplerConfig& cfg) {
  const double se = std::sqrt(std::max(p.estimate * (1.0 - p.estimate), 0.0) /
                              static_cast<double>(p.samples));
  return {{"config", sampler_config_to_json(cfg)},
          {"seed", cfg.seed},
          {"estimates",
           {{"c", c}, {"eps", eps}, {"probability", p.estimate}, {"successes", p.successes},
            {"samples", p.samples}}},
          {"standard_errors", {{"probability", se}}},
          {"wilson_intervals", {{"probability", {p.wilson.lo, p.wilson.hi}}}}};
}

inline nlohmann::json ball_report_json(const ConditionalEstimate& p, double C2, double s,
                                       double eps, const SamplerConfig& cfg) {
  const double se =
      p.survivors > 0
          ? std::sqrt(std::max(p.estimate * (1.0 - p.estimate), 0.0) /
                      static_cast<double>(p.survivors))
          : 0.0;
  return {{"config", sampler_config_to_json(cfg)},
          {"seed", cfg.seed},
          {"estimates",
           {{"C2", C2}, {"s", s}, {"eps", eps}, {"probability", p.estimate},
            {"survivors", p.survivors}, {"returns", p.returns}, {"samples", p.samples}}},
          {"standard_errors", {{"probability", se}}},
          {"wilson_intervals", {{"probability", {p.wilson.lo, p.wilson.hi}}}}};
}

}  // namespace carnot
