#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <vector>

#include "carnot/lemma_suite.hpp"
#include "carnot/hormander.hpp"
#include "carnot/rde.hpp"
#include "carnot/sampler.hpp"
#include "carnot/serialize.hpp"
#include "carnot/translation.hpp"

namespace carnot {

/// Declarative description of a Monte Carlo experiment.  Parsed from JSON;
/// every validation error names the offending field.
struct ExperimentConfig {
  std::string kind = "support";
  int d = 2;
  int N = 2;
  double T = 1.0;
  std::vector<double> alphas{0.3};
  std::vector<double> gammas;                   // explicit grid, optional
  std::vector<double> gamma_quantiles;          // else calibrated from samples
  std::int64_t M = 10000;
  int steps_per_unit = 128;
  std::uint64_t seed = 0;
  int threads = 0;
  int sub_steps = 64;

  // diffusion field
  std::string a_type = "identity";
  double a_scale = 1.0;
  std::vector<double> a_diag;
  double a_base = 1.0;
  double a_amp = 0.5;
  std::string drift = "none";

  // translator path
  std::string h_type = "zero";
  double h_w12 = 1.0;
  std::vector<double> h_direction;
  std::string h_csv;

  // driving vector fields (density / rde experiments)
  std::string fields_name;
  std::string fields_file;
  nlohmann::json fields_inline;
  std::vector<double> y0;

  // condition-suite grids
  std::vector<double> c_grid{0.0, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4};
  std::vector<double> eps_grid{0.01};
  std::vector<double> ball_eps_grid{1e-3, 3.16e-3, 1e-2, 3.16e-2, 1e-1};
  double C2 = 1.0;

  // density diagnostic
  double w0 = 0.0;  // 0 = auto (twice the largest coordinate std)
  int halvings = 3;
  int orbit_points = 60;
  int bracket_depth = 0;  // 0 = N + 2

  // lemma suite
  std::int64_t cases = 1000;

  // declared criteria
  double min_r2 = 0.9;

  // outputs (not part of the canonical fingerprint)
  std::string out_json;
  std::string out_csv;

  void validate() const {
    require(d >= 1 && N >= 1, "config field 'd'/'N': must be positive");
    require(T > 0.0, "config field 'T': must be positive");
    require(M >= 100, "config field 'M': must be >= 100");
    require(steps_per_unit >= 1, "config field 'steps_per_unit': must be >= 1");
    require(sub_steps >= 1, "config field 'sub_steps': must be >= 1");
    for (double a : alphas)
      require(a > 0.0 && a < 0.5, "config field 'alpha': must lie in (0, 0.5)");
    for (double g : gammas) require(g > 0.0, "config field 'gammas': must be positive");
    require(halvings >= 1 && halvings <= 10, "config field 'halvings': must lie in [1, 10]");
    require(cases >= 1, "config field 'cases': must be >= 1");
  }

  /// Canonical JSON: execution-only keys (threads, output paths) excluded so
  /// reruns on different machines fingerprint identically.
  nlohmann::json canonical() const {
    nlohmann::json j{{"kind", kind},
                     {"d", d},
                     {"N", N},
                     {"T", T},
                     {"alphas", alphas},
                     {"M", M},
                     {"steps_per_unit", steps_per_unit},
                     {"seed", seed},
                     {"sub_steps", sub_steps},
                     {"a_field", a_field_json()},
                     {"drift", drift},
                     {"h", h_json()},
                     {"c_grid", c_grid},
                     {"eps_grid", eps_grid},
                     {"ball_eps_grid", ball_eps_grid},
                     {"C2", C2},
                     {"w0", w0},
                     {"halvings", halvings},
                     {"orbit_points", orbit_points},
                     {"bracket_depth", bracket_depth},
                     {"cases", cases},
                     {"min_r2", min_r2}};
    if (!gammas.empty()) j["gammas"] = gammas;
    if (!gamma_quantiles.empty()) j["gamma_quantiles"] = gamma_quantiles;
    if (!fields_name.empty()) j["fields"] = {{"name", fields_name}};
    if (!fields_file.empty()) j["fields"] = {{"file", fields_file}};
    if (!fields_inline.is_null()) j["fields"] = fields_inline;
    if (!y0.empty()) j["y0"] = y0;
    return j;
  }

  nlohmann::json a_field_json() const {
    nlohmann::json j{{"type", a_type}};
    if (a_type == "scaled_identity") j["scale"] = a_scale;
    if (a_type == "diagonal") j["diag"] = a_diag;
    if (a_type == "level1_sine") {
      j["base"] = a_base;
      j["amp"] = a_amp;
    }
    return j;
  }

  nlohmann::json h_json() const {
    nlohmann::json j{{"type", h_type}};
    if (h_type == "linear") {
      j["w12"] = h_w12;
      if (!h_direction.empty()) j["direction"] = h_direction;
    }
    if (h_type == "csv") j["path"] = h_csv;
    return j;
  }

  static ExperimentConfig from_json(const nlohmann::json& j);
};

namespace detail {

template <typename T>
T get_or(const nlohmann::json& j, const std::string& key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument("config field '" + key + "': wrong type");
  }
}

inline void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& known,
                                const std::string& scope) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key()))
      throw std::invalid_argument("config field '" + scope + it.key() + "': unknown key");
  }
}

}  // namespace detail

inline ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  require(j.is_object(), "config: top level must be a json object");
  detail::reject_unknown_keys(
      j,
      {"kind",      "d",          "N",         "T",          "alpha",        "alphas",
       "gammas",    "gamma_quantiles",         "M",          "steps_per_unit",
       "seed",      "threads",    "sub_steps", "a_field",    "drift",        "h",
       "fields",    "y0",         "c_grid",    "eps_grid",   "ball_eps_grid",
       "C2",        "w0",         "halvings",  "orbit_points",
       "bracket_depth",           "cases",     "min_r2",     "out",          "csv"},
      "");
  ExperimentConfig c;
  c.kind = detail::get_or<std::string>(j, "kind", c.kind);
  c.d = detail::get_or<int>(j, "d", c.d);
  c.N = detail::get_or<int>(j, "N", c.N);
  c.T = detail::get_or<double>(j, "T", c.T);
  if (j.contains("alpha")) c.alphas = {detail::get_or<double>(j, "alpha", 0.3)};
  if (j.contains("alphas")) c.alphas = detail::get_or<std::vector<double>>(j, "alphas", c.alphas);
  c.gammas = detail::get_or<std::vector<double>>(j, "gammas", c.gammas);
  c.gamma_quantiles =
      detail::get_or<std::vector<double>>(j, "gamma_quantiles", c.gamma_quantiles);
  c.M = detail::get_or<std::int64_t>(j, "M", c.M);
  c.steps_per_unit = detail::get_or<int>(j, "steps_per_unit", c.steps_per_unit);
  c.seed = detail::get_or<std::uint64_t>(j, "seed", c.seed);
  c.threads = detail::get_or<int>(j, "threads", c.threads);
  c.sub_steps = detail::get_or<int>(j, "sub_steps", c.sub_steps);
  c.drift = detail::get_or<std::string>(j, "drift", c.drift);
  require(c.drift == "none" || c.drift == "divergence_form",
          "config field 'drift': must be 'none' or 'divergence_form'");

  if (j.contains("a_field")) {
    const auto& a = j.at("a_field");
    detail::reject_unknown_keys(a, {"type", "scale", "diag", "base", "amp"}, "a_field.");
    c.a_type = detail::get_or<std::string>(a, "type", c.a_type);
    c.a_scale = detail::get_or<double>(a, "scale", c.a_scale);
    c.a_diag = detail::get_or<std::vector<double>>(a, "diag", c.a_diag);
    c.a_base = detail::get_or<double>(a, "base", c.a_base);
    c.a_amp = detail::get_or<double>(a, "amp", c.a_amp);
  }
  if (j.contains("h")) {
    const auto& h = j.at("h");
    detail::reject_unknown_keys(h, {"type", "w12", "direction", "path"}, "h.");
    c.h_type = detail::get_or<std::string>(h, "type", c.h_type);
    c.h_w12 = detail::get_or<double>(h, "w12", c.h_w12);
    c.h_direction = detail::get_or<std::vector<double>>(h, "direction", c.h_direction);
    c.h_csv = detail::get_or<std::string>(h, "path", c.h_csv);
  }
  if (j.contains("fields")) {
    const auto& f = j.at("fields");
    if (f.contains("name"))
      c.fields_name = detail::get_or<std::string>(f, "name", "");
    else if (f.contains("file"))
      c.fields_file = detail::get_or<std::string>(f, "file", "");
    else
      c.fields_inline = f;
  }
  c.y0 = detail::get_or<std::vector<double>>(j, "y0", c.y0);
  c.c_grid = detail::get_or<std::vector<double>>(j, "c_grid", c.c_grid);
  c.eps_grid = detail::get_or<std::vector<double>>(j, "eps_grid", c.eps_grid);
  c.ball_eps_grid = detail::get_or<std::vector<double>>(j, "ball_eps_grid", c.ball_eps_grid);
  c.C2 = detail::get_or<double>(j, "C2", c.C2);
  if (j.contains("w0") && j.at("w0").is_number())
    c.w0 = j.at("w0").get<double>();
  else if (j.contains("w0")) {
    require(j.at("w0").is_string() && j.at("w0").get<std::string>() == "auto",
            "config field 'w0': number or \"auto\"");
  }
  c.halvings = detail::get_or<int>(j, "halvings", c.halvings);
  c.orbit_points = detail::get_or<int>(j, "orbit_points", c.orbit_points);
  c.bracket_depth = detail::get_or<int>(j, "bracket_depth", c.bracket_depth);
  c.cases = detail::get_or<std::int64_t>(j, "cases", c.cases);
  c.min_r2 = detail::get_or<double>(j, "min_r2", c.min_r2);
  c.out_json = detail::get_or<std::string>(j, "out", c.out_json);
  c.out_csv = detail::get_or<std::string>(j, "csv", c.out_csv);
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------

struct ExperimentReport {
  nlohmann::json payload;
  std::string csv;
  bool criteria_passed = true;

  /// Serialized payload (stable key order, no timestamps): reruns with the
  /// same config and seed are byte-identical.
  std::string payload_text() const { return payload.dump(2) + "\n"; }

  void write_outputs(const ExperimentConfig& cfg) const {
    if (!cfg.out_json.empty()) atomic_write_text(cfg.out_json, payload_text());
    if (!cfg.out_csv.empty()) atomic_write_text(cfg.out_csv, csv);
  }
};

namespace detail {

inline nlohmann::json provenance(const ExperimentConfig& cfg) {
  return {{"version", kVersion},
          {"seed", cfg.seed},
          {"config_hash", fnv1a_hex(cfg.canonical().dump())}};
}

inline SubellipticField build_field(const ExperimentConfig& cfg) {
  if (cfg.a_type == "identity") return SubellipticField::identity(cfg.d);
  if (cfg.a_type == "scaled_identity") return SubellipticField::scaled_identity(cfg.d, cfg.a_scale);
  if (cfg.a_type == "diagonal") {
    require(static_cast<int>(cfg.a_diag.size()) == cfg.d,
            "config field 'a_field.diag': needs d entries");
    Eigen::VectorXd v(cfg.d);
    for (int i = 0; i < cfg.d; ++i) v[i] = cfg.a_diag[static_cast<std::size_t>(i)];
    return SubellipticField::diagonal(v);
  }
  if (cfg.a_type == "level1_sine") return SubellipticField::level1_sine(cfg.d, cfg.a_base, cfg.a_amp);
  throw std::invalid_argument("config field 'a_field.type': unknown type '" + cfg.a_type + "'");
}

inline LinearPath build_translator(const ExperimentConfig& cfg) {
  if (cfg.h_type == "zero") return LinearPath::zero(cfg.d, cfg.T);
  if (cfg.h_type == "linear") {
    Eigen::VectorXd dir;
    if (cfg.h_direction.empty()) {
      dir = Eigen::VectorXd::Zero(cfg.d);
      dir[0] = 1.0;
    } else {
      require(static_cast<int>(cfg.h_direction.size()) == cfg.d,
              "config field 'h.direction': needs d entries");
      dir = Eigen::VectorXd(cfg.d);
      for (int i = 0; i < cfg.d; ++i) dir[i] = cfg.h_direction[static_cast<std::size_t>(i)];
      require(dir.norm() > 0.0, "config field 'h.direction': must be nonzero");
      dir.normalize();
    }
    // |v| sqrt(T) = w12  =>  h(t) = v t with v = dir * w12 / sqrt(T)
    const Eigen::VectorXd v = dir * (cfg.h_w12 / std::sqrt(cfg.T));
    return LinearPath({0.0, cfg.T}, {Eigen::VectorXd::Zero(cfg.d), (v * cfg.T).eval()});
  }
  if (cfg.h_type == "csv") return read_linear_path_csv_file(cfg.h_csv);
  throw std::invalid_argument("config field 'h.type': unknown type '" + cfg.h_type + "'");
}

inline VectorFieldSystem build_fields(const ExperimentConfig& cfg) {
  if (!cfg.fields_name.empty()) return named_fields(cfg.fields_name);
  if (!cfg.fields_file.empty()) return vector_field_system_from_json(read_json_file(cfg.fields_file));
  if (!cfg.fields_inline.is_null()) return vector_field_system_from_json(cfg.fields_inline);
  throw std::invalid_argument("config field 'fields': required for this experiment");
}

inline SamplerConfig sampler_config(const ExperimentConfig& cfg) {
  SamplerConfig sc;
  sc.steps_per_unit = cfg.steps_per_unit;
  sc.seed = cfg.seed;
  sc.threads = cfg.threads;
  sc.drift = cfg.drift == "divergence_form" ? DriftMode::divergence_form : DriftMode::none;
  return sc;
}

inline std::string csv_cell(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// Support probe: M diffusion paths, per-path homogeneous alpha-Holder
/// distance to the lift of h and Holder norm of the back-translated path.
/// Estimates P[distance < gamma] on a shared sample set (monotone in gamma by
/// construction), plus the positivity flag at ten times the sampled median.
inline ExperimentReport run_support(const ExperimentConfig& cfg) {
  cfg.validate();
  require(!cfg.alphas.empty(), "config field 'alphas': at least one exponent");
  const auto a = detail::build_field(cfg);
  const auto sc = detail::sampler_config(cfg);
  const GroupElement x0 = GroupElement::identity(cfg.d, cfg.N);

  // h and its lift on the sampler grid
  GroupPath probe = simulate_diffusion(a, x0, cfg.T, sc, 0);
  const LinearPath h = detail::build_translator(cfg).resampled(probe.times());
  const LinearPath h_neg = h.negated();
  const GroupPath h_lift = signature_lift(h, cfg.N);
  const bool h_zero = cfg.h_type == "zero";

  const std::size_t n_alpha = cfg.alphas.size();
  std::vector<std::vector<double>> dist(n_alpha,
                                        std::vector<double>(static_cast<std::size_t>(cfg.M)));
  std::vector<std::vector<double>> tnorm(n_alpha,
                                         std::vector<double>(static_cast<std::size_t>(cfg.M)));
  parallel_for(static_cast<std::size_t>(cfg.M), cfg.threads, [&](std::size_t i) {
    GroupPath x = simulate_diffusion(a, x0, cfg.T, sc, i);
    const auto ds = alpha_holder_distance_multi(x, h_lift, cfg.alphas);
    const auto ts = h_zero ? holder_norm_multi(x, cfg.alphas)
                           : holder_norm_multi(translate(x, h_neg, cfg.sub_steps), cfg.alphas);
    for (std::size_t ai = 0; ai < n_alpha; ++ai) {
      dist[ai][i] = ds[ai];
      tnorm[ai][i] = ts[ai];
    }
  });

  ExperimentReport rep;
  nlohmann::json per_alpha = nlohmann::json::array();
  std::string csv = "statistic,alpha,gamma,estimate,lo95,hi95,M,seed\n";
  bool all_positive = true;

  for (std::size_t ai = 0; ai < n_alpha; ++ai) {
    const double alpha = cfg.alphas[ai];
    std::vector<double> gammas = cfg.gammas;
    if (gammas.empty()) {
      const auto qs = cfg.gamma_quantiles.empty()
                          ? std::vector<double>{0.1, 0.25, 0.5, 0.75, 0.9}
                          : cfg.gamma_quantiles;
      for (double q : qs) gammas.push_back(quantile(dist[ai], q));
    }
    const double gamma_star = 10.0 * quantile(dist[ai], 0.5);
    std::vector<double> all_gammas = gammas;
    all_gammas.push_back(gamma_star);
    std::sort(all_gammas.begin(), all_gammas.end());

    nlohmann::json rows = nlohmann::json::array();
    auto emit = [&](const char* stat, const std::vector<double>& samples, double gamma) {
      std::int64_t succ = 0;
      for (double v : samples)
        if (v < gamma) ++succ;
      const double est = static_cast<double>(succ) / static_cast<double>(cfg.M);
      const Interval w = wilson_interval(succ, cfg.M);
      nlohmann::json row{{"statistic", stat},
                         {"gamma", gamma},
                         {"estimate", est},
                         {"lo95", w.lo},
                         {"hi95", w.hi},
                         {"successes", succ},
                         {"M", cfg.M}};
      if (succ == 0) row["note"] = "positivity not witnessed at this M";
      rows.push_back(row);
      csv += std::string(stat) + "," + detail::csv_cell(alpha) + "," + detail::csv_cell(gamma) +
             "," + detail::csv_cell(est) + "," + detail::csv_cell(w.lo) + "," +
             detail::csv_cell(w.hi) + "," + std::to_string(cfg.M) + "," +
             std::to_string(cfg.seed) + "\n";
      return std::pair<double, Interval>(est, w);
    };

    double est_star = 0.0;
    Interval w_star;
    for (double g : all_gammas) {
      auto [est, w] = emit("distance", dist[ai], g);
      if (g == gamma_star) {
        est_star = est;
        w_star = w;
      }
    }
    for (double g : all_gammas) emit("translated_norm", tnorm[ai], g);

    const bool positive = w_star.lo > 0.0;
    all_positive = all_positive && positive;
    nlohmann::json flags{{"wilson_lb_positive_at_10x_median", positive},
                         {"estimate_at_10x_median_above_0.4", est_star > 0.4},
                         {"monotone_in_gamma", true}};
    if (est_star == 0.0) flags["note"] = "positivity not witnessed at this M";
    per_alpha.push_back({{"alpha", alpha},
                         {"gamma_10x_median", gamma_star},
                         {"estimate_at_10x_median", est_star},
                         {"wilson_at_10x_median", {w_star.lo, w_star.hi}},
                         {"rows", rows},
                         {"flags", flags}});
  }

  rep.payload = {{"kind", "support"},
                 {"provenance", detail::provenance(cfg)},
                 {"config", cfg.canonical()},
                 {"per_alpha", per_alpha},
                 {"note", "constants in the underlying bounds are existence-only; this harness "
                          "checks positivity and monotonicity, never constant values"}};
  rep.csv = csv;
  rep.criteria_passed = all_positive;
  rep.write_outputs(cfg);
  return rep;
}

// ---------------------------------------------------------------------------

/// Least-squares check of the small-norm scaling form: regress log p(gamma)
/// on gamma^(-2/(1-2 alpha)) over an informative gamma grid.
inline ExperimentReport run_scaling_fit(const ExperimentConfig& cfg) {
  cfg.validate();
  const double alpha = cfg.alphas.front();
  const auto a = detail::build_field(cfg);
  const auto sc = detail::sampler_config(cfg);
  const GroupElement x0 = GroupElement::identity(cfg.d, cfg.N);

  GroupPath probe = simulate_diffusion(a, x0, cfg.T, sc, 0);
  const LinearPath h = detail::build_translator(cfg).resampled(probe.times());
  const GroupPath h_lift = signature_lift(h, cfg.N);

  std::vector<double> dist(static_cast<std::size_t>(cfg.M));
  parallel_for(static_cast<std::size_t>(cfg.M), cfg.threads, [&](std::size_t i) {
    GroupPath x = simulate_diffusion(a, x0, cfg.T, sc, i);
    dist[i] = alpha_holder_distance_multi(x, h_lift, {alpha})[0];
  });

  std::vector<double> gammas = cfg.gammas;
  if (gammas.empty()) {
    const auto qs = cfg.gamma_quantiles.empty()
                        ? std::vector<double>{0.05, 0.12, 0.25, 0.45, 0.7}
                        : cfg.gamma_quantiles;
    for (double q : qs) gammas.push_back(quantile(dist, q));
  }
  std::sort(gammas.begin(), gammas.end());

  const double expo = -2.0 / (1.0 - 2.0 * alpha);
  std::vector<double> xs, ys;
  nlohmann::json rows = nlohmann::json::array();
  std::string csv = "gamma,estimate,lo95,hi95,M,seed\n";
  for (double g : gammas) {
    std::int64_t succ = 0;
    for (double v : dist)
      if (v < g) ++succ;
    const double est = static_cast<double>(succ) / static_cast<double>(cfg.M);
    const Interval w = wilson_interval(succ, cfg.M);
    const bool informative = succ > 0 && succ < cfg.M;
    rows.push_back({{"gamma", g},
                    {"estimate", est},
                    {"lo95", w.lo},
                    {"hi95", w.hi},
                    {"informative", informative}});
    csv += detail::csv_cell(g) + "," + detail::csv_cell(est) + "," + detail::csv_cell(w.lo) +
           "," + detail::csv_cell(w.hi) + "," + std::to_string(cfg.M) + "," +
           std::to_string(cfg.seed) + "\n";
    if (informative) {
      xs.push_back(std::pow(g, expo));
      ys.push_back(std::log(est));
    }
  }
  if (xs.size() < 5)
    throw std::invalid_argument(
        "grid not informative: need >= 5 gamma points with estimates strictly inside (0,1)");

  const LinearFit fit = fit_line(xs, ys);
  const bool decreasing = fit.slope < 0.0;  // p increases with gamma
  const double fitted_C = -fit.slope;

  ExperimentReport rep;
  rep.payload = {{"kind", "scaling-fit"},
                 {"provenance", detail::provenance(cfg)},
                 {"config", cfg.canonical()},
                 {"alpha", alpha},
                 {"abscissa", "gamma^(-2/(1-2*alpha))"},
                 {"rows", rows},
                 {"fit",
                  {{"slope", fit.slope},
                   {"intercept", fit.intercept},
                   {"r2", fit.r2},
                   {"fitted_C", fitted_C}}},
                 {"flags",
                  {{"r2_at_least_declared", fit.r2 >= cfg.min_r2},
                   {"slope_negative", decreasing}}},
                 {"note", "functional-form check only; the underlying constants are "
                          "existence statements and are fit, not reproduced"}};
  rep.csv = csv;
  rep.criteria_passed = fit.r2 >= cfg.min_r2 && decreasing;
  rep.write_outputs(cfg);
  return rep;
}

// ---------------------------------------------------------------------------

/// Short-window tail and conditional ball-return probes for the raw and the
/// translated diffusion, with the affine envelope fit of the tail form and
/// the eps-threshold regime filter for nonzero translators.
inline ExperimentReport run_condition_suite(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto a = detail::build_field(cfg);
  const auto sc = detail::sampler_config(cfg);
  const GroupElement x0 = GroupElement::identity(cfg.d, cfg.N);
  const LinearPath h_full = detail::build_translator(cfg);
  const bool h_zero = cfg.h_type == "zero";
  const double h_w12 = w12_norm(h_full);

  std::string csv = "statistic,eps,c,estimate,lo95,hi95,in_regime,M,seed\n";
  nlohmann::json tail_rows = nlohmann::json::array();
  std::vector<double> fit_z, fit_y;  // pooled over raw-path informative rows

  for (double eps : cfg.eps_grid) {
    require(eps > 0.0, "config field 'eps_grid': entries must be positive");
    // per-path sup distance over [0, eps], raw and translated
    std::vector<double> sup_raw(static_cast<std::size_t>(cfg.M));
    std::vector<double> sup_tr(static_cast<std::size_t>(cfg.M));
    SamplerConfig win = sc;
    win.min_steps = 16;
    GroupPath probe = simulate_diffusion(a, x0, eps, win, 0);
    const LinearPath h_win = h_full.resampled(probe.times());
    parallel_for(static_cast<std::size_t>(cfg.M), cfg.threads, [&](std::size_t i) {
      GroupPath x = simulate_diffusion(a, x0, eps, win, i);
      IncrementTable tab(x);
      double s = 0.0;
      for (std::size_t k = 1; k < x.size(); ++k) s = std::max(s, tab.dist(0, k));
      sup_raw[i] = s;
      if (h_zero) {
        sup_tr[i] = s;
      } else {
        GroupPath y = translate(x, h_win, cfg.sub_steps);
        IncrementTable ytab(y);
        double st = 0.0;
        for (std::size_t k = 1; k < y.size(); ++k) st = std::max(st, ytab.dist(0, k));
        sup_tr[i] = st;
      }
    });

    auto emit = [&](const char* stat, const std::vector<double>& sups, double c,
                    bool in_regime) {
      std::int64_t succ = 0;
      for (double s : sups)
        if (s > c) ++succ;
      const double est = static_cast<double>(succ) / static_cast<double>(cfg.M);
      const Interval w = wilson_interval(succ, cfg.M);
      tail_rows.push_back({{"statistic", stat},
                           {"eps", eps},
                           {"c", c},
                           {"estimate", est},
                           {"lo95", w.lo},
                           {"hi95", w.hi},
                           {"in_regime", in_regime}});
      csv += std::string(stat) + "," + detail::csv_cell(eps) + "," + detail::csv_cell(c) + "," +
             detail::csv_cell(est) + "," + detail::csv_cell(w.lo) + "," + detail::csv_cell(w.hi) +
             "," + (in_regime ? "1" : "0") + "," + std::to_string(cfg.M) + "," +
             std::to_string(cfg.seed) + "\n";
      return std::pair<std::int64_t, double>(succ, est);
    };

    for (double c : cfg.c_grid) {
      auto [succ_raw, est_raw] = emit("tail_raw", sup_raw, c, true);
      if (succ_raw > 0 && succ_raw < cfg.M && c > 0.0) {
        fit_z.push_back(c * c / eps);
        fit_y.push_back(std::log(est_raw));
      }
      // the translated tail bound only applies below the eps threshold
      const bool in_regime =
          h_zero || eps <= c * c / (4.0 * h_w12 * h_w12) + detail::kTimeTol;
      emit("tail_translated", sup_tr, c, in_regime);
    }
  }

  nlohmann::json tail_fit;
  bool fit_ok = false;
  if (fit_z.size() >= 2) {
    const LinearFit fit = fit_line(fit_z, fit_y);
    const double B = -fit.slope;
    double envelope = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fit_z.size(); ++i)
      envelope = std::max(envelope, fit_y[i] + B * fit_z[i]);
    const double C1 = B > 0.0 ? std::max(std::exp(envelope), 1.0 / B)
                              : std::numeric_limits<double>::infinity();
    tail_fit = {{"slope", fit.slope},
                {"intercept", fit.intercept},
                {"r2", fit.r2},
                {"fitted_C1", C1},
                {"envelope_log_intercept", envelope}};
    fit_ok = fit.r2 >= cfg.min_r2 && B > 0.0 && std::isfinite(C1);
  } else {
    tail_fit = {{"error", "not enough informative tail rows for the affine fit"}};
  }

  // conditional ball returns across the eps grid, with s = eps
  nlohmann::json ball_rows = nlohmann::json::array();
  double min_estimate = std::numeric_limits<double>::infinity();
  double min_lb = std::numeric_limits<double>::infinity();
  for (double eps : cfg.ball_eps_grid) {
    SamplerConfig win = sc;
    win.min_steps = 16;
    auto est = ball_return_probability(a, x0, x0, cfg.C2, eps, eps, cfg.M, win);
    ball_rows.push_back({{"eps", eps},
                         {"s", eps},
                         {"survivors", est.survivors},
                         {"returns", est.returns},
                         {"estimate", est.estimate},
                         {"lo95", est.wilson.lo},
                         {"hi95", est.wilson.hi}});
    csv += "ball_return," + detail::csv_cell(eps) + ",," + detail::csv_cell(est.estimate) + "," +
           detail::csv_cell(est.wilson.lo) + "," + detail::csv_cell(est.wilson.hi) + ",1," +
           std::to_string(cfg.M) + "," + std::to_string(cfg.seed) + "\n";
    min_estimate = std::min(min_estimate, est.estimate);
    min_lb = std::min(min_lb, est.wilson.lo);
  }

  ExperimentReport rep;
  rep.payload = {{"kind", "conditions"},
                 {"provenance", detail::provenance(cfg)},
                 {"config", cfg.canonical()},
                 {"h_w12", h_w12},
                 {"tail_rows", tail_rows},
                 {"tail_fit", tail_fit},
                 {"ball_rows", ball_rows},
                 {"min_ball_return", min_estimate},
                 {"min_ball_return_lb", min_lb},
                 {"flags",
                  {{"tail_fit_r2_ok", fit_ok},
                   {"ball_return_positive", min_lb > 0.0}}},
                 {"note", "fitted constants witness the functional form only"}};
  rep.csv = csv;
  rep.criteria_passed = fit_ok && min_lb > 0.0;
  rep.write_outputs(cfg);
  return rep;
}

// ---------------------------------------------------------------------------

namespace detail {

/// Largest cell mass of a histogram with cubic cells of width w on the given
/// coordinates, anchored half a cell below the sample mean.
inline double max_cell_mass(const std::vector<Eigen::VectorXd>& pts, double w) {
  require(!pts.empty() && w > 0.0, "max_cell_mass: need samples and positive width");
  const Eigen::Index k = pts.front().size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(k);
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  std::map<std::vector<std::int64_t>, std::int64_t> counts;
  std::vector<std::int64_t> key(static_cast<std::size_t>(k));
  std::int64_t best = 0;
  for (const auto& p : pts) {
    for (Eigen::Index j = 0; j < k; ++j)
      key[static_cast<std::size_t>(j)] =
          static_cast<std::int64_t>(std::floor((p[j] - (mean[j] - 0.5 * w)) / w));
    best = std::max(best, ++counts[key]);
  }
  return static_cast<double>(best) / static_cast<double>(pts.size());
}

}  // namespace detail

/// Histogram mass-decay diagnostic for the law of the RDE solution at time T,
/// reported side by side with the bracket-rank verdict.  Heuristic evidence
/// only; the report says so explicitly.
inline ExperimentReport run_density(const ExperimentConfig& cfg) {
  cfg.validate();
  require(cfg.M >= 1000, "insufficient samples for density diagnostic: need M >= 1000");
  const VectorFieldSystem sys = detail::build_fields(cfg);
  require_dims(sys.d() == cfg.d, "config: fields count must match the driver dimension d");
  Eigen::VectorXd y0 = Eigen::VectorXd::Zero(sys.e);
  if (!cfg.y0.empty()) {
    require(static_cast<int>(cfg.y0.size()) == sys.e, "config field 'y0': needs e entries");
    for (int i = 0; i < sys.e; ++i) y0[i] = cfg.y0[static_cast<std::size_t>(i)];
  }

  const int depth = cfg.bracket_depth > 0 ? cfg.bracket_depth : cfg.N + 2;
  auto checker = check_rank_constancy(sys, cfg.N, y0, depth, cfg.orbit_points, cfg.seed);

  // numerically determined orbit directions from flow sampling
  OrbitSample orbit = sample_orbit(sys, y0, cfg.orbit_points, cfg.seed + 1);
  Eigen::VectorXd omean = Eigen::VectorXd::Zero(sys.e);
  for (const auto& p : orbit.points) omean += p;
  omean /= static_cast<double>(orbit.points.size());
  Eigen::MatrixXd ocov = Eigen::MatrixXd::Zero(sys.e, sys.e);
  for (const auto& p : orbit.points) ocov += (p - omean) * (p - omean).transpose();
  ocov /= static_cast<double>(orbit.points.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oe(ocov);
  std::vector<double> osv;
  for (int i = sys.e - 1; i >= 0; --i) osv.push_back(std::sqrt(std::max(oe.eigenvalues()[i], 0.0)));
  int dim_orbit = 0;
  for (double s : osv)
    if (s > 1e-6 * std::max(osv.front(), 1e-300)) ++dim_orbit;
  Eigen::MatrixXd directions(sys.e, sys.e);
  for (int i = 0; i < sys.e; ++i) directions.col(i) = oe.eigenvectors().col(sys.e - 1 - i);

  // joint simulation: driver paths and their RDE solutions at time T
  const auto a = detail::build_field(cfg);
  const auto sc = detail::sampler_config(cfg);
  const GroupElement x0 = GroupElement::identity(cfg.d, cfg.N);
  const EulerScheme scheme(sys, cfg.N);
  std::vector<Eigen::VectorXd> samples(static_cast<std::size_t>(cfg.M));
  parallel_for(static_cast<std::size_t>(cfg.M), cfg.threads, [&](std::size_t i) {
    GroupPath x = simulate_diffusion(a, x0, cfg.T, sc, i);
    samples[i] = solve_rde(scheme, y0, x).back();
  });

  // cell widths: w0 (auto: twice the largest coordinate std) halved `halvings` times
  Eigen::VectorXd smean = Eigen::VectorXd::Zero(sys.e);
  for (const auto& p : samples) smean += p;
  smean /= static_cast<double>(samples.size());
  double sigma_max = 0.0;
  for (int j = 0; j < sys.e; ++j) {
    double v = 0.0;
    for (const auto& p : samples) v += (p[j] - smean[j]) * (p[j] - smean[j]);
    sigma_max = std::max(sigma_max, std::sqrt(v / static_cast<double>(samples.size())));
  }
  const double w0 = cfg.w0 > 0.0 ? cfg.w0 : (sigma_max > 0.0 ? 2.0 * sigma_max : 1.0);

  std::vector<Eigen::VectorXd> projected(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Eigen::VectorXd p(std::max(dim_orbit, 1));
    for (int j = 0; j < std::max(dim_orbit, 1); ++j)
      p[j] = directions.col(j).dot(samples[i] - smean);
    projected[i] = p;
  }

  std::vector<double> widths, m_full, m_orbit;
  for (int jw = 0; jw <= cfg.halvings; ++jw) {
    const double w = w0 / std::pow(2.0, jw);
    widths.push_back(w);
    m_full.push_back(detail::max_cell_mass(samples, w));
    m_orbit.push_back(detail::max_cell_mass(projected, w));
  }

  std::vector<double> logw, logmf, logmo;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    logw.push_back(std::log2(widths[i]));
    logmf.push_back(std::log2(std::max(m_full[i], 1.0 / static_cast<double>(cfg.M))));
    logmo.push_back(std::log2(std::max(m_orbit[i], 1.0 / static_cast<double>(cfg.M))));
  }
  const LinearFit fit_full = fit_line(logw, logmf);
  const LinearFit fit_orbit = fit_line(logw, logmo);

  // on-orbit scaling check anchored one halving in (the coarsest cell is
  // often saturated); the full-dimension stall uses the coarse anchor
  const std::size_t anchor = widths.size() > 2 ? 1 : 0;
  const double ratio_orbit_w = widths.back() / widths[anchor];
  const double pred_orbit = m_orbit[anchor] * std::pow(ratio_orbit_w, dim_orbit);
  const double consistency = pred_orbit > 0.0 ? m_orbit.back() / pred_orbit : 0.0;
  const bool density_consistent = consistency >= 1.0 / 3.0 && consistency <= 3.0;
  const double ratio_w = widths.back() / widths.front();
  const double pred_full = m_full.front() * std::pow(ratio_w, sys.e);
  const double stall_factor = pred_full > 0.0 ? m_full.back() / pred_full : 0.0;
  const bool singular_consistent = stall_factor >= 5.0;

  std::string csv = "width,m_full,m_orbit\n";
  for (std::size_t i = 0; i < widths.size(); ++i)
    csv += detail::csv_cell(widths[i]) + "," + detail::csv_cell(m_full[i]) + "," +
           detail::csv_cell(m_orbit[i]) + "\n";

  ExperimentReport rep;
  rep.payload = {
      {"kind", "density"},
      {"provenance", detail::provenance(cfg)},
      {"config", cfg.canonical()},
      {"checker", checker.to_json()},
      {"dim_orbit_numeric", dim_orbit},
      {"state_dim", sys.e},
      {"w0", w0},
      {"widths", widths},
      {"max_cell_mass_full", m_full},
      {"max_cell_mass_orbit", m_orbit},
      {"exponent_full", fit_full.slope},
      {"exponent_orbit", fit_orbit.slope},
      {"orbit_singular_values", osv},
      {"flags",
       {{"density_consistent_on_orbit", density_consistent},
        {"singular_consistent_full_space", singular_consistent},
        {"orbit_consistency_ratio", consistency},
        {"stall_factor_vs_full_dim", stall_factor}}},
      {"disclaimer", "diagnostic, not a test: histogram mass decay is heuristic evidence "
                     "about absolute continuity, not a statistical proof"}};
  rep.csv = csv;
  rep.criteria_passed = true;
  rep.write_outputs(cfg);
  return rep;
}

// ---------------------------------------------------------------------------

/// Replays the randomized deterministic-bound suites on fresh paths.
inline ExperimentReport run_lemma_suite(const ExperimentConfig& cfg) {
  const auto window = run_window_bound_suite(cfg.cases, cfg.seed);
  const auto dyadic = run_dyadic_bound_suite(cfg.cases, cfg.seed);
  const auto anchor = run_anchor_bound_suite(cfg.cases, cfg.seed);
  auto suite_json = [](const LemmaSuiteResult& r) {
    return nlohmann::json{
        {"cases", r.cases}, {"violations", r.violations}, {"worst_margin", r.worst_margin}};
  };
  ExperimentReport rep;
  rep.payload = {{"kind", "lemma-suite"},
                 {"provenance", detail::provenance(cfg)},
                 {"config", cfg.canonical()},
                 {"window_bound", suite_json(window)},
                 {"dyadic_bound", suite_json(dyadic)},
                 {"anchor_bound", suite_json(anchor)}};
  rep.csv = "suite,cases,violations,worst_margin\n";
  rep.csv += "window," + std::to_string(window.cases) + "," + std::to_string(window.violations) +
             "," + detail::csv_cell(window.worst_margin) + "\n";
  rep.csv += "dyadic," + std::to_string(dyadic.cases) + "," + std::to_string(dyadic.violations) +
             "," + detail::csv_cell(dyadic.worst_margin) + "\n";
  rep.csv += "anchor," + std::to_string(anchor.cases) + "," + std::to_string(anchor.violations) +
             "," + detail::csv_cell(anchor.worst_margin) + "\n";
  rep.criteria_passed =
      window.violations == 0 && dyadic.violations == 0 && anchor.violations == 0;
  rep.write_outputs(cfg);
  return rep;
}

}  // namespace carnot
