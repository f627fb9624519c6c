// carnot: command-line front end for the rough-path toolkit.
//
// Exit codes: 0 success, 1 declared-criteria failure (or a non-holds
// checker verdict), 2 usage or configuration errors.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "carnot/experiments.hpp"

namespace {

using namespace carnot;

std::uint64_t env_default_seed() {
  if (const char* s = std::getenv("CARNOT_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw std::invalid_argument("environment variable CARNOT_SEED: not an integer");
    }
  }
  return 0;
}

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse '" + cell + "' as a number");
    }
  }
  return out;
}

void apply_field_spec(ExperimentConfig& cfg, const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "identity") {
    cfg.a_type = "identity";
  } else if (head == "scaled") {
    cfg.a_type = "scaled_identity";
    cfg.a_scale = std::stod(args);
  } else if (head == "diag") {
    cfg.a_type = "diagonal";
    cfg.a_diag = parse_csv_doubles(args);
  } else if (head == "sine") {
    cfg.a_type = "level1_sine";
    auto v = parse_csv_doubles(args);
    require(v.size() == 2, "field spec 'sine' needs base,amp");
    cfg.a_base = v[0];
    cfg.a_amp = v[1];
  } else {
    throw std::invalid_argument("unknown field spec '" + spec +
                                "' (identity | scaled:<c> | diag:<v1,..> | sine:<base>,<amp>)");
  }
}

VectorFieldSystem load_fields_arg(const std::string& arg) {
  std::ifstream probe(arg);
  if (probe.good()) return vector_field_system_from_json(read_json_file(arg));
  return named_fields(arg);
}

struct ExperimentFlags {
  std::string config_path;
  std::string out_json, out_csv;
  std::int64_t M = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double alpha = -1.0;
  int steps = -1;
  int threads = -1;
  std::int64_t cases = -1;
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& fl) {
  cmd->add_option("--config", fl.config_path, "experiment config json");
  cmd->add_option("--out", fl.out_json, "report json output path");
  cmd->add_option("--csv", fl.out_csv, "table csv output path");
  cmd->add_option("--M", fl.M, "sample count override");
  auto* seed_opt = cmd->add_option("--seed", fl.seed, "seed override");
  seed_opt->each([&fl](const std::string&) { fl.seed_set = true; });
  cmd->add_option("--alpha", fl.alpha, "Holder exponent override");
  cmd->add_option("--steps", fl.steps, "steps per unit time override");
  cmd->add_option("--threads", fl.threads, "worker thread override (0 = hardware)");
  cmd->add_option("--cases", fl.cases, "randomized case count (lemma suite)");
}

/// Precedence: flag > config file > CARNOT_SEED > built-in default.
ExperimentConfig resolve_config(const ExperimentFlags& fl, const std::string& kind) {
  nlohmann::json j = nlohmann::json::object();
  if (!fl.config_path.empty()) j = read_json_file(fl.config_path);
  if (!j.contains("seed")) j["seed"] = env_default_seed();
  ExperimentConfig cfg = ExperimentConfig::from_json(j);
  cfg.kind = kind;
  if (fl.M >= 0) cfg.M = fl.M;
  if (fl.seed_set) cfg.seed = fl.seed;
  if (fl.alpha > 0.0) cfg.alphas = {fl.alpha};
  if (fl.steps > 0) cfg.steps_per_unit = fl.steps;
  if (fl.threads >= 0) cfg.threads = fl.threads;
  if (fl.cases > 0) cfg.cases = fl.cases;
  if (!fl.out_json.empty()) cfg.out_json = fl.out_json;
  if (!fl.out_csv.empty()) cfg.out_csv = fl.out_csv;
  cfg.validate();
  return cfg;
}

int finish(const ExperimentReport& rep) {
  std::cout << rep.payload_text();
  return rep.criteria_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"carnot: numerics for rough paths on free nilpotent groups"};
  app.require_subcommand(1);

  // --- simulate ---------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "sample one diffusion path and dump it as json");
  struct {
    int d = 2, N = 2, steps = 256;
    double T = 1.0;
    std::uint64_t seed = 0, path_index = 0;
    bool seed_set = false;
    std::string field = "identity", drift = "none", out;
  } simf;
  sim->add_option("--d", simf.d);
  sim->add_option("--N", simf.N);
  sim->add_option("--T", simf.T);
  sim->add_option("--steps", simf.steps, "steps per unit time");
  sim->add_option("--seed", simf.seed)->each([&](const std::string&) { simf.seed_set = true; });
  sim->add_option("--path-index", simf.path_index, "rng substream index");
  sim->add_option("--a", simf.field, "identity | scaled:<c> | diag:<v..> | sine:<base>,<amp>");
  sim->add_option("--drift", simf.drift, "none | divergence_form");
  sim->add_option("--out", simf.out, "output path (default stdout)");

  // --- lift --------------------------------------------------------------
  auto* lift = app.add_subcommand("lift", "signature lift of a csv path");
  struct {
    std::string input, out;
    int N = 2;
  } liftf;
  lift->add_option("--input", liftf.input, "csv path file (t,v1..vd)")->required();
  lift->add_option("--N", liftf.N, "truncation level");
  lift->add_option("--out", liftf.out, "output path (default stdout)");

  // --- translate ---------------------------------------------------------
  auto* tr = app.add_subcommand("translate", "translate a group path by a csv path");
  struct {
    std::string path, h, out;
    int sub_steps = 64;
  } trf;
  tr->add_option("--path", trf.path, "group path json")->required();
  tr->add_option("--translator", trf.h, "translator csv path")->required();
  tr->add_option("--sub-steps", trf.sub_steps, "sub-steps per interval");
  tr->add_option("--out", trf.out, "output path (default stdout)");

  // --- rde ----------------------------------------------------------------
  auto* rde = app.add_subcommand("rde", "solve dY = V(Y) dX along a group path");
  struct {
    std::string fields, driver, y0, out;
  } rdef;
  rde->add_option("--fields", rdef.fields, "vector field json file or named system")->required();
  rde->add_option("--driver", rdef.driver, "group path json")->required();
  rde->add_option("--y0", rdef.y0, "start point, comma separated")->required();
  rde->add_option("--out", rdef.out, "csv output (default stdout)");

  // --- hormander-check ----------------------------------------------------
  auto* hc = app.add_subcommand("hormander-check", "bracket-rank constancy over sampled orbit");
  struct {
    std::string fields, y0, out;
    int N = 2, depth = 4, points = 40;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double tol = 1e-8;
  } hcf;
  hc->add_option("--fields", hcf.fields, "vector field json file or named system")->required();
  hc->add_option("--N", hcf.N, "driver truncation level")->required();
  hc->add_option("--depth", hcf.depth, "bracket depth");
  hc->add_option("--points", hcf.points, "orbit sample count");
  hc->add_option("--seed", hcf.seed)->each([&](const std::string&) { hcf.seed_set = true; });
  hc->add_option("--tol", hcf.tol, "relative rank threshold");
  hc->add_option("--y0", hcf.y0, "start point, comma separated (default 0)");
  hc->add_option("--out", hcf.out, "report json output (default stdout)");

  // --- experiments ---------------------------------------------------------
  ExperimentFlags supf, scalef, condf, densf, lemf;
  auto* sup = app.add_subcommand("support", "support positivity probe");
  add_experiment_flags(sup, supf);
  auto* scale = app.add_subcommand("scaling-fit", "small-norm scaling-form fit");
  add_experiment_flags(scale, scalef);
  auto* cond = app.add_subcommand("conditions", "short-window tail and ball-return suite");
  add_experiment_flags(cond, condf);
  auto* dens = app.add_subcommand("density", "histogram mass-decay diagnostic");
  add_experiment_flags(dens, densf);
  auto* lem = app.add_subcommand("lemma-suite", "randomized deterministic-bound suites");
  add_experiment_flags(lem, lemf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) {
      ExperimentConfig cfg;
      cfg.d = simf.d;
      cfg.N = simf.N;
      apply_field_spec(cfg, simf.field);
      cfg.drift = simf.drift;
      auto field = carnot::detail::build_field(cfg);
      SamplerConfig sc;
      sc.steps_per_unit = simf.steps;
      sc.seed = simf.seed_set ? simf.seed : env_default_seed();
      sc.drift = simf.drift == "divergence_form" ? DriftMode::divergence_form : DriftMode::none;
      GroupPath p = simulate_diffusion(field, GroupElement::identity(simf.d, simf.N), simf.T, sc,
                                       simf.path_index);
      const std::string text = group_path_to_json(p).dump(2) + "\n";
      if (simf.out.empty())
        std::cout << text;
      else
        atomic_write_text(simf.out, text);
      return 0;
    }

    if (lift->parsed()) {
      LinearPath h = read_linear_path_csv_file(liftf.input);
      const std::string text = group_path_to_json(signature_lift(h, liftf.N)).dump(2) + "\n";
      if (liftf.out.empty())
        std::cout << text;
      else
        atomic_write_text(liftf.out, text);
      return 0;
    }

    if (tr->parsed()) {
      GroupPath x = group_path_from_json(read_json_file(trf.path));
      LinearPath h = read_linear_path_csv_file(trf.h);
      const std::string text =
          group_path_to_json(translate(x, h, trf.sub_steps)).dump(2) + "\n";
      if (trf.out.empty())
        std::cout << text;
      else
        atomic_write_text(trf.out, text);
      return 0;
    }

    if (rde->parsed()) {
      VectorFieldSystem sys = load_fields_arg(rdef.fields);
      GroupPath X = group_path_from_json(read_json_file(rdef.driver));
      const auto y0v = parse_csv_doubles(rdef.y0);
      require(static_cast<int>(y0v.size()) == sys.e, "--y0 needs e entries");
      Eigen::VectorXd y0(sys.e);
      for (int i = 0; i < sys.e; ++i) y0[i] = y0v[static_cast<std::size_t>(i)];
      auto sol = solve_rde(sys, y0, X);
      std::ostringstream os;
      write_solution_csv(X.times(), sol, os);
      if (rdef.out.empty())
        std::cout << os.str();
      else
        atomic_write_text(rdef.out, os.str());
      return 0;
    }

    if (hc->parsed()) {
      VectorFieldSystem sys = load_fields_arg(hcf.fields);
      Eigen::VectorXd y0 = Eigen::VectorXd::Zero(sys.e);
      if (!hcf.y0.empty()) {
        const auto v = parse_csv_doubles(hcf.y0);
        require(static_cast<int>(v.size()) == sys.e, "--y0 needs e entries");
        for (int i = 0; i < sys.e; ++i) y0[i] = v[static_cast<std::size_t>(i)];
      }
      RankPolicy pol;
      pol.rel_tol = hcf.tol;
      const std::uint64_t seed = hcf.seed_set ? hcf.seed : env_default_seed();
      auto rep = check_rank_constancy(sys, hcf.N, y0, hcf.depth, hcf.points, seed, pol);
      const std::string text = rep.to_json().dump(2) + "\n";
      if (hcf.out.empty())
        std::cout << text;
      else
        atomic_write_text(hcf.out, text);
      return rep.verdict == Verdict::holds ? 0 : 1;
    }

    if (sup->parsed()) return finish(run_support(resolve_config(supf, "support")));
    if (scale->parsed()) return finish(run_scaling_fit(resolve_config(scalef, "scaling-fit")));
    if (cond->parsed()) return finish(run_condition_suite(resolve_config(condf, "conditions")));
    if (dens->parsed()) return finish(run_density(resolve_config(densf, "density")));
    if (lem->parsed()) return finish(run_lemma_suite(resolve_config(lemf, "lemma-suite")));
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
