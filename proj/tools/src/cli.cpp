#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>

#include <CLI11.hpp>

#include "recommender.hpp"
#include "server.hpp"
#include "superopt/artifact.hpp"
#include "superopt/bounds.hpp"
#include "superopt/diagnose.hpp"
#include "superopt/pipeline.hpp"
#include "superopt/simulate.hpp"

namespace superopt::cli {

namespace {

struct SimulateArgs {
  std::string law;
  std::optional<double> c;
  bool with_w = false;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string mode = "observational";
  std::string out = "-";
};

struct FitArgs {
  std::string input;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<unsigned> threads;
  std::string out = "artifact.json";
};

struct ValueArgs {
  std::string artifact;
  std::string input;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
};

struct BoundsArgs {
  std::string input;
  std::string estimand = "ate";
};

struct DiagnoseArgs {
  std::string artifact;
  std::string input;
  std::string coarsen = "context";
  bool by_treatment = false;
  bool json_only = false;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
};

struct ServeArgs {
  std::string artifact;
  std::string host = "127.0.0.1";
  int port = 8080;
};

void with_output(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& write) {
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  std::ofstream file(path);
  if (!file) throw ValidationError("cannot write " + path);
  write(file);
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  const auto mode = parse_sample_mode(a.mode);
  if (!mode) throw ValidationError("unknown --mode '" + a.mode + "'");
  if (a.n == 0) throw ValidationError("--n must be positive");
  StructuralLaw law = [&] {
    if (const auto id = parse_example_id(a.law)) {
      ExampleParams params;
      params.with_w = a.with_w;
      if (a.c) {
        if (*id != ExampleId::ex3) throw ValidationError("--c applies to ex3 only");
        params.c = *a.c;
      }
      return build_example_law(*id, params);
    }
    if (a.c || a.with_w) throw ValidationError("--c and --with-w apply to the built-in examples only");
    return load_law(a.law);
  }();
  const Dataset data = draw_sample(law, a.n, a.seed, *mode);
  with_output(a.out, out, [&](std::ostream& s) { write_dataset_csv(data, s); });
  if (a.out != "-") err << "wrote " << data.size() << " rows to " << a.out << '\n';
  return kExitOk;
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  EstimationConfig cfg = a.config.empty() ? EstimationConfig{} : load_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (a.reps) cfg.bootstrap_reps = *a.reps;
  if (a.threads) cfg.threads = *a.threads;
  cfg.validate();
  const Dataset data = load_dataset(a.input);
  const FitResult fit = fit_pipeline(data, cfg);
  const RegimeArtifact artifact = make_artifact(fit, data);
  save_artifact(artifact, a.out);
  out << format_value_report(artifact.values);
  print_warnings(artifact.warnings, err);
  return kExitOk;
}

const std::set<std::string>& reserved_columns() {
  static const std::set<std::string> names{"z", "a", "a_star", "arm", "y"};
  return names;
}

/// Loads a CSV against an artifact's schema, naming the first disagreement.
Dataset load_for_artifact(const RegimeArtifact& artifact, const std::string& path) {
  const RawTable raw = read_csv_file(path);
  std::vector<std::string> covs;
  for (const auto& h : raw.header) {
    if (!reserved_columns().count(h)) covs.push_back(h);
  }
  std::vector<std::string> want;
  for (const auto& c : artifact.schema.covariates()) want.push_back(c.name);
  for (const auto& name : want) {
    if (std::find(covs.begin(), covs.end(), name) == covs.end()) {
      throw ValidationError("schema mismatch: covariate '" + name + "' missing from " + path);
    }
  }
  for (const auto& name : covs) {
    if (std::find(want.begin(), want.end(), name) == want.end()) {
      throw ValidationError("schema mismatch: covariate '" + name + "' is not in the artifact");
    }
  }
  Dataset data = validate_dataset(raw, artifact.schema);
  check_compatible(artifact, data);
  return data;
}

int cmd_value(const ValueArgs& a, std::ostream& out, std::ostream& err) {
  const RegimeArtifact artifact = load_artifact(a.artifact);
  const Dataset data = load_for_artifact(artifact, a.input);
  data.require_instrument("value");
  EstimationConfig cfg = artifact.config;
  if (a.seed) cfg.seed = *a.seed;
  if (a.reps) cfg.bootstrap_reps = *a.reps;
  const std::vector<Regime> regimes{Regime::observed(artifact.num_contexts()), artifact.optimal,
                                    artifact.superoptimal, artifact.superoptimal_z};
  const ValueBootstrap vb = bootstrap_ci(data, regimes, cfg);
  std::vector<ValueEntry> entries;
  for (std::size_t k = 0; k < vb.values.size(); ++k) {
    const auto& v = vb.values[k];
    entries.push_back({kReportRegimes[k], v.estimate, v.ci, v.widened, v.clamped});
  }
  out << format_value_report(entries);
  print_warnings(vb.warnings, err);
  return kExitOk;
}

int cmd_bounds(const BoundsArgs& a, std::ostream& out) {
  const TrialCounts counts = load_trial_counts(a.input);
  IntervalBound b;
  if (a.estimand == "ate") {
    b = balke_pearl_ate_bounds(counts);
  } else if (a.estimand == "att0") {
    b = natural_att_bounds(counts, 0);
  } else if (a.estimand == "att1") {
    b = natural_att_bounds(counts, 1);
  } else {
    throw ValidationError("unknown --estimand '" + a.estimand + "' (expected ate, att0 or att1)");
  }
  out << "lower " << format4(b.lo) << '\n' << "upper " << format4(b.hi) << '\n';
  return kExitOk;
}

int cmd_diagnose(const DiagnoseArgs& a, std::ostream& out, std::ostream& err) {
  const RegimeArtifact artifact = load_artifact(a.artifact);
  const Dataset data = load_for_artifact(artifact, a.input);
  data.require_instrument("diagnose");
  EstimationConfig cfg = artifact.config;
  if (a.seed) cfg.seed = *a.seed;
  if (a.reps) cfg.bootstrap_reps = *a.reps;
  Coarsening co = a.coarsen == "context" ? Coarsening::identity(artifact.schema, a.by_treatment)
                  : a.coarsen == "none"  ? Coarsening::trivial(artifact.schema, a.by_treatment)
                                         : Coarsening::by_covariate(artifact.schema, a.coarsen, a.by_treatment);
  const DiagnosticReport report = diagnose_sample(data, artifact.superoptimal, co, cfg);
  const auto doc = to_json(report);
  if (!a.out.empty()) with_output(a.out, out, [&](std::ostream& s) { s << doc.dump(2) << '\n'; });
  if (a.json_only) {
    out << doc.dump(2) << '\n';
  } else {
    out << format_diagnostic_table(report);
  }
  print_warnings(report.warnings, err);
  return kExitOk;
}

int cmd_serve(const ServeArgs& a, std::ostream& out) {
  if (a.port < 0 || a.port > 65535) throw ValidationError("--port must lie in [0, 65535]");
  const Recommender recommender(load_artifact(a.artifact));
  ConsultServer server(recommender);
  const int port = server.bind(a.host, a.port);
  if (port < 0) throw ValidationError("cannot bind " + a.host + ":" + std::to_string(a.port));
  out << "listening on http://" << a.host << ':' << port << std::endl;
  server.listen();
  return kExitOk;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Superoptimal treatment regimes from instrumented observational data", "superopt"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Draw a sample from a structural law");
  simulate->add_option("--law", sim.law, "ex1, ex2, ex3 or a law JSON file")->required();
  simulate->add_option("--c", sim.c, "ex3 compliance scale in (0, 0.4)");
  simulate->add_flag("--with-w", sim.with_w, "Carry the inert draw W of ex1/ex2 as a covariate");
  simulate->add_option("--n", sim.n, "Number of rows")->required();
  simulate->add_option("--seed", sim.seed, "RNG seed");
  simulate->add_option("--mode", sim.mode, "observational, two_arm_trial or preference_trial");
  simulate->add_option("--out", sim.out, "Output CSV ('-' for stdout)");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Learn regimes and value them with bootstrap intervals");
  fit_cmd->add_option("--input", fit.input, "Observational CSV")->required();
  fit_cmd->add_option("--config", fit.config, "EstimationConfig JSON");
  fit_cmd->add_option("--seed", fit.seed, "Override the configured seed");
  fit_cmd->add_option("--reps", fit.reps, "Override the number of bootstrap replicates");
  fit_cmd->add_option("--threads", fit.threads, "Worker threads (0 = all cores)");
  fit_cmd->add_option("--out", fit.out, "Artifact JSON path");

  ValueArgs val;
  auto* value = app.add_subcommand("value", "Value an artifact's regimes on a dataset");
  value->add_option("--artifact", val.artifact, "Artifact JSON")->required();
  value->add_option("--input", val.input, "Observational CSV")->required();
  value->add_option("--seed", val.seed, "Override the artifact's seed");
  value->add_option("--reps", val.reps, "Override the number of bootstrap replicates");

  BoundsArgs bnd;
  auto* bounds = app.add_subcommand("bounds", "Balke-Pearl bounds from trial counts");
  bounds->add_option("--input", bnd.input, "CSV with columns y,a,z,count")->required();
  bounds->add_option("--estimand", bnd.estimand, "ate, att0 or att1");

  DiagnoseArgs diag;
  auto* diagnose = app.add_subcommand("diagnose", "Unmeasured-confounding diagnostic");
  diagnose->add_option("--artifact", diag.artifact, "Artifact JSON")->required();
  diagnose->add_option("--input", diag.input, "Observational CSV")->required();
  diagnose->add_option("--coarsen", diag.coarsen, "context, none, or a covariate name");
  diagnose->add_flag("--by-treatment", diag.by_treatment, "Also stratify by the natural treatment");
  diagnose->add_flag("--json", diag.json_only, "Print the JSON report instead of the table");
  diagnose->add_option("--out", diag.out, "Also write the JSON report here");
  diagnose->add_option("--seed", diag.seed, "Override the artifact's seed");
  diagnose->add_option("--reps", diag.reps, "Override the number of bootstrap replicates");

  ServeArgs srv;
  auto* serve = app.add_subcommand("serve", "Serve recommendations over HTTP");
  serve->add_option("--artifact", srv.artifact, "Artifact JSON")->required();
  serve->add_option("--host", srv.host, "Bind address");
  serve->add_option("--port", srv.port, "Port (0 picks a free one)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim, out, err);
    if (fit_cmd->parsed()) return cmd_fit(fit, out, err);
    if (value->parsed()) return cmd_value(val, out, err);
    if (bounds->parsed()) return cmd_bounds(bnd, out);
    if (diagnose->parsed()) return cmd_diagnose(diag, out, err);
    if (serve->parsed()) return cmd_serve(srv, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IdentificationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitValidation;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("superopt");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  argv.push_back(nullptr);
  return run(static_cast<int>(storage.size()), argv.data(), out, err);
}

}  // namespace superopt::cli
