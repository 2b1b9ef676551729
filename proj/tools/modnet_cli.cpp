#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "modnet/estimator.hpp"
#include "modnet/factorgraph.hpp"
#include "modnet/harness.hpp"
#include "modnet/model_io.hpp"
#include "modnet/parallel.hpp"
#include "modnet/rng.hpp"
#include "modnet/sampler.hpp"
#include "modnet/simgen.hpp"
#include "modnet/standardize.hpp"

namespace {

using namespace modnet;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

std::uint64_t resolve_seed(bool seed_given, std::uint64_t seed) {
  if (seed_given) return seed;
  if (const char* env = std::getenv("MODNET_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw DataError("MODNET_SEED is not a valid unsigned integer");
    }
  }
  return 0;
}

ModeratorSet parse_moderators(const std::string& spec, int p) {
  if (spec == "none") return ModeratorSet::none();
  if (spec == "all") return ModeratorSet::all(p);
  std::vector<int> members;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      members.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw DataError("bad moderator list entry: '" + tok + "'");
    }
  }
  if (members.empty()) throw DataError("empty moderator list");
  return ModeratorSet::of(members, p);  // throws "index out of range" on 0 etc.
}

AggregationRule parse_rule(const std::string& rule) {
  if (rule == "and") return AggregationRule::And;
  if (rule == "or") return AggregationRule::Or;
  throw DataError("rule must be 'and' or 'or'");
}

ThresholdConfig parse_threshold(const std::string& spec) {
  if (spec == "lw") return {ThresholdRule::SqrtLogPOverN};
  if (spec == "none") return {ThresholdRule::None};
  throw DataError("threshold must be 'lw' or 'none'");
}

std::string fmt7(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.7g", v);
  return buf;
}

nlohmann::ordered_json moderators_json(const ModeratorSet& mods) {
  return nlohmann::ordered_json(mods.members);
}

void print_interaction_summary(const MnmModel& model) {
  std::cout << "Pairwise interactions: " << model.beta.size() << "\n";
  for (const auto& [key, v] : model.beta)
    std::cout << "  " << key.first << "-" << key.second << "  weight "
              << fmt7(v) << "\n";
  std::cout << "3-way interactions: " << model.omega.size() << "\n";
  for (const auto& [key, v] : model.omega)
    std::cout << "  " << key[0] << "-" << key[1] << "-" << key[2] << "  weight "
              << fmt7(v) << "\n";
}

struct FitArgs {
  std::string data_path;
  bool no_header = false;
  std::string moderators = "none";
  std::string rule = "and";
  std::string threshold = "lw";
  double gamma = 0.5;
  int n_lambda = 50;
  double lambda_min_ratio = 0.01;
  double tol = 1e-7;
  int max_iter = 10000;
  std::string out;
  std::string nodewise_out;
  bool sequential = false;
  int jobs = default_jobs();
};

int cmd_fit(const FitArgs& a) {
  const RawData data = read_csv_file(a.data_path, !a.no_header);
  const ModeratorSet mods = parse_moderators(a.moderators, data.p());
  const AggregationRule rule = parse_rule(a.rule);
  PathConfig path{a.n_lambda, a.lambda_min_ratio, a.tol, a.max_iter};
  EbicConfig ebic{a.gamma};
  const ThresholdConfig threshold = parse_threshold(a.threshold);

  nlohmann::ordered_json meta;
  meta["rule"] = a.rule;
  meta["gamma"] = a.gamma;
  meta["moderators"] = moderators_json(mods);
  meta["seed"] = nullptr;
  meta["threshold"] = a.threshold;

  if (a.sequential) {
    if (!a.nodewise_out.empty())
      throw DataError("--nodewise-out is not available with --sequential");
    const CombinedSequentialModel seq =
        fit_sequential(data, rule, path, ebic, threshold, a.jobs);
    meta["estimator"] = "sequential";
    print_interaction_summary(seq.union_model);
    if (!a.out.empty())
      write_text_file(a.out, model_to_json(seq.union_model, data.column_names, meta));
    return 0;
  }

  const StandardizedData std_data = standardize(data);
  const auto fits = fit_nodewise(std_data, mods, path, ebic, threshold, a.jobs);
  const MnmModel model = aggregate(fits, rule);
  meta["estimator"] = "mnm";
  print_interaction_summary(model);
  if (!a.out.empty())
    write_text_file(a.out, model_to_json(model, data.column_names, meta));
  if (!a.nodewise_out.empty())
    write_text_file(a.nodewise_out, nodewise_to_json(fits, data.column_names, meta));
  return 0;
}

struct GenArgs {
  std::string kind = "random";
  bool seed_given = false;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen_model(const GenArgs& a) {
  const std::uint64_t seed = resolve_seed(a.seed_given, a.seed);
  GeneratingModelInfo info;
  if (a.kind == "random") {
    info = random_mnm(seed);
  } else if (a.kind == "isolated") {
    info = isolated_types_model();
  } else if (a.kind.rfind("neighbors-", 0) == 0) {
    int k = 0;
    try {
      k = std::stoi(a.kind.substr(10));
    } catch (const std::exception&) {
      throw DataError("bad neighbors kind: " + a.kind);
    }
    info.model = uncorrelated_neighbors_ggm(k);
    info.fit_moderators = ModeratorSet::none();
  } else {
    throw DataError("unknown model kind: " + a.kind +
                    " (expected random|isolated|neighbors-K)");
  }

  std::vector<std::string> names;
  for (int i = 1; i <= info.model.p; ++i) names.push_back("X" + std::to_string(i));

  nlohmann::ordered_json meta;
  meta["rule"] = nullptr;
  meta["gamma"] = nullptr;
  meta["moderators"] = moderators_json(info.fit_moderators);
  meta["seed"] = seed;
  meta["kind"] = a.kind;
  auto edge_types = nlohmann::ordered_json::array();
  for (const auto& [key, type] : info.edge_types) {
    nlohmann::ordered_json e;
    e["i"] = key.first;
    e["j"] = key.second;
    e["type"] = type == EdgeType::Unmoderated        ? "unmoderated"
                : type == EdgeType::PartiallyModerated ? "partially_moderated"
                                                       : "fully_moderated";
    const auto it = info.edge_moderator.find(key);
    if (it != info.edge_moderator.end()) e["moderator"] = it->second;
    edge_types.push_back(std::move(e));
  }
  meta["edge_types"] = std::move(edge_types);

  const std::string text = model_to_json(info.model, names, meta);
  if (a.out.empty()) std::cout << text;
  else write_text_file(a.out, text);
  return 0;
}

struct SampleArgs {
  std::string model_path;
  int n = 0;
  double tau = 3.09;
  int burnin = 100;
  int max_attempts = 1000;
  bool seed_given = false;
  std::uint64_t seed = 0;
  int jobs = default_jobs();
  std::string out;
};

int cmd_sample(const SampleArgs& a) {
  const LoadedModel loaded = model_from_json(read_text_file(a.model_path));
  SamplerConfig cfg;
  cfg.tau = a.tau;
  cfg.burn_in = a.burnin;
  cfg.max_attempts_per_case = a.max_attempts;
  cfg.seed = resolve_seed(a.seed_given, a.seed);
  cfg.jobs = a.jobs;
  const SampleBatch batch = gibbs_sample(loaded.model, a.n, cfg);

  std::vector<std::string> names = loaded.column_names;
  if (names.empty())
    for (int i = 1; i <= loaded.model.p; ++i) names.push_back("X" + std::to_string(i));

  std::ofstream out(a.out);
  if (!out) throw DataError("cannot write file: " + a.out);
  write_csv(out, batch.data, names);

  nlohmann::ordered_json meta;
  meta["seed"] = cfg.seed;
  meta["tau"] = cfg.tau;
  meta["burn_in"] = cfg.burn_in;
  meta["rejection_rate"] = batch.rejection_rate;
  meta["generator_name"] = Xoshiro256pp::name();
  write_text_file(a.out + ".meta.json", meta.dump(2) + "\n");
  std::cout << "wrote " << a.n << " cases, rejection rate "
            << fmt7(batch.rejection_rate) << "\n";
  return 0;
}

struct SimulateArgs {
  std::string scenario = "random";
  int reps = 20;
  std::string n_grid;
  std::string estimators = "mnm1,mnm2,mnm3";
  std::string rule = "and";
  std::string threshold = "lw";
  double gamma = 0.5;
  bool seed_given = false;
  std::uint64_t seed = 0;
  int jobs = default_jobs();
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  SimConfig cfg;
  cfg.replications = a.reps;
  cfg.rule = parse_rule(a.rule);
  cfg.threshold = parse_threshold(a.threshold);
  cfg.ebic.gamma = a.gamma;
  cfg.seed = resolve_seed(a.seed_given, a.seed);
  cfg.jobs = a.jobs;
  if (!a.n_grid.empty()) {
    cfg.n_grid.clear();
    std::stringstream ss(a.n_grid);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        cfg.n_grid.push_back(std::stoi(tok));
      } catch (const std::exception&) {
        throw DataError("bad n grid entry: '" + tok + "'");
      }
    }
  }
  cfg.estimators.clear();
  std::stringstream ss(a.estimators);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok == "mnm1") cfg.estimators.push_back(EstimatorKind::Mnm1);
    else if (tok == "mnm2") cfg.estimators.push_back(EstimatorKind::Mnm2);
    else if (tok == "mnm3") cfg.estimators.push_back(EstimatorKind::Mnm3);
    else if (tok == "split") cfg.estimators.push_back(EstimatorKind::Split);
    else throw DataError("unknown estimator: '" + tok + "'");
  }

  auto dump = [&](const SimResult& result, const std::string& path) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    write_records_csv(out, result.records);
  };

  if (a.scenario == "random") {
    const SimResult result = run_simulation(cfg);
    dump(result, a.out);
    std::cout << summary_tables(result, cfg);
  } else if (a.scenario == "isolated") {
    const SimResult result = run_isolated_types(cfg);
    dump(result, a.out);
    std::cout << summary_tables(result, cfg);
  } else if (a.scenario == "neighbors") {
    const auto per_k = run_neighbors_experiment(cfg);
    for (const auto& [k, result] : per_k) {
      if (!a.out.empty()) {
        std::string path = a.out;
        const auto dot = path.rfind('.');
        const std::string suffix = ".k" + std::to_string(k);
        if (dot == std::string::npos) path += suffix;
        else path.insert(dot, suffix);
        dump(result, path);
      }
      std::cout << "--- neighbors k=" << k << " ---\n"
                << summary_tables(result, cfg);
    }
  } else {
    throw DataError("unknown scenario: " + a.scenario);
  }
  return 0;
}

struct ShowArgs {
  std::string model_path;
  std::string interaction;
};

int cmd_show(const ShowArgs& a) {
  const LoadedModel loaded = model_from_json(read_text_file(a.model_path));
  std::vector<int> indices;
  std::stringstream ss(a.interaction);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      indices.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw DataError("bad interaction index: '" + tok + "'");
    }
  }
  const InteractionInfo info = show_interaction(loaded.model, indices);
  std::cout << "Interaction: ";
  for (std::size_t i = 0; i < indices.size(); ++i)
    std::cout << (i ? "-" : "") << indices[i];
  std::cout << "\nWeight: " << fmt7(info.weight) << " Sign: "
            << (info.sign > 0 ? "+1" : info.sign < 0 ? "-1" : "0") << "\n";
  return 0;
}

struct ExportArgs {
  std::string model_path;
  std::string nodewise_path;
  bool nodewise = false;
  bool pairwise_as_edge = false;
  std::string format = "dot";
  std::string out;
};

int cmd_export_graph(const ExportArgs& a) {
  FactorGraph graph;
  if (a.nodewise) {
    if (a.nodewise_path.empty())
      throw DataError("--nodewise requires --nodewise-fits FILE");
    const LoadedNodewise loaded = nodewise_from_json(read_text_file(a.nodewise_path));
    graph = to_nodewise_factor_graph(loaded.fits, loaded.column_names);
  } else {
    if (a.model_path.empty()) throw DataError("need --model FILE");
    const LoadedModel loaded = model_from_json(read_text_file(a.model_path));
    graph = to_factor_graph(loaded.model, a.pairwise_as_edge, loaded.column_names);
  }
  std::string text;
  if (a.format == "dot") text = export_dot(graph);
  else if (a.format == "json") text = export_json(graph);
  else throw DataError("format must be dot or json");
  if (a.out.empty()) std::cout << text;
  else write_text_file(a.out, text);
  return 0;
}

struct BaselineArgs {
  std::string data_path;
  bool no_header = false;
  int moderator = 0;
  std::string rule = "and";
  std::string threshold = "lw";
  double gamma = 0.5;
  int jobs = default_jobs();
  std::string out;
};

int cmd_baseline(const BaselineArgs& a) {
  const RawData data = read_csv_file(a.data_path, !a.no_header);
  PathConfig path;
  EbicConfig ebic{a.gamma};
  const SplitResult result =
      median_split_baseline(data, a.moderator, parse_rule(a.rule), path, ebic,
                            parse_threshold(a.threshold), a.jobs);

  nlohmann::ordered_json j;
  j["moderator"] = a.moderator;
  j["n_low"] = result.n_low;
  j["n_high"] = result.n_high;
  auto flags = nlohmann::ordered_json::array();
  for (const auto& f : result.flagged_edges) {
    nlohmann::ordered_json e;
    e["i"] = f.i;
    e["j"] = f.j;
    e["direction_sign"] = f.direction_sign;
    flags.push_back(std::move(e));
  }
  j["flagged_edges"] = std::move(flags);
  nlohmann::ordered_json empty_meta;
  j["low_model"] =
      nlohmann::ordered_json::parse(model_to_json(result.low_model, data.column_names, empty_meta));
  j["high_model"] =
      nlohmann::ordered_json::parse(model_to_json(result.high_model, data.column_names, empty_meta));
  const std::string text = j.dump(2) + "\n";
  if (a.out.empty()) std::cout << text;
  else write_text_file(a.out, text);
  std::cout << "flagged edges: " << result.flagged_edges.size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moderated network models: fit, sample, simulate, inspect, export"};
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Fit a moderated network model to CSV data");
  fit->add_option("--data", fit_args.data_path, "Input CSV file")->required();
  fit->add_flag("--no-header", fit_args.no_header, "CSV has no header row");
  fit->add_option("--moderators", fit_args.moderators,
                  "none | all | comma-separated 1-based indices")->required();
  fit->add_option("--rule", fit_args.rule, "Aggregation rule: and | or");
  fit->add_option("--threshold", fit_args.threshold,
                  "Estimate threshold: lw (sqrt(ln p / n)) | none");
  fit->add_option("--gamma", fit_args.gamma, "EBIC gamma");
  fit->add_option("--n-lambda", fit_args.n_lambda, "Path length");
  fit->add_option("--lambda-min-ratio", fit_args.lambda_min_ratio, "Path depth");
  fit->add_option("--tol", fit_args.tol, "Coordinate descent tolerance");
  fit->add_option("--max-iter", fit_args.max_iter, "Max sweeps per fit");
  fit->add_option("--out", fit_args.out, "Write model JSON here");
  fit->add_option("--nodewise-out", fit_args.nodewise_out,
                  "Write unaggregated nodewise estimates here");
  fit->add_flag("--sequential", fit_args.sequential,
                "Estimator version (2): all moderators in turn, union model");
  fit->add_option("--jobs", fit_args.jobs, "Worker threads");

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen-model", "Write a generating model");
  gen->add_option("--kind", gen_args.kind, "random | isolated | neighbors-K");
  auto* gen_seed = gen->add_option("--seed", gen_args.seed, "RNG seed");
  gen->add_option("--out", gen_args.out, "Output JSON (stdout if omitted)");

  SampleArgs sample_args;
  auto* sample = app.add_subcommand("sample", "Draw cases from a model");
  sample->add_option("--model", sample_args.model_path, "Model JSON")->required();
  sample->add_option("--n", sample_args.n, "Number of cases")->required();
  sample->add_option("--tau", sample_args.tau, "Rejection threshold");
  sample->add_option("--burnin", sample_args.burnin, "Gibbs burn-in sweeps");
  sample->add_option("--max-attempts", sample_args.max_attempts,
                     "Attempt budget per case");
  auto* sample_seed = sample->add_option("--seed", sample_args.seed, "RNG seed");
  sample->add_option("--jobs", sample_args.jobs, "Worker threads");
  sample->add_option("--out", sample_args.out, "Output CSV")->required();

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Run the recovery simulation");
  sim->add_option("--scenario", sim_args.scenario, "random | isolated | neighbors");
  sim->add_option("--reps", sim_args.reps, "Replications");
  sim->add_option("--n-grid", sim_args.n_grid, "Comma-separated sample sizes");
  sim->add_option("--estimators", sim_args.estimators,
                  "Comma-separated: mnm1,mnm2,mnm3,split");
  sim->add_option("--rule", sim_args.rule, "Aggregation rule: and | or");
  sim->add_option("--threshold", sim_args.threshold,
                  "Estimate threshold: lw (sqrt(ln p / n)) | none");
  sim->add_option("--gamma", sim_args.gamma, "EBIC gamma");
  auto* sim_seed = sim->add_option("--seed", sim_args.seed, "RNG seed");
  sim->add_option("--jobs", sim_args.jobs, "Worker threads");
  sim->add_option("--out", sim_args.out, "Records CSV path");

  ShowArgs show_args;
  auto* show = app.add_subcommand("show", "Print one interaction's weight and sign");
  show->add_option("--model", show_args.model_path, "Model JSON")->required();
  show->add_option("--int", show_args.interaction, "Indices i,j[,q]")->required();

  ExportArgs export_args;
  auto* exp = app.add_subcommand("export-graph", "Write a factor graph as DOT/JSON");
  exp->add_option("--model", export_args.model_path, "Model JSON");
  exp->add_option("--nodewise-fits", export_args.nodewise_path,
                  "Nodewise estimates JSON (from fit --nodewise-out)");
  exp->add_flag("--nodewise", export_args.nodewise,
                "Directed, unaggregated nodewise graph");
  exp->add_flag("--pairwise-as-edge", export_args.pairwise_as_edge,
                "Collapse pairwise factors into plain edges");
  exp->add_option("--format", export_args.format, "dot | json");
  exp->add_option("--out", export_args.out, "Output path (stdout if omitted)");

  BaselineArgs base_args;
  auto* base = app.add_subcommand("baseline", "Median-split GGM-difference baseline");
  base->add_option("--data", base_args.data_path, "Input CSV file")->required();
  base->add_flag("--no-header", base_args.no_header, "CSV has no header row");
  base->add_option("--moderator", base_args.moderator, "Split variable (1-based)")
      ->required();
  base->add_option("--rule", base_args.rule, "Aggregation rule: and | or");
  base->add_option("--threshold", base_args.threshold,
                  "Estimate threshold: lw (sqrt(ln p / n)) | none");
  base->add_option("--gamma", base_args.gamma, "EBIC gamma");
  base->add_option("--jobs", base_args.jobs, "Worker threads");
  base->add_option("--out", base_args.out, "Output JSON (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  gen_args.seed_given = gen_seed->count() > 0;
  sample_args.seed_given = sample_seed->count() > 0;
  sim_args.seed_given = sim_seed->count() > 0;

  try {
    if (fit->parsed()) return cmd_fit(fit_args);
    if (gen->parsed()) return cmd_gen_model(gen_args);
    if (sample->parsed()) return cmd_sample(sample_args);
    if (sim->parsed()) return cmd_simulate(sim_args);
    if (show->parsed()) return cmd_show(show_args);
    if (exp->parsed()) return cmd_export_graph(export_args);
    if (base->parsed()) return cmd_baseline(base_args);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
