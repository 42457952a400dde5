#include <glob.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gsbm/config.hpp"
#include "gsbm/diagnostics.hpp"
#include "gsbm/exact_oracle.hpp"
#include "gsbm/generate.hpp"
#include "gsbm/io.hpp"
#include "gsbm/sampler.hpp"
#include "gsbm/svg.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace gsbm;

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

// Flags given on the command line replace the config file's value.
void override_key(ConfigMap& cfg, const std::string& key,
                  const std::optional<std::string>& value) {
  if (value) cfg[key] = {*value};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::vector<fs::path> expand(const std::vector<std::string>& patterns) {
  std::vector<fs::path> out;
  for (const auto& pattern : patterns) {
    glob_t g{};
    const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
    if (rc == 0)
      for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
    globfree(&g);
    if (rc != 0) throw DataError("no trace files match '" + pattern + "'");
  }
  return out;
}

// Every modelled weight must have positive density at an interior parameter.
void check_support(const Network& net, const EdgeModel& model) {
  Rng rng(0);
  ParamVec theta = model.prior_sample(rng);
  while (!model.matching().interior(theta)) theta = model.prior_sample(rng);
  for_each_edge(net, [&](std::size_t i, std::size_t j, double w) {
    if (!std::isfinite(model.log_density(w, theta)))
      throw DataError("weight " + format_double(w) + " at (" + std::to_string(i + 1) + "," +
                      std::to_string(j + 1) + ") is outside the support of the " +
                      std::string(model.name()) + " model");
  });
}

json config_json(const RunConfig& rc) {
  json j;
  j["model"] = rc.model;
  for (const auto& [k, v] : rc.hyper) j["hyperparameters"][k] = v;
  const auto model = make_edge_model(rc.model, rc.hyper);
  for (const auto& [k, v] : model->hyperparameters()) j["hyperparameters"][k] = v;
  j["gamma"] = rc.gamma;
  j["delta"] = rc.delta;
  j["sigma_u"] = rc.sampler.sigma_u;
  j["rw_sd"] = rc.sampler.rw_sd;
  j["nu"] = rc.sampler.nu;
  j["iterations"] = rc.sampler.iterations;
  j["burn_in"] = rc.sampler.burn_in;
  j["seed"] = rc.sampler.seed;
  j["chains"] = rc.chains;
  for (auto m : rc.init) j["init"].push_back(std::string(to_string(m)));
  return j;
}

// generate -------------------------------------------------------------------

struct GenerateArgs {
  std::string config;
  std::string out_network;
  std::string out_truth;
  std::optional<std::string> seed;
};

int run_generate(const GenerateArgs& a) {
  ConfigMap cfg = read_config(a.config);
  override_key(cfg, "seed", a.seed);
  const GenerateSpec spec = generate_spec_from(cfg);
  const GeneratedNetwork g = generate(spec);
  write_network(a.out_network, g.network);
  write_truth(a.out_truth, g.truth);
  std::cout << "wrote " << g.network.size() << "-node network to " << a.out_network << '\n';
  return 0;
}

// fit ------------------------------------------------------------------------

struct FitArgs {
  std::string config;
  std::optional<std::string> network, out_dir, chains, seed, iterations, burn_in;
  std::vector<std::string> init;
};

int run_fit(const FitArgs& a) {
  ConfigMap cfg = read_config(a.config);
  override_key(cfg, "network", a.network);
  override_key(cfg, "out_dir", a.out_dir);
  override_key(cfg, "chains", a.chains);
  override_key(cfg, "seed", a.seed);
  override_key(cfg, "iterations", a.iterations);
  override_key(cfg, "burn_in", a.burn_in);
  if (!a.init.empty()) cfg["init"] = a.init;
  const RunConfig rc = run_config_from(cfg);
  if (!rc.network) throw ConfigError("no network given (--network or 'network' key)");

  const Network net = read_network(*rc.network, rc.directed, rc.self_loops);
  const auto model = make_edge_model(rc.model, rc.hyper);
  if (model->discrete() && !net.integer_valued())
    throw DataError("the " + rc.model + " model needs integer edge weights");
  check_support(net, *model);
  const DmaPrior prior(rc.gamma, rc.delta);

  fs::create_directories(rc.out_dir);
  const auto t0 = std::chrono::steady_clock::now();
  const auto traces = run_chains(net, *model, prior, rc.sampler, rc.chains, rc.init);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json manifest;
  manifest["command"] = "fit";
  manifest["network"] = fs::absolute(*rc.network).string();
  manifest["n_nodes"] = net.size();
  manifest["directed"] = net.directed();
  manifest["self_loops"] = net.self_loops();
  manifest["config"] = config_json(rc);
  manifest["wall_seconds"] = wall;
  const auto names = model->component_names();
  for (std::size_t c = 0; c < traces.size(); ++c) {
    const std::string stem = "chain_" + std::to_string(c + 1);
    const std::string moves = "moves_" + std::to_string(c + 1) + ".csv";
    write_trace(rc.out_dir / (stem + ".csv"), traces[c], names);
    write_moves(rc.out_dir / moves, traces[c]);
    manifest["chains"].push_back({{"index", c + 1},
                                  {"seed", chain_seed(rc.sampler.seed, c)},
                                  {"init", std::string(to_string(rc.init[c % rc.init.size()]))},
                                  {"trace", stem + ".csv"},
                                  {"moves", moves}});
    const auto ks = std::span(traces[c].k).subspan(rc.sampler.burn_in);
    std::cout << stem << ": modal K " << modal_value(ks) << " after burn-in\n";
  }
  write_text(rc.out_dir / "manifest.json", manifest.dump(2) + "\n");
  std::cout << "wrote " << traces.size() << " chain(s) to " << rc.out_dir.string() << " in "
            << wall << " s\n";
  return 0;
}

// diagnose -------------------------------------------------------------------

struct DiagnoseArgs {
  std::vector<std::string> traces;
  std::optional<std::string> truth, burn_in, network;
  std::string out_dir;
};

std::size_t manifest_burn_in(const fs::path& trace_path) {
  const fs::path m = trace_path.parent_path() / "manifest.json";
  if (!fs::exists(m)) return 0;
  std::ifstream in(m);
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("config") || !j["config"].contains("burn_in")) return 0;
  return j["config"]["burn_in"].get<std::size_t>();
}

MatchedTrace pool(const std::vector<MatchedTrace>& parts) {
  MatchedTrace out = parts.front();
  for (const auto& p : parts) out.n_labels = std::max(out.n_labels, p.n_labels);
  for (std::size_t c = 1; c < parts.size(); ++c) {
    out.z.insert(out.z.end(), parts[c].z.begin(), parts[c].z.end());
    out.theta0.insert(out.theta0.end(), parts[c].theta0.begin(), parts[c].theta0.end());
    out.theta.insert(out.theta.end(), parts[c].theta.begin(), parts[c].theta.end());
  }
  for (auto& row : out.theta) row.resize(out.n_labels);
  return out;
}

int run_diagnose(const DiagnoseArgs& a) {
  const auto paths = expand(a.traces);
  std::vector<TraceFile> files;
  for (const auto& p : paths) files.push_back(read_trace(p));
  const std::size_t n = files.front().trace.n_nodes;
  const auto names = files.front().component_names;
  for (std::size_t c = 1; c < files.size(); ++c)
    if (files[c].trace.n_nodes != n || files[c].component_names != names)
      throw DataError(paths[c].string() + " does not match the nodes or parameters of " +
                      paths[0].string());

  std::size_t burn_in = 0;
  if (a.burn_in) {
    const auto [p, ec] =
        std::from_chars(a.burn_in->data(), a.burn_in->data() + a.burn_in->size(), burn_in);
    if (ec != std::errc() || p != a.burn_in->data() + a.burn_in->size())
      throw ConfigError("--burn-in must be a non-negative integer");
  } else {
    burn_in = manifest_burn_in(paths.front());
    if (burn_in == 0) burn_in = files.front().trace.iterations() / 2;
  }
  for (std::size_t c = 0; c < files.size(); ++c)
    if (burn_in >= files[c].trace.iterations())
      throw DataError(paths[c].string() + " has no samples after burn-in " +
                      std::to_string(burn_in));

  std::vector<std::size_t> reference;
  if (a.truth) {
    reference = read_truth(*a.truth);
    if (reference.size() != n)
      throw DataError("truth file has " + std::to_string(reference.size()) +
                      " nodes, traces have " + std::to_string(n));
  } else {
    reference = modal_assignment(files.front().trace, burn_in);
  }

  std::vector<MatchedTrace> matched;
  for (const auto& f : files) matched.push_back(match_labels(f.trace, reference, burn_in));
  const MatchedTrace pooled = pool(matched);

  const fs::path out(a.out_dir);
  fs::create_directories(out);

  const PairMatrix pairs = posterior_pairs(pooled);
  write_matrix(out / "pairs.csv", pairs);

  // Modal labels of the pooled, matched samples.
  std::vector<std::size_t> mode(n);
  {
    std::ofstream os(out / "modal.csv");
    os << "node,block\n";
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::size_t> col(pooled.samples());
      for (std::size_t s = 0; s < pooled.samples(); ++s) col[s] = pooled.z[s][i];
      mode[i] = modal_value(col);
      os << i + 1 << ',' << mode[i] + 1 << '\n';
    }
  }

  // Quantiles and mode on the pooled draws; ESS summed over chains.
  auto rows = summarize_params(pooled, names);
  std::map<std::string, double> ess;
  std::map<std::string, bool> ess_ok;
  for (const auto& m : matched)
    for (const auto& r : summarize_params(m, names)) {
      if (r.ess.available) ess[r.name] += r.ess.ess;
      ess_ok[r.name] = ess_ok.contains(r.name) ? ess_ok[r.name] && r.ess.available
                                               : r.ess.available;
    }
  {
    std::ofstream os(out / "summary.csv");
    os << "parameter,mode,q05,q95,ess,present\n";
    for (const auto& r : rows) {
      os << r.name << ',' << format_double(r.mode) << ',' << format_double(r.q05) << ','
         << format_double(r.q95) << ',';
      if (r.ess.available && ess_ok[r.name]) os << format_double(ess[r.name]);
      else os << "NA";
      os << ',' << r.present << '\n';
    }
  }

  std::map<std::size_t, std::size_t> k_counts;
  std::size_t k_total = 0;
  for (const auto& f : files)
    for (std::size_t s = burn_in; s < f.trace.iterations(); ++s, ++k_total)
      ++k_counts[f.trace.k[s]];
  std::size_t modal_k = 0, best = 0;
  {
    std::ofstream os(out / "k.csv");
    os << "K,count,probability\n";
    for (const auto& [k, c] : k_counts) {
      os << k << ',' << c << ',' << format_double(static_cast<double>(c) / k_total) << '\n';
      if (c > best) {
        best = c;
        modal_k = k;
      }
    }
  }

  if (files.size() >= 2) {
    std::vector<std::vector<double>> means, vars;
    for (const auto& m : matched) {
      const auto ts = theta_summary(m);
      means.push_back(ts.mean);
      vars.push_back(ts.variance);
    }
    const std::size_t len = means.front().size();
    for (const auto& m : means)
      if (m.size() != len)
        throw DataError("Gelman-Rubin needs chains with equal numbers of retained samples");
    std::ofstream os(out / "rhat.csv");
    os << "summary,r_hat,upper_ci,degenerate\n";
    for (const auto& [label, series] : {std::pair{"mean", &means}, std::pair{"variance", &vars}}) {
      const auto gr = gelman_rubin(*series);
      os << label << ',' << format_double(gr.r_hat) << ',' << format_double(gr.upper_ci) << ','
         << (gr.degenerate ? "true" : "false") << '\n';
      std::cout << "R-hat (" << label << "): "
                << (gr.degenerate ? std::string("degenerate") : format_double(gr.r_hat)) << '\n';
    }
  }

  const auto order = order_by_label(mode);
  write_text(out / "pairs.svg", heatmap_svg(pairs.p, n, order, 0.0, 1.0,
                                            "Posterior probability of sharing a block"));
  for (std::size_t c = 0; c < files.size(); ++c)
    write_text(out / ("k_trace_" + std::to_string(c + 1) + ".svg"),
               trace_svg(files[c].trace.k, "K, " + paths[c].filename().string(), burn_in));
  if (a.network) {
    const Network net = read_network(*a.network);
    if (net.size() != n) throw DataError("network size does not match the traces");
    std::vector<double> lw(n * n);
    double hi = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) {
      lw[i] = std::log1p(std::max(0.0, net.weights()[i]));
      hi = std::max(hi, lw[i]);
    }
    write_text(out / "network.svg", heatmap_svg(lw, n, order, 0.0, hi, "log(1 + W)"));
  }

  std::cout << files.size() << " trace(s), burn-in " << burn_in << ", modal K " << modal_k
            << "; reports in " << out.string() << '\n';
  return 0;
}

// oracle ---------------------------------------------------------------------

struct OracleArgs {
  std::string network, config, out;
  std::optional<std::string> out_pairs, k_max;
};

int run_oracle(const OracleArgs& a) {
  ConfigMap cfg = read_config(a.config);
  override_key(cfg, "k_max", a.k_max);
  const RunConfig rc = run_config_from(cfg);
  ConjugateModel cm;
  const auto model = make_edge_model(rc.model, rc.hyper);
  const auto h = model->hyperparameters();
  if (rc.model == "bernoulli") {
    cm = {ConjugateFamily::bernoulli_beta, h.at("beta_a"), h.at("beta_b")};
  } else if (rc.model == "poisson") {
    cm = {ConjugateFamily::poisson_gamma, h.at("gamma_shape"), h.at("gamma_rate")};
  } else {
    throw ConfigError("the exact oracle supports the bernoulli and poisson models only");
  }
  const Network net = read_network(a.network, rc.directed, rc.self_loops);
  if (!net.integer_valued()) throw DataError("the oracle models need integer edge weights");
  check_support(net, *model);
  if (net.size() > kOracleMaxNodes)
    throw DataError("the exact oracle is limited to " + std::to_string(kOracleMaxNodes) +
                    " nodes");
  if (rc.k_max > net.size()) throw ConfigError("k_max cannot exceed the number of nodes");

  const ExactPosterior post = enumerate_posterior(net, cm, DmaPrior(rc.gamma, rc.delta), rc.k_max);
  {
    std::ofstream os(a.out);
    if (!os) throw std::runtime_error("cannot write " + a.out);
    os << "K,partition,probability\n";
    for (const auto& e : post.entries) {
      os << e.k << ',';
      for (std::size_t i = 0; i < e.partition.size(); ++i)
        os << (i ? " " : "") << e.partition[i] + 1;
      os << ',' << format_double(e.probability) << '\n';
    }
  }
  fs::path pairs_path;
  if (a.out_pairs) {
    pairs_path = *a.out_pairs;
  } else {
    pairs_path = fs::path(a.out);
    pairs_path.replace_filename(pairs_path.stem().string() + "_pairs.csv");
  }
  write_matrix(pairs_path, exact_pair_matrix(post));
  std::cout << post.entries.size() << " (K, partition) states; pair matrix in "
            << pairs_path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian stochastic block models with split-merge reversible-jump MCMC"};
  app.require_subcommand(1);

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Simulate a network from block sizes and parameters");
  gen->add_option("--config", ga.config, "Configuration file")->required();
  gen->add_option("--out-network", ga.out_network, "Network CSV to write")->required();
  gen->add_option("--out-truth", ga.out_truth, "Truth labels CSV to write")->required();
  gen->add_option("--seed", ga.seed, "Random seed");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Run the sampler");
  fit->add_option("--config", fa.config, "Configuration file")->required();
  fit->add_option("--network", fa.network, "Network file (dense CSV or edge list)");
  fit->add_option("--out-dir", fa.out_dir, "Directory for traces and manifest");
  fit->add_option("--chains", fa.chains, "Number of chains");
  fit->add_option("--seed", fa.seed, "Base random seed");
  fit->add_option("--iterations", fa.iterations, "Iterations per chain");
  fit->add_option("--burn-in", fa.burn_in, "Burn-in recorded in the manifest");
  fit->add_option("--init", fa.init, "prior, one-block or singletons; a list cycles over chains")
      ->delimiter(',');

  DiagnoseArgs da;
  auto* diag = app.add_subcommand("diagnose", "Summarise traces written by fit");
  diag->add_option("--traces", da.traces, "Trace file glob(s)")->required();
  diag->add_option("--truth", da.truth, "True labels CSV for label matching");
  diag->add_option("--out-dir", da.out_dir, "Directory for reports")->required();
  diag->add_option("--burn-in", da.burn_in, "Iterations to discard");
  diag->add_option("--network", da.network, "Network file for the weight heatmap");

  OracleArgs oa;
  auto* orc = app.add_subcommand("oracle", "Exact posterior of a small conjugate network");
  orc->add_option("--network", oa.network, "Network file")->required();
  orc->add_option("--config", oa.config, "Configuration file")->required();
  orc->add_option("--out", oa.out, "Posterior CSV to write")->required();
  orc->add_option("--out-pairs", oa.out_pairs, "Pair matrix CSV (default <out>_pairs.csv)");
  orc->add_option("--k-max", oa.k_max, "Largest K to enumerate (default N)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  try {
    if (gen->parsed()) return run_generate(ga);
    if (fit->parsed()) return run_fit(fa);
    if (diag->parsed()) return run_diagnose(da);
    if (orc->parsed()) return run_oracle(oa);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}
