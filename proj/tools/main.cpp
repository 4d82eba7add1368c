// Command line front end: one subcommand per pipeline stage.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ultradiff/error.hpp"
#include "ultradiff/heat.hpp"
#include "ultradiff/io.hpp"
#include "ultradiff/model.hpp"
#include "ultradiff/multitopo.hpp"
#include "ultradiff/operators.hpp"
#include "ultradiff/spectra.hpp"
#include "ultradiff/toposort.hpp"

namespace {

using namespace ultradiff;

struct RunConfig {
  std::string input;
  std::string output;
  std::string summary;
  std::string config;
  std::string matrix;
  std::string bullet = "ultrametric";
  std::string measure = "haar";
  double alpha = 1.0;
  std::optional<std::size_t> level;  // default: one below the vertex discs
  double t = 1.0;
  double tau = 1.0;
  std::optional<std::size_t> truncate;
  std::string swap;
  std::string seeds;
  std::size_t parallelism = 1;
  std::uint32_t min_prime = 2;
  std::uint64_t seed = 1;
  std::size_t span = 4;     // converge: reference level minus the first level
  std::size_t support = 2;  // converge: support of u0 above the first level
};

std::string fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(h));
  return buffer;
}

std::string number(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

struct Artifact {
  std::string path;  // empty: stdout
  std::string bytes;
  json metrics = json::object();
};

class Run {
public:
  explicit Run(std::string command) : command_(std::move(command)) {}

  void emit(Artifact artifact) { artifacts_.push_back(std::move(artifact)); }

  void finish(const RunConfig& cfg) const {
    json summary = json::object();
    summary["command"] = command_;
    summary["status"] = "ok";
    summary["artifacts"] = json::array();
    bool to_stdout = false;
    for (const auto& a : artifacts_) {
      if (a.path.empty()) {
        std::cout << a.bytes;
        to_stdout = true;
      } else {
        std::ofstream out(a.path, std::ios::binary);
        if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + a.path);
        out << a.bytes;
      }
      summary["artifacts"].push_back(
          {{"path", a.path.empty() ? "-" : a.path}, {"hash", fnv1a(a.bytes)}, {"metrics", a.metrics}});
    }
    const std::string text = summary.dump(2) + "\n";
    if (!cfg.summary.empty()) {
      std::ofstream(cfg.summary) << text;
    } else if (to_stdout) {
      std::cerr << text;
    } else {
      std::cout << text;
    }
  }

private:
  std::string command_;
  std::vector<Artifact> artifacts_;
};

std::vector<std::string> split(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void require_input(const RunConfig& cfg) {
  if (cfg.input.empty()) throw Error(ErrorCode::InvalidInput, "--input is required");
}

HierarchicalModel load_model(const RunConfig& cfg) {
  require_input(cfg);
  const auto file = graph_from_json(read_json(cfg.input));
  return build_model(file.distance_graph(), cfg.min_prime);
}

std::size_t level_of(const RunConfig& cfg, const HierarchicalModel& model) {
  return cfg.level ? *cfg.level : model.assign.m + 1;
}

void cmd_encode(const RunConfig& cfg) {
  require_input(cfg);
  const auto family = canonicalize(family_from_json(read_json(cfg.input)));
  const auto graph = encode(family);
  Run run("encode");
  run.emit({cfg.output, to_json(graph, family.primes).dump(2) + "\n",
            {{"vertices", graph.vertices.size()}, {"edges", graph.edges.size()},
             {"topologies", family.dags.size()}}});
  run.finish(cfg);
}

void cmd_decode(const RunConfig& cfg) {
  require_input(cfg);
  const auto file = graph_from_json(read_json(cfg.input));
  if (!file.encoded) throw Error(ErrorCode::ParseError, "graph file has no \"w\"/\"d\" encoding");
  const auto family = decode(*file.encoded, file.primes);
  Run run("decode");
  run.emit({cfg.output, to_json(family).dump(2) + "\n",
            {{"vertices", family.vertices.size()}, {"topologies", family.dags.size()}}});
  run.finish(cfg);
}

void cmd_index(const RunConfig& cfg) {
  const auto model = load_model(cfg);
  json out = json::object();
  out["vertices"] = model.dendrogram.labels();
  json delta = json::array();
  for (Eigen::Index i = 0; i < model.ultrametric.entries.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < model.ultrametric.entries.cols(); ++j) row.push_back(model.ultrametric.entries(i, j));
    delta.push_back(row);
  }
  out["ultrametric"] = delta;
  out["dendrogram"] = to_json(model.dendrogram);
  out["assignment"] = to_json(model.assign, model.dendrogram.labels());
  Run run("index");
  run.emit({cfg.output, out.dump(2) + "\n",
            {{"nodes", model.dendrogram.node_count()}, {"max_level", model.dendrogram.max_level()},
             {"p", model.assign.p}, {"m", model.assign.m}}});
  run.finish(cfg);
}

void cmd_toposort(const RunConfig& cfg) {
  require_input(cfg);
  const auto dag = dag_from_json(read_json(cfg.input));
  const auto dendrogram = dag_dendrogram(dag);
  std::vector<std::size_t> seeds;
  for (const auto& label : split(cfg.seeds)) seeds.push_back(dag.index(label));
  if (seeds.empty()) throw Error(ErrorCode::InvalidInput, "--seeds needs at least one vertex");
  const auto result = parallel_toposort(dag, dendrogram, seeds, {cfg.parallelism});
  std::string text;
  for (auto v : result.order) text += dag.labels()[v] + "\n";
  Run run("toposort");
  run.emit({cfg.output, text,
            {{"valid", is_linear_extension(dag, result.order)},
             {"vertices", dag.size()},
             {"clusters", result.stats.clusters},
             {"rounds", result.stats.rounds},
             {"merges", result.stats.merges},
             {"conflicts", result.stats.conflicts},
             {"degenerate", result.stats.degenerate}}});
  run.finish(cfg);
}

void cmd_spectrum(const RunConfig& cfg) {
  const auto model = load_model(cfg);
  const auto spec = model.kernel(parse_bullet(cfg.bullet), cfg.alpha);
  const auto disc = model.discretization(level_of(cfg, model));
  const auto a = generator(spec, model.assign, disc, parse_measure(cfg.measure));
  const auto basis = full_basis(spec, model.assign, model.dendrogram, model.nu, disc, a, cfg.parallelism);
  std::ostringstream out;
  write_spectrum(out, basis);
  double residual = 0.0;
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& e : basis) {
    residual = std::max(residual, e.residual);
    top = std::max(top, e.lambda);
  }
  const Eigen::MatrixXcd gram = gram_matrix(basis, a.weights);
  const double gram_error = (gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  Run run("spectrum");
  run.emit({cfg.output, out.str(),
            {{"modes", basis.size()}, {"max_residual", number(residual)},
             {"max_lambda", number(top)}, {"gram_error", number(gram_error)}}});
  if (!cfg.matrix.empty()) {
    std::ostringstream m;
    write_matrix(m, a, disc);
    run.emit({cfg.matrix, m.str(), {{"cells", a.size()}}});
  }
  run.finish(cfg);
}

void cmd_heat(const RunConfig& cfg) {
  const auto model = load_model(cfg);
  const auto spec = model.kernel(parse_bullet(cfg.bullet), cfg.alpha);
  const auto disc = model.discretization(level_of(cfg, model));
  const auto a = generator(spec, model.assign, disc, parse_measure(cfg.measure));
  const auto basis = full_basis(spec, model.assign, model.dendrogram, model.nu, disc, a, cfg.parallelism);
  const auto kernel = heat_kernel(basis, cfg.t);
  const Eigen::MatrixXd spectral = transition_matrix(kernel, a.weights);
  const Eigen::MatrixXd direct = semigroup(a, cfg.t, SemigroupMethod::Pade).matrix;

  std::ostringstream out;
  out << "# t=" << number(cfg.t) << " p=" << a.p << " n=" << a.level << " bullet=" << to_string(a.bullet)
      << " alpha=" << number(a.alpha) << " measure=" << to_string(a.measure) << " cells=" << a.size() << '\n';
  out << "# cells";
  for (const auto& c : disc.cells) out << ' ' << c.cell.to_string();
  out << '\n';
  for (Eigen::Index x = 0; x < kernel.p.rows(); ++x) {
    for (Eigen::Index y = 0; y < kernel.p.cols(); ++y) out << (y ? " " : "") << number(kernel.p(x, y));
    out << '\n';
  }
  Run run("heat");
  run.emit({cfg.output, out.str(),
            {{"cells", a.size()},
             {"route_difference", number((spectral - direct).cwiseAbs().maxCoeff())},
             {"max_row_sum_error", number((spectral.rowwise().sum().array() - 1.0).abs().maxCoeff())},
             {"max_imaginary", number(kernel.max_imaginary)}}});
  run.finish(cfg);
}

json report_metrics(const BoundReport& r) {
  return {{"kind", r.kind},         {"t", number(r.t)},
          {"measured", number(r.measured)}, {"bound", number(r.bound)},
          {"statement_bound", number(r.statement_bound)}, {"slack", number(r.slack())}};
}

void cmd_bounds(const RunConfig& cfg) {
  const auto model = load_model(cfg);
  const std::size_t n = level_of(cfg, model);
  Run run("bounds");
  std::ostringstream out;
  if (!cfg.swap.empty()) {
    const auto names = split(cfg.swap);
    if (names.size() != 2) throw Error(ErrorCode::InvalidInput, "--swap takes two kernels a,b");
    const auto a = model.kernel(parse_bullet(names[0]), cfg.alpha);
    const auto b = model.kernel(parse_bullet(names[1]), cfg.alpha);
    const auto report = certify_kernel_swap(a, b, model.assign, model.discretization(n), cfg.t,
                                            parse_measure(cfg.measure));
    write_bound_report(out, report);
    run.emit({cfg.output, out.str(), report_metrics(report)});
  } else {
    if (!cfg.truncate) throw Error(ErrorCode::InvalidInput, "bounds needs --truncate L or --swap a,b");
    const auto spec = model.kernel(parse_bullet(cfg.bullet), cfg.alpha);
    const auto disc = model.discretization(n);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    Eigen::VectorXd u(disc.size());
    for (auto& x : u) x = uniform(rng);
    const auto report = certify_truncation(spec, model.dendrogram, model.assign, *cfg.truncate, n, cfg.t, u);
    write_bound_report(out, report);
    run.emit({cfg.output, out.str(), report_metrics(report)});
  }
  run.finish(cfg);
}

void cmd_converge(const RunConfig& cfg) {
  const auto model = load_model(cfg);
  const auto spec = model.kernel(parse_bullet(cfg.bullet), cfg.alpha);
  const auto measure = parse_measure(cfg.measure);
  const std::size_t first = level_of(cfg, model);
  const std::size_t reference = first + cfg.span;
  const auto fine = model.discretization(reference);
  const auto u0 = continuous_like_initial(fine, model.assign.m, std::min(reference, first + cfg.support), cfg.seed);
  std::vector<std::size_t> levels;
  for (std::size_t n = first; n <= reference; ++n) levels.push_back(n);
  const auto report = convergence_study(spec, model.assign, model.dendrogram, model.nu, measure, u0,
                                        reference, levels, cfg.tau, {Projector::PointEvaluation, true, cfg.parallelism});
  std::ostringstream out;
  write_convergence(out, report);
  Run run("converge");
  run.emit({cfg.output, out.str(),
            {{"reference_level", reference},
             {"monotone", report.monotone()},
             {"final_gap", number(report.rows.back().gap)}}});
  run.finish(cfg);
}

/// Fills options absent from the command line from the JSON config file.
void apply_config(CLI::App& sub, RunConfig& cfg) {
  if (cfg.config.empty()) return;
  const json file = read_json(cfg.config);
  if (!file.is_object()) throw Error(ErrorCode::ParseError, "config must be a JSON object");
  for (auto it = file.begin(); it != file.end(); ++it) {
    CLI::Option* opt = nullptr;
    try {
      opt = sub.get_option("--" + it.key());
    } catch (const CLI::OptionNotFound&) {
      throw Error(ErrorCode::ParseError, "unknown config key '" + it.key() + "'");
    }
    if (opt->count() > 0) continue;
    const auto& value = it.value();
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_array()) {
      for (const auto& item : value) {
        if (!text.empty()) text += ",";
        text += item.is_string() ? item.get<std::string>() : item.dump();
      }
    } else {
      text = value.dump();
    }
    try {
      opt->add_result(text);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw Error(ErrorCode::ParseError, "config key '" + it.key() + "': " + e.what());
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Hierarchical p-adic diffusion on multi-topology graphs"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input,-i", cfg.input, "Input file");
    sub->add_option("--output,-o", cfg.output, "Artifact path (stdout if omitted)");
    sub->add_option("--summary", cfg.summary, "Write the JSON summary here");
    sub->add_option("--config", cfg.config, "JSON file with option defaults");
    sub->add_option("--parallelism", cfg.parallelism, "Task cap")->check(CLI::PositiveNumber);
    return sub;
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--min-prime", cfg.min_prime, "Lower bound for the prime p")->check(CLI::PositiveNumber);
    sub->add_option("--bullet", cfg.bullet, "adjacency | graphdist | ultrametric")
        ->check(CLI::IsMember({"adjacency", "graphdist", "ultrametric"}));
    sub->add_option("--measure", cfg.measure, "haar | nu")->check(CLI::IsMember({"haar", "nu"}));
    sub->add_option("--alpha", cfg.alpha, "Kernel exponent (>= 1)")->check(CLI::Range(1.0, 1e6));
    sub->add_option("--level", cfg.level, "Discretization level n");
    return sub;
  };

  add_common(app.add_subcommand("encode", "Encode a topology family as one graph"));
  add_common(app.add_subcommand("decode", "Recover the topology family from a graph"));
  auto* index_cmd = add_common(app.add_subcommand("index", "Build the ultrametric index"));
  index_cmd->add_option("--min-prime", cfg.min_prime, "Lower bound for the prime p")->check(CLI::PositiveNumber);
  auto* toposort_cmd = add_common(app.add_subcommand("toposort", "Cluster-parallel topological sort"));
  toposort_cmd->add_option("--seeds", cfg.seeds, "Comma separated seed vertices");
  auto* spectrum_cmd = add_model(add_common(app.add_subcommand("spectrum", "Eigenbasis of the generator")));
  spectrum_cmd->add_option("--matrix", cfg.matrix, "Also export the generator matrix");
  auto* heat_cmd = add_model(add_common(app.add_subcommand("heat", "Heat kernel table")));
  heat_cmd->add_option("--t", cfg.t, "Time")->check(CLI::NonNegativeNumber);
  auto* bounds_cmd = add_model(add_common(app.add_subcommand("bounds", "Certify a truncation or kernel swap bound")));
  bounds_cmd->add_option("--truncate", cfg.truncate, "Truncation level L");
  bounds_cmd->add_option("--swap", cfg.swap, "Kernel pair a,b");
  bounds_cmd->add_option("--t", cfg.t, "Time horizon")->check(CLI::NonNegativeNumber);
  bounds_cmd->add_option("--seed", cfg.seed, "Seed of the random test function");
  auto* converge_cmd = add_model(add_common(app.add_subcommand("converge", "Level convergence study")));
  converge_cmd->add_option("--tau", cfg.tau, "Time horizon")->check(CLI::NonNegativeNumber);
  converge_cmd->add_option("--seed", cfg.seed, "Seed of the initial condition");
  converge_cmd->add_option("--span", cfg.span, "Reference level above the first level");
  converge_cmd->add_option("--support", cfg.support, "Support level of u0 above the first level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_status(ErrorCode::ParseError);
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    apply_config(*sub, cfg);
    const std::string name = sub->get_name();
    if (name == "encode") cmd_encode(cfg);
    else if (name == "decode") cmd_decode(cfg);
    else if (name == "index") cmd_index(cfg);
    else if (name == "toposort") cmd_toposort(cfg);
    else if (name == "spectrum") cmd_spectrum(cfg);
    else if (name == "heat") cmd_heat(cfg);
    else if (name == "bounds") cmd_bounds(cfg);
    else cmd_converge(cfg);
  } catch (const Error& e) {
    json err = {{"status", "error"}, {"error", error_name(e.code())}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return exit_status(e.code());
  } catch (const std::exception& e) {
    std::cerr << json{{"status", "error"}, {"error", "Internal"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
  return 0;
}
