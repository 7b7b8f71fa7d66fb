#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "litmap/pipeline.hpp"

namespace {

using litmap::Goal;

constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

struct Overrides {
  std::map<std::string, std::string> values;
  bool iterate_core = false, no_enrich = false, no_subsumption = false;
};

// Every subcommand accepts every parameter; values land in the config
// overrides under the matching key.
void add_parameter_options(CLI::App* cmd, Overrides& ov) {
  struct Opt {
    const char* flag;
    const char* key;
    const char* help;
  };
  static const std::vector<Opt> opts = {
      {"--corpus", "corpus", "seed corpus file (or csv-pair directory)"},
      {"--corpus-format", "corpus_format", "jsonl or csv-pair"},
      {"--depth", "depth", "reverse citation depth, 0..2"},
      {"--provider", "provider", "fixture or http"},
      {"--fixtures-dir", "fixtures_dir", "fixture provider root"},
      {"--http-base-url", "http_base_url", "http provider base URL"},
      {"--rate-limit", "rate_limit", "http requests per second"},
      {"--parallelism", "parallelism", "concurrent provider queries and bootstrap workers"},
      {"--min-degree", "min_degree", "citation core: minimal total degree"},
      {"--resolution", "resolution", "Louvain resolution"},
      {"--bootstrap", "bootstrap", "rewiring repetitions for the citation null model (0 = off)"},
      {"--swaps-per-edge", "swaps_per_edge", "double-edge swaps per edge and repetition"},
      {"--max-ngram", "max_ngram", "longest multi-stem, 1..3"},
      {"--min-df", "min_df", "minimal document frequency of candidate terms"},
      {"--k-w", "k_w", "vocabulary size"},
      {"--stopwords-dir", "stopwords_dir", "directory of <lang>.txt stopword lists"},
      {"--semantic-mode", "semantic_mode", "sweep or fixed"},
      {"--theta-grid", "theta_grid", "edge weight thresholds, a:b[:step] or a,b,..."},
      {"--kmax-grid", "kmax_grid", "maximal degrees, a:b[:step] or a,b,..."},
      {"--theta-w", "theta_w", "fixed minimal edge weight"},
      {"--k-max", "k_max", "fixed maximal degree"},
      {"--filter-order", "filter_order", "hubs-first or edges-first"},
      {"--objectives", "pareto_objectives", "comma-separated Pareto objectives"},
      {"--interdisc-bootstrap", "interdisc_bootstrap", "shuffles for interdisciplinarity null models (0 = off)"},
      {"--belonging", "belonging", "overlapping modularity belonging: product or min"},
  };
  for (const auto& o : opts) {
    cmd->add_option_function<std::string>(
           o.flag, [&ov, key = std::string(o.key)](const std::string& v) { ov.values[key] = v; }, o.help)
        ->group("Parameters");
  }
  cmd->add_flag("--iterate-core", ov.iterate_core, "iterate the degree filter to a k-core")->group("Parameters");
  cmd->add_flag("--no-enrich", ov.no_enrich, "skip abstract enrichment")->group("Parameters");
  cmd->add_flag("--no-subsumption", ov.no_subsumption, "keep terms contained in longer terms")->group("Parameters");
}

// Table printed for --format csv.
std::string primary_csv(Goal goal, const litmap::PipelineResult& r) {
  auto file = [&r](const char* name) -> std::optional<std::string> {
    auto it = r.files.find(name);
    if (it == r.files.end()) return std::nullopt;
    return it->second;
  };
  switch (goal) {
    case Goal::Ingest:
    case Goal::Crawl: {
      std::string out = "metric,value\n";
      for (const auto& [k, v] : r.report["corpus"].items()) {
        if (v.is_primitive()) out += k + ',' + v.dump() + '\n';
      }
      return out;
    }
    case Goal::Citation: return *file("citation_table.csv");
    case Goal::Keywords: return *file("vocabulary.csv");
    case Goal::Semantic: return *file("semantic_table.csv");
    case Goal::Sweep: return *file("sweep.csv");
    case Goal::Export: {
      std::string out = "file\n";
      for (const auto& n : r.outputs) out += n + '\n';
      return out;
    }
    case Goal::Interdisc:
    case Goal::Full:
      if (auto f = file("interdisc.csv")) return *f;
      return file("citation_table.csv").value_or("");
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Citation and semantic network analysis of a literature corpus"};
  app.set_version_flag("--version", std::string(LITMAP_VERSION));
  app.require_subcommand(1);

  std::string config_path, out_dir, format = "json";
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "key = value configuration file")->option_text("FILE");
  app.add_option("--out-dir", out_dir, "output directory")->option_text("DIR");
  app.add_option("--seed", seed, "root random seed");
  app.add_option("--format", format, "stdout format")->check(CLI::IsMember({"json", "csv"}));

  Overrides ov;
  const std::vector<std::tuple<const char*, Goal, const char*>> commands = {
      {"ingest", Goal::Ingest, "read and normalize the seed corpus"},
      {"crawl", Goal::Crawl, "expand citations and attach abstracts"},
      {"citenet", Goal::Citation, "citation graph, communities and null model"},
      {"keywords", Goal::Keywords, "multi-stem extraction and vocabulary selection"},
      {"semnet", Goal::Semantic, "semantic network filtering and communities"},
      {"sweep", Goal::Sweep, "sensitivity sweep over the semantic filter grid"},
      {"interdisc", Goal::Interdisc, "interdisciplinarity measures crossing both layers"},
      {"run", Goal::Full, "full pipeline"},
      {"export", Goal::Export, "corpus CSV pair and GraphML files"},
  };
  std::map<CLI::App*, Goal> goals;
  for (const auto& [name, goal, help] : commands) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->fallthrough();
    add_parameter_options(cmd, ov);
    goals[cmd] = goal;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  Goal goal = Goal::Full;
  CLI::App* chosen = app.get_subcommands().front();
  goal = goals.at(chosen);

  auto values = ov.values;
  if (!out_dir.empty()) values["out_dir"] = out_dir;
  if (seed) values["seed"] = std::to_string(*seed);
  if (ov.iterate_core) values["iterate_core"] = "true";
  if (ov.no_enrich) values["enrich"] = "false";
  if (ov.no_subsumption) values["subsumption"] = "false";
  const bool fixed_given = values.count("theta_w") || values.count("k_max");
  const bool grid_given = values.count("theta_grid") || values.count("kmax_grid");
  if (fixed_given && !grid_given && !values.count("semantic_mode")) values["semantic_mode"] = "fixed";

  litmap::PipelineConfig cfg;
  try {
    litmap::Settings file;
    if (!config_path.empty()) file = litmap::read_config_file(config_path);
    cfg = litmap::make_config(litmap::merge_settings(std::move(file), values), goal != Goal::Ingest);
  } catch (const litmap::Error& e) {
    std::cerr << "litmap: config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    auto result = litmap::run_pipeline(cfg, goal);
    if (format == "csv") {
      std::cout << primary_csv(goal, result);
    } else {
      std::cout << result.report.dump(2) << '\n';
    }
  } catch (const litmap::ConfigError& e) {
    std::cerr << "litmap: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const litmap::StageError& e) {
    std::cerr << "litmap: stage '" << e.stage() << "' failed: " << e.what() << '\n';
    return kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "litmap: failed: " << e.what() << '\n';
    return kExitStage;
  }
  return 0;
}
