// semodel: learn and repair semantic models of data sources.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 stage failure.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "semodel/fixture.hpp"
#include "semodel/pipeline.hpp"

namespace {

using namespace semodel;

struct Overrides {
  std::string config;
  std::vector<std::string> sources;
  std::string out;
  std::optional<std::string> seed, sigma, eta, min_confidence, constraint_map, kb_snapshot, kg;
  bool dump_alignment = false;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("-c,--config", o.config, "Pipeline configuration file")->required();
  sub->add_option("-s,--source", o.sources, "Source(s) to process; default: every source with a model");
  sub->add_option("-o,--out", o.out, "Output directory (overrides output_dir)");
  sub->add_option("--seed", o.seed, "RNG seed");
  sub->add_option("--sigma", o.sigma, "Number of mined models to keep, or 'inf'");
  sub->add_option("--eta", o.eta, "Ratio threshold of type reduction");
  sub->add_option("--min-confidence", o.min_confidence, "Confidence cutoff of type reduction");
  sub->add_option("--constraint-map", o.constraint_map, "JSON map class -> instance cap");
  sub->add_option("--kb-snapshot", o.kb_snapshot, "Knowledge base snapshot (category<TAB>value)");
  sub->add_option("--kg", o.kg, "Knowledge graph file, or 'leave-one-out'");
  sub->add_flag("--dump-alignment", o.dump_alignment, "Write the alignment graph as DOT");
}

PipelineConfig resolve(const Overrides& o) {
  auto cfg = load_config(o.config);
  const fs::path cwd = fs::current_path();
  auto set = [&](const char* key, const std::optional<std::string>& v) {
    if (v) apply_setting(cfg, key, *v, cwd);
  };
  set("seed", o.seed);
  set("mining.sigma", o.sigma);
  set("reduction.eta_threshold", o.eta);
  set("reduction.min_confidence", o.min_confidence);
  set("constraint_map", o.constraint_map);
  set("kb_snapshot", o.kb_snapshot);
  set("kg", o.kg);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.dump_alignment) cfg.dump_alignment = true;
  cfg.validate();
  return cfg;
}

std::vector<std::string> targets(const Overrides& o, const Dataset& ds) {
  if (!o.sources.empty()) {
    for (const auto& s : o.sources)
      if (!ds.tables.count(s)) throw DataError("unknown source '" + s + "'");
    return o.sources;
  }
  std::vector<std::string> out;
  for (const auto& [n, _] : ds.described) out.push_back(n);
  if (out.empty()) throw DataError("no source has a semantic model; name targets with --source");
  return out;
}

int run_stages(const Overrides& o, Stage stop) {
  auto cfg = resolve(o);
  if (stop == Stage::Align) cfg.dump_alignment = true;
  const auto ds = load_dataset(cfg);
  const Logger log = [](const std::string& m) { std::cerr << "semodel: " << m << "\n"; };
  EvalReport report;
  std::vector<double> mrrs;
  for (const auto& t : targets(o, ds)) {
    auto r = run_pipeline(cfg, ds, t, log, stop);
    write_artifacts(r, cfg.output_dir);
    std::cout << t << ": wrote " << (cfg.output_dir / t).string() << "\n";
    if (stop == Stage::Label) {
      if (auto g = ds.described.find(t); g != ds.described.end()) {
        std::vector<SemanticType> gold;
        std::vector<CandidateTypeSet> preds;
        for (const auto& c : r.candidates)
          if (auto ty = semantic_type_of(g->second.model, c.column)) {
            gold.push_back(*ty);
            preds.push_back(c);
          }
        if (!gold.empty()) {
          mrrs.push_back(mrr(preds, gold));
          std::cout << t << ": MRR " << mrrs.back() << "\n";
        }
      }
    }
    if (r.evaluation) report.sources.push_back(*r.evaluation);
  }
  if (!mrrs.empty()) {
    double sum = 0;
    for (double m : mrrs) sum += m;
    std::cout << "mean MRR " << sum / static_cast<double>(mrrs.size()) << "\n";
  }
  if (!report.sources.empty()) {
    fs::create_directories(cfg.output_dir);
    write_json(cfg.output_dir / "report.json", report.to_json());
    write_text_file((cfg.output_dir / "report.txt").string(), report.to_table());
    std::cout << report.to_table();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn semantic models of data sources and repair them against a knowledge graph"};
  app.require_subcommand(1);

  Overrides o;
  const std::vector<std::pair<std::string, Stage>> stages = {
      {"label", Stage::Label},
      {"align", Stage::Align},
      {"seed", Stage::Seed},
      {"disambiguate", Stage::Disambiguate},
      {"correct", Stage::Correct},
      {"mine", Stage::Mine},
      {"pipeline", Stage::Evaluate},
  };
  const std::map<std::string, std::string> help = {
      {"label", "Predict candidate semantic types for every column"},
      {"align", "Build the alignment graph and attach candidate types"},
      {"seed", "Select the lowest-weight Steiner tree as seed model"},
      {"disambiguate", "Re-anchor ambiguous relationships of the seed"},
      {"correct", "Remove relationships absent from the knowledge graph and reduce types"},
      {"mine", "Complete the corrected model by mining the knowledge graph"},
      {"pipeline", "Run every stage and evaluate against gold models"},
  };
  std::map<CLI::App*, Stage> stage_of;
  for (const auto& [name, st] : stages) {
    auto* sub = app.add_subcommand(name, help.at(name));
    add_common(sub, o);
    stage_of[sub] = st;
  }

  std::string gold_path, pred_path;
  auto* eval = app.add_subcommand("evaluate", "Score a predicted model against a gold model");
  eval->add_option("--gold", gold_path, "Gold model JSON")->required();
  eval->add_option("--pred", pred_path, "Predicted model JSON")->required();

  std::string spec_path, fixture_out;
  auto* fixture = app.add_subcommand("make-fixture", "Generate a self-verified synthetic dataset");
  fixture->add_option("--spec", spec_path, "Fixture spec JSON")->required();
  fixture->add_option("-o,--out", fixture_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (const auto& [sub, st] : stage_of)
      if (sub->parsed()) return run_stages(o, st);
    if (eval->parsed()) {
      const auto gold = load_model(gold_path);
      const auto pred = load_model(pred_path);
      const auto pr = precision_recall(gold, pred);
      std::cout << "precision " << pr.precision << (pr.precision_undefined ? " (undefined: empty prediction)" : "")
                << "\nrecall " << pr.recall << "\nf1 " << pr.f1 << "\n";
      return 0;
    }
    if (fixture->parsed()) {
      const auto fx = make_fixture(FixtureSpec::from_json(read_json_file(spec_path)));
      write_fixture(fx, fixture_out);
      std::cout << "wrote " << fx.sources.size() << " sources and " << fx.kg.relations().size() << " quads to "
                << fixture_out << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "semodel: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "semodel: data error: " << e.what() << "\n";
    return 3;
  } catch (const StageError& e) {
    std::cerr << "semodel: stage failure: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
