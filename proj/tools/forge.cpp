// forge: build contradiction-bearing passages, inject them into a corpus,
// and measure reasoning-cost amplification end to end.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "forge/architect.hpp"
#include "forge/bundled.hpp"
#include "forge/defenses.hpp"
#include "forge/metrics.hpp"
#include "forge/model.hpp"
#include "forge/pipeline.hpp"
#include "forge/retrieval.hpp"
#include "forge/runner.hpp"
#include "forge/style_adapter.hpp"
#include "forge/tasks.hpp"
#include "forge/weaver.hpp"

namespace {

using namespace forge;

TaskSet tasks_from_arg(const std::string& arg) {
  return arg == "bundled" ? bundled_tasks() : load_tasks(arg);
}

Corpus corpus_from_arg(const std::string& arg) {
  return arg == "bundled" ? bundled_corpus() : load_corpus(arg);
}

int cmd_corpus_validate(const std::string& path) {
  Corpus corpus = corpus_from_arg(path);
  std::size_t clean = 0;
  std::size_t poison = 0;
  std::size_t annotated = 0;
  for (const Document& doc : corpus.documents()) {
    (doc.origin == Origin::clean ? clean : poison) += 1;
    annotated += doc.annotations.has_value() ? 1 : 0;
  }
  std::cout << "documents " << corpus.size() << " (clean " << clean
            << ", poison " << poison << ", annotated " << annotated << ")\n";
  return 0;
}

int cmd_corpus_inject(const std::string& base_path,
                      const std::string& poison_path,
                      const std::string& out_path) {
  Corpus base = corpus_from_arg(base_path);
  Corpus poisons = load_corpus(poison_path);
  Corpus merged = inject(base, poisons.documents());
  save_corpus(merged, out_path);
  std::cout << "wrote " << merged.size() << " documents to " << out_path
            << "\n";
  return 0;
}

int cmd_retrieve(const std::string& query, const std::string& corpus_path,
                 const RetrievalConfig& config) {
  Corpus corpus = corpus_from_arg(corpus_path);
  Retriever retriever(config);
  for (const RankedResult& result : retriever.top_k(query, corpus)) {
    std::printf("%2d  %.6f  %s\n", result.rank, result.score,
                result.doc_id.c_str());
  }
  return 0;
}

int cmd_architect(const std::string& tasks_path, int statement_count,
                  const std::string& out_path) {
  TaskSet tasks = tasks_from_arg(tasks_path);
  std::vector<nlohmann::json> records;
  for (const Task& task : tasks.tasks) {
    ContradictionBlueprint blueprint =
        build_blueprint(decompose(task), statement_count);
    blueprint.task_id = task.id;
    ValidationReport report = validate_blueprint(blueprint);
    if (!report.ok()) {
      throw ValidationError("task " + task.id + ": " + report.summary());
    }
    records.push_back(blueprint_to_json(blueprint));
  }
  write_jsonl(out_path, records);
  std::cout << "wrote " << records.size() << " blueprints to " << out_path
            << "\n";
  return 0;
}

int cmd_weave(const std::string& tasks_path, const std::string& blueprints_path,
              const std::string& out_path) {
  TaskSet tasks = tasks_from_arg(tasks_path);
  std::vector<nlohmann::json> records;
  for (const nlohmann::json& line : read_jsonl(blueprints_path)) {
    ContradictionBlueprint blueprint = blueprint_from_json(line);
    const Task* task = tasks.find(blueprint.task_id);
    if (task == nullptr) {
      throw ValidationError("blueprint references unknown task \"" +
                            blueprint.task_id + "\"");
    }
    records.push_back(passage_to_json(weave(blueprint, *task)));
  }
  write_jsonl(out_path, records);
  std::cout << "wrote " << records.size() << " passages to " << out_path
            << "\n";
  return 0;
}

struct AdaptArgs {
  std::string task_id;
  std::string passage_path;
  std::string blueprint_path;
  std::string tasks_path = "bundled";
  std::string corpus_path = "bundled";
  std::string model = "simulator";
  std::uint64_t seed = 0;
  AdapterConfig config;
  std::string out_dir;
};

int cmd_adapt(const AdaptArgs& args) {
  TaskSet tasks = tasks_from_arg(args.tasks_path);
  const Task* task = tasks.find(args.task_id);
  if (task == nullptr) {
    throw ValidationError("unknown task \"" + args.task_id + "\"");
  }
  Corpus corpus = corpus_from_arg(args.corpus_path);

  std::optional<AdversarialPassage> p0;
  for (const nlohmann::json& line : read_jsonl(args.passage_path)) {
    AdversarialPassage candidate = passage_from_json(line);
    if (candidate.task_id == args.task_id) {
      p0 = std::move(candidate);
      break;
    }
  }
  if (!p0.has_value()) {
    throw ValidationError("no passage for task \"" + args.task_id +
                          "\" in " + args.passage_path);
  }

  std::optional<ContradictionBlueprint> blueprint;
  for (const nlohmann::json& line : read_jsonl(args.blueprint_path)) {
    ContradictionBlueprint candidate = blueprint_from_json(line);
    if (candidate.task_id == args.task_id) {
      blueprint = std::move(candidate);
      break;
    }
  }
  if (!blueprint.has_value()) {
    throw ValidationError("no blueprint for task \"" + args.task_id +
                          "\" in " + args.blueprint_path);
  }

  if (args.model != "simulator") {
    throw ValidationError(
        "only the simulator backend is wired into `forge adapt`; use "
        "`forge run` with an http backend config");
  }
  SimulatorModel model(SimulatorParams(), tasks);
  Retriever retriever(RetrievalConfig{});

  AdaptResult result =
      adapt(*p0, *blueprint, default_operator_library(), model, retriever,
            *task, corpus, args.config, args.seed);

  std::cout << "generations " << result.generations_run
            << (result.stabilized_early ? " (stabilized)" : "")
            << "  champion fitness " << result.champion_fitness << "\n";
  std::cout << "style classes:";
  for (const std::string& cls : result.champion.annotations.style_classes) {
    std::cout << ' ' << cls;
  }
  std::cout << "\n";

  if (!args.out_dir.empty()) {
    std::filesystem::path dir(args.out_dir);
    write_jsonl(dir / "champion.jsonl",
                {passage_to_json(result.champion)});
    std::vector<nlohmann::json> audit;
    for (const AuditEntry& entry : result.audit) {
      audit.push_back(audit_entry_to_json(entry));
    }
    write_jsonl(dir / "audit.jsonl", audit);
    std::cout << "wrote champion and audit log to " << args.out_dir << "\n";
  }
  return 0;
}

int cmd_run(const std::string& config_path) {
  ExperimentConfig config = load_config(config_path);
  ExperimentManifest manifest = run_experiment(config);
  std::cout << read_text_file(config.output_dir / "report.txt");
  std::cout << "artifacts in " << config.output_dir.string() << " ("
            << manifest.artifacts.size() << " files)\n";
  return 0;
}

int cmd_ablate(const std::string& config_path,
               const std::vector<std::string>& stage_names) {
  ExperimentConfig config = load_config(config_path);
  std::set<AblationStage> stages;
  for (const std::string& name : stage_names) {
    if (name == "p0_only") {
      stages.insert(AblationStage::p0_only);
    } else if (name == "full") {
      stages.insert(AblationStage::full);
    } else {
      throw ValidationError("unknown ablation stage \"" + name + "\"");
    }
  }
  if (stages.empty()) {
    stages.insert(AblationStage::full);
  }
  AblationReport report = ablation(config, stages);
  std::cout << render_ablation(report);
  return 0;
}

int cmd_report(const std::string& log_arg, const std::string& format) {
  std::filesystem::path path(log_arg);
  if (std::filesystem::is_directory(path)) {
    path /= "run_log.jsonl";
  }
  std::vector<RunRecord> records = load_run_log(path);
  std::vector<RunRecord> clean;
  std::vector<RunRecord> poisoned;
  std::map<std::string, std::vector<RunRecord>> defended;
  for (RunRecord& record : records) {
    switch (record.condition) {
      case Condition::clean:
        clean.push_back(std::move(record));
        break;
      case Condition::poisoned:
        poisoned.push_back(std::move(record));
        break;
      case Condition::defended:
        defended[record.defense].push_back(std::move(record));
        break;
    }
  }
  if (clean.empty()) {
    throw ValidationError("run log has no clean records");
  }

  nlohmann::json as_json;
  std::ostringstream rendered;
  if (!poisoned.empty()) {
    MetricsReport report = compute_report(clean, poisoned);
    as_json["attack"] = report_to_json(report);
    rendered << "attack\n" << render_report(report);
  }
  for (const auto& [label, defense_records] : defended) {
    MetricsReport report = compute_report(clean, defense_records);
    as_json["defenses"][label] = report_to_json(report);
    rendered << "\ndefense: " << label << "\n" << render_report(report);
  }

  if (format == "records") {
    std::cout << dump_sorted(as_json) << "\n";
  } else {
    std::cout << rendered.str();
  }
  return 0;
}

struct DefendArgs {
  std::string config_path;
  std::string kind;
  std::optional<long long> budget;
  std::optional<double> threshold;
  bool strict = false;
};

int cmd_defend(const DefendArgs& args) {
  ExperimentConfig config = load_config(args.config_path);
  DefenseSpec spec;
  spec.kind = defense_kind_from_string(args.kind);
  if (args.budget.has_value()) {
    spec.budget_tokens = *args.budget;
  } else if (spec.kind == DefenseKind::budget) {
    spec.budget_tokens = 500;
  }
  if (args.threshold.has_value()) {
    spec.trust_threshold = *args.threshold;
  }
  spec.strict_meta_flag = args.strict;
  spec.validate();

  TaskSet tasks = config.task_file.empty() ? bundled_tasks()
                                           : load_tasks(config.task_file);
  Corpus corpus = config.corpus_file.empty()
                      ? bundled_corpus()
                      : load_corpus(config.corpus_file);
  Retriever retriever(config.retrieval);
  std::unique_ptr<ModelAdapter> model = make_backend(config.backend, tasks);

  std::vector<TaskForgeResult> forged =
      forge_poisons(config, tasks, corpus, retriever, *model, true);
  std::vector<Document> poisons;
  TaskSet usable;
  for (std::size_t i = 0; i < forged.size(); ++i) {
    if (!forged[i].error.empty()) {
      warn("task " + forged[i].task_id + " failed: " + forged[i].error);
      continue;
    }
    usable.tasks.push_back(tasks.tasks[i]);
    poisons.push_back(
        forged[i].adapted->to_document("poison-" + forged[i].task_id));
  }
  if (usable.empty()) {
    throw ValidationError("every task failed during forging");
  }
  Corpus corpus_mix = inject(corpus, poisons);

  std::vector<RunRecord> clean_records;
  std::vector<RunRecord> poisoned_records;
  for (const Task& task : usable.tasks) {
    clean_records.push_back(
        evaluate_task(task, corpus, retriever, *model, Condition::clean)
            .record);
    poisoned_records.push_back(evaluate_task(task, corpus_mix, retriever,
                                             *model, Condition::poisoned)
                                   .record);
  }
  MetricsReport attack = compute_report(clean_records, poisoned_records);
  MetricsReport defense =
      evaluate_defense(usable, corpus_mix, *model, retriever, spec);

  std::cout << "attack\n" << render_report(attack);
  std::cout << "\ndefense: " << to_string(spec.kind) << "\n"
            << render_report(defense);
  return 0;
}

int cmd_bundled_export(const std::string& out_dir) {
  std::filesystem::path dir(out_dir);
  save_tasks(bundled_tasks(), dir / "tasks.jsonl");
  save_corpus(bundled_corpus(), dir / "corpus.jsonl");
  std::cout << "wrote bundled tasks and corpus to " << out_dir << "\n";
  return 0;
}

int cmd_verify(const std::string& dir) {
  std::vector<std::string> mismatches;
  if (verify_manifest(dir, &mismatches)) {
    std::cout << "manifest ok\n";
    return 0;
  }
  for (const std::string& note : mismatches) {
    std::cerr << note << "\n";
  }
  throw ValidationError("manifest verification failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "forge: contradiction-bearing corpus poisons and reasoning-cost "
      "measurement"};
  app.require_subcommand(1);

  // corpus validate/inject
  CLI::App* corpus_cmd = app.add_subcommand("corpus", "corpus utilities");
  corpus_cmd->require_subcommand(1);
  std::string corpus_path;
  CLI::App* corpus_validate =
      corpus_cmd->add_subcommand("validate", "check a corpus file");
  corpus_validate->add_option("path", corpus_path, "corpus JSONL or 'bundled'")
      ->required();
  std::string inject_base;
  std::string inject_poisons;
  std::string inject_out;
  CLI::App* corpus_inject = corpus_cmd->add_subcommand(
      "inject", "merge poison documents into a corpus");
  corpus_inject->add_option("base", inject_base, "base corpus")->required();
  corpus_inject->add_option("poisons", inject_poisons, "poison documents")
      ->required();
  corpus_inject->add_option("-o,--output", inject_out, "output path")
      ->required();

  // retrieve
  std::string query;
  std::string retrieve_corpus = "bundled";
  RetrievalConfig retrieval_config;
  std::string provider = "surrogate";
  CLI::App* retrieve =
      app.add_subcommand("retrieve", "rank corpus documents for a query");
  retrieve->add_option("-q,--query", query, "query text")->required();
  retrieve->add_option("-c,--corpus", retrieve_corpus,
                       "corpus JSONL or 'bundled'");
  retrieve->add_option("-k", retrieval_config.k, "top-k size");
  retrieve->add_option("--provider", provider, "surrogate|external");
  retrieve->add_option("--endpoint", retrieval_config.endpoint,
                       "external embedder endpoint");
  retrieve->add_option("--dim", retrieval_config.surrogate_dim,
                       "surrogate dimension");

  // architect
  std::string architect_tasks = "bundled";
  int statement_count = 3;
  std::string architect_out;
  CLI::App* architect =
      app.add_subcommand("architect", "build contradiction blueprints");
  architect->add_option("tasks", architect_tasks, "task JSONL or 'bundled'");
  architect->add_option("-n,--statements", statement_count,
                        "statements per blueprint");
  architect->add_option("-o,--output", architect_out, "output path")
      ->required();

  // weave
  std::string weave_tasks = "bundled";
  std::string weave_blueprints;
  std::string weave_out;
  CLI::App* weave_cmd =
      app.add_subcommand("weave", "render blueprints into passages");
  weave_cmd->add_option("tasks", weave_tasks, "task JSONL or 'bundled'");
  weave_cmd->add_option("blueprints", weave_blueprints, "blueprint JSONL")
      ->required();
  weave_cmd->add_option("-o,--output", weave_out, "output path")->required();

  // adapt
  AdaptArgs adapt_args;
  CLI::App* adapt_cmd =
      app.add_subcommand("adapt", "evolve a passage's style for cost");
  adapt_cmd->add_option("--task", adapt_args.task_id, "task id")->required();
  adapt_cmd->add_option("--passage", adapt_args.passage_path,
                        "passage JSONL (P0)")
      ->required();
  adapt_cmd->add_option("--blueprints", adapt_args.blueprint_path,
                        "blueprint JSONL")
      ->required();
  adapt_cmd->add_option("--tasks", adapt_args.tasks_path,
                        "task JSONL or 'bundled'");
  adapt_cmd->add_option("--corpus", adapt_args.corpus_path,
                        "corpus JSONL or 'bundled'");
  adapt_cmd->add_option("--model", adapt_args.model, "backend name");
  adapt_cmd->add_option("--seed", adapt_args.seed, "rng seed");
  adapt_cmd->add_option("--tau", adapt_args.config.tau,
                        "similarity threshold");
  adapt_cmd->add_option("--lambda", adapt_args.config.lambda,
                        "accuracy penalty");
  adapt_cmd->add_option("--generations", adapt_args.config.max_generations,
                        "max generations");
  adapt_cmd->add_option("-o,--output", adapt_args.out_dir,
                        "directory for champion + audit log");

  // run / ablate / report / defend
  std::string run_config;
  CLI::App* run_cmd = app.add_subcommand("run", "run a full experiment");
  run_cmd->add_option("config", run_config, "experiment config JSON")
      ->required();

  std::string ablate_config;
  std::vector<std::string> stages;
  CLI::App* ablate_cmd =
      app.add_subcommand("ablate", "compare noadv / p0 / pn conditions");
  ablate_cmd->add_option("config", ablate_config, "experiment config JSON")
      ->required();
  ablate_cmd->add_option("--stages", stages, "p0_only and/or full");

  std::string report_log;
  std::string report_format = "table";
  CLI::App* report_cmd =
      app.add_subcommand("report", "recompute metrics from a run log");
  report_cmd->add_option("log", report_log, "run log path or experiment dir")
      ->required();
  report_cmd->add_option("--format", report_format, "table|records");

  DefendArgs defend_args;
  CLI::App* defend_cmd =
      app.add_subcommand("defend", "evaluate a defense against the attack");
  defend_cmd
      ->add_option("config", defend_args.config_path,
                   "experiment config JSON")
      ->required();
  defend_cmd
      ->add_option("--kind", defend_args.kind, "ccot|cod|budget|trust")
      ->required();
  long long budget_value = 0;
  CLI::Option* budget_opt =
      defend_cmd->add_option("--budget", budget_value, "budget tokens B");
  double threshold_value = 0.0;
  CLI::Option* threshold_opt = defend_cmd->add_option(
      "--threshold", threshold_value, "trust score threshold");
  defend_cmd->add_flag("--strict", defend_args.strict,
                       "remove every meta-flagged document");

  // bundled / verify
  std::string bundled_out;
  CLI::App* bundled_cmd =
      app.add_subcommand("bundled", "export the bundled suite");
  bundled_cmd->add_option("-o,--output", bundled_out, "output directory")
      ->required();

  std::string verify_dir;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "re-hash the artifacts of an experiment");
  verify_cmd->add_option("dir", verify_dir, "experiment directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (corpus_validate->parsed()) {
      return cmd_corpus_validate(corpus_path);
    }
    if (corpus_inject->parsed()) {
      return cmd_corpus_inject(inject_base, inject_poisons, inject_out);
    }
    if (retrieve->parsed()) {
      retrieval_config.provider = provider == "external"
                                      ? EmbeddingProvider::external
                                      : EmbeddingProvider::surrogate;
      return cmd_retrieve(query, retrieve_corpus, retrieval_config);
    }
    if (architect->parsed()) {
      return cmd_architect(architect_tasks, statement_count, architect_out);
    }
    if (weave_cmd->parsed()) {
      return cmd_weave(weave_tasks, weave_blueprints, weave_out);
    }
    if (adapt_cmd->parsed()) {
      return cmd_adapt(adapt_args);
    }
    if (run_cmd->parsed()) {
      return cmd_run(run_config);
    }
    if (ablate_cmd->parsed()) {
      return cmd_ablate(ablate_config, stages);
    }
    if (report_cmd->parsed()) {
      return cmd_report(report_log, report_format);
    }
    if (defend_cmd->parsed()) {
      if (budget_opt->count() > 0) {
        defend_args.budget = budget_value;
      }
      if (threshold_opt->count() > 0) {
        defend_args.threshold = threshold_value;
      }
      return cmd_defend(defend_args);
    }
    if (bundled_cmd->parsed()) {
      return cmd_bundled_export(bundled_out);
    }
    if (verify_cmd->parsed()) {
      return cmd_verify(verify_dir);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const TransportError& e) {
    std::cerr << "transport error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
