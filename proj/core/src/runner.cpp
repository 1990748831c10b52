#include "forge/runner.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>
#include <thread>

#include "forge/bundled.hpp"
#include "forge/pipeline.hpp"

namespace forge {

namespace {

std::string iso_utc_now() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                utc.tm_year + 1900, utc.tm_mon + 1, utc.tm_mday, utc.tm_hour,
                utc.tm_min, utc.tm_sec);
  return std::string(buf);
}

// Run fn(i) for i in [0, n) across up to `workers` threads. Exceptions are
// rethrown on the caller thread after joining.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn) {
  const int thread_count =
      std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (thread_count == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(
      static_cast<std::size_t>(thread_count));
  for (int t = 0; t < thread_count; ++t) {
    pool.emplace_back([&, t] {
      try {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n) {
            break;
          }
          fn(i);
        }
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (std::thread& thread : pool) {
    thread.join();
  }
  for (const std::exception_ptr& error : errors) {
    if (error) {
      std::rethrow_exception(error);
    }
  }
}

SimulatorParams simulator_params_from_json(const nlohmann::json& value) {
  SimulatorParams params;
  if (auto it = value.find("base"); it != value.end()) {
    params.base = it->get<long long>();
  }
  if (auto it = value.find("per_context_token"); it != value.end()) {
    params.per_context_token = it->get<double>();
  }
  if (auto it = value.find("conflict_base"); it != value.end()) {
    params.conflict_base = it->get<long long>();
  }
  if (auto it = value.find("per_statement"); it != value.end()) {
    params.per_statement = it->get<long long>();
  }
  if (auto it = value.find("per_style_class"); it != value.end()) {
    params.per_style_class = it->get<long long>();
  }
  if (auto it = value.find("context_token_factor"); it != value.end()) {
    params.context_token_factor = it->get<double>();
  }
  if (auto it = value.find("budget_cap_factor"); it != value.end()) {
    params.budget_cap_factor = it->get<long long>();
  }
  if (auto it = value.find("concision_conflict_factor"); it != value.end()) {
    params.concision_conflict_factor = it->get<double>();
  }
  return params;
}

nlohmann::json simulator_params_to_json(const SimulatorParams& params) {
  nlohmann::json out;
  out["base"] = params.base;
  out["per_context_token"] = params.per_context_token;
  out["conflict_base"] = params.conflict_base;
  out["per_statement"] = params.per_statement;
  out["per_style_class"] = params.per_style_class;
  out["context_token_factor"] = params.context_token_factor;
  out["budget_cap_factor"] = params.budget_cap_factor;
  out["concision_conflict_factor"] = params.concision_conflict_factor;
  return out;
}

BackendConfig backend_from_json(const nlohmann::json& value) {
  BackendConfig backend;
  if (auto it = value.find("kind"); it != value.end()) {
    backend.kind = it->get<std::string>();
  }
  if (backend.kind == "simulator") {
    if (auto it = value.find("params"); it != value.end()) {
      backend.simulator = simulator_params_from_json(*it);
    }
  } else if (backend.kind == "http") {
    BackendDescriptor d;
    d.endpoint = value.at("endpoint").get<std::string>();
    d.model_name = value.value("model_name", std::string("default"));
    d.auth_env = value.value("auth_env", std::string());
    d.temperature = value.value("temperature", 0.0);
    d.max_tokens = value.value("max_tokens", 4096);
    d.reasoning_tokens_path = value.value(
        "reasoning_tokens_path", std::string("usage.reasoning_tokens"));
    d.answer_path =
        value.value("answer_path", std::string("choices.0.message.content"));
    d.max_attempts = value.value("max_attempts", 3);
    d.backoff_initial_ms = value.value("backoff_initial_ms", 100);
    backend.http = std::move(d);
  } else {
    throw ValidationError("unknown backend kind \"" + backend.kind + "\"");
  }
  return backend;
}

nlohmann::json backend_to_json(const BackendConfig& backend) {
  nlohmann::json out;
  out["kind"] = backend.kind;
  if (backend.kind == "simulator") {
    out["params"] = simulator_params_to_json(backend.simulator);
  } else {
    out["endpoint"] = backend.http.endpoint;
    out["model_name"] = backend.http.model_name;
    out["auth_env"] = backend.http.auth_env;
    out["temperature"] = backend.http.temperature;
    out["max_tokens"] = backend.http.max_tokens;
    out["reasoning_tokens_path"] = backend.http.reasoning_tokens_path;
    out["answer_path"] = backend.http.answer_path;
    out["max_attempts"] = backend.http.max_attempts;
    out["backoff_initial_ms"] = backend.http.backoff_initial_ms;
  }
  return out;
}

AdapterConfig adapter_from_json(const nlohmann::json& value) {
  AdapterConfig config;
  if (auto it = value.find("tau"); it != value.end()) {
    config.tau = it->get<double>();
  }
  if (auto it = value.find("lambda"); it != value.end()) {
    config.lambda = it->get<double>();
  }
  if (auto it = value.find("max_generations"); it != value.end()) {
    config.max_generations = it->get<int>();
  }
  if (auto it = value.find("subsets_per_generation"); it != value.end()) {
    config.subsets_per_generation = it->get<int>();
  }
  if (auto it = value.find("subset_size_max"); it != value.end()) {
    config.subset_size_max = it->get<int>();
  }
  if (auto it = value.find("epsilon"); it != value.end()) {
    config.epsilon = it->get<double>();
  }
  if (auto it = value.find("stabilization_window"); it != value.end()) {
    config.stabilization_window = it->get<int>();
  }
  if (auto it = value.find("stabilization_tol"); it != value.end()) {
    config.stabilization_tol = it->get<double>();
  }
  if (auto it = value.find("eta"); it != value.end()) {
    config.eta = it->get<double>();
  }
  if (auto it = value.find("utility_floor"); it != value.end()) {
    config.utility_floor = it->get<double>();
  }
  return config;
}

nlohmann::json adapter_to_json(const AdapterConfig& config) {
  nlohmann::json out;
  out["tau"] = config.tau;
  out["lambda"] = config.lambda;
  out["max_generations"] = config.max_generations;
  out["subsets_per_generation"] = config.subsets_per_generation;
  out["subset_size_max"] = config.subset_size_max;
  out["epsilon"] = config.epsilon;
  out["stabilization_window"] = config.stabilization_window;
  out["stabilization_tol"] = config.stabilization_tol;
  out["eta"] = config.eta;
  out["utility_floor"] = config.utility_floor;
  return out;
}

RetrievalConfig retrieval_from_json(const nlohmann::json& value) {
  RetrievalConfig config;
  if (auto it = value.find("k"); it != value.end()) {
    config.k = it->get<int>();
  }
  if (auto it = value.find("provider"); it != value.end()) {
    const std::string provider = it->get<std::string>();
    if (provider == "surrogate") {
      config.provider = EmbeddingProvider::surrogate;
    } else if (provider == "external") {
      config.provider = EmbeddingProvider::external;
    } else {
      throw ValidationError("unknown retrieval provider \"" + provider +
                            "\"");
    }
  }
  if (auto it = value.find("surrogate_dim"); it != value.end()) {
    config.surrogate_dim = it->get<std::size_t>();
  }
  if (auto it = value.find("endpoint"); it != value.end()) {
    config.endpoint = it->get<std::string>();
  }
  return config;
}

nlohmann::json retrieval_to_json(const RetrievalConfig& config) {
  nlohmann::json out;
  out["k"] = config.k;
  out["provider"] = config.provider == EmbeddingProvider::surrogate
                        ? "surrogate"
                        : "external";
  out["surrogate_dim"] = config.surrogate_dim;
  if (!config.endpoint.empty()) {
    out["endpoint"] = config.endpoint;
  }
  return out;
}

struct LoadedInputs {
  TaskSet tasks;
  Corpus corpus;
};

LoadedInputs load_inputs(const ExperimentConfig& config) {
  LoadedInputs inputs;
  inputs.tasks = config.task_file.empty() ? bundled_tasks()
                                          : load_tasks(config.task_file);
  inputs.corpus = config.corpus_file.empty() ? bundled_corpus()
                                             : load_corpus(config.corpus_file);
  if (inputs.tasks.empty()) {
    throw ValidationError("experiment has no tasks");
  }
  return inputs;
}

std::string poison_doc_id(const std::string& task_id) {
  return "poison-" + task_id;
}

nlohmann::json forge_audit_json(const TaskForgeResult& result) {
  nlohmann::json out = nlohmann::json::array();
  for (const AuditEntry& entry : result.audit) {
    nlohmann::json line = audit_entry_to_json(entry);
    line["task_id"] = result.task_id;
    out.push_back(std::move(line));
  }
  return out;
}

struct ArtifactWriter {
  std::filesystem::path dir;
  ExperimentManifest* manifest;

  void write(const std::string& name, const std::string& relative_path,
             const std::string& bytes) const {
    const std::filesystem::path full = dir / relative_path;
    write_text_file(full, bytes);
    (*manifest).artifacts[name] =
        ArtifactRef{relative_path, hash_hex(bytes)};
  }

  void write_records(const std::string& name,
                     const std::string& relative_path,
                     const std::vector<nlohmann::json>& records) const {
    std::ostringstream os;
    for (const nlohmann::json& record : records) {
      os << dump_sorted(record) << '\n';
    }
    write(name, relative_path, os.str());
  }
};

}  // namespace

std::string BackendConfig::label() const {
  if (kind == "simulator") {
    return "simulator";
  }
  return "http:" + http.model_name;
}

void ExperimentConfig::validate() const {
  if (!task_file.empty() && !std::filesystem::exists(task_file)) {
    throw ValidationError("task file does not exist: " + task_file.string());
  }
  if (!corpus_file.empty() && !std::filesystem::exists(corpus_file)) {
    throw ValidationError("corpus file does not exist: " +
                          corpus_file.string());
  }
  if (output_dir.empty()) {
    throw ValidationError("output_dir is required");
  }
  if (statement_count < 3) {
    throw ValidationError("statement_count must be at least 3");
  }
  if (workers < 1) {
    throw ValidationError("workers must be at least 1");
  }
  adapter.validate();
  std::set<std::string> defense_labels;
  for (const DefenseSpec& spec : defenses) {
    spec.validate();
    if (!defense_labels.insert(std::string(to_string(spec.kind))).second) {
      throw ValidationError("duplicate defense kind in config");
    }
  }
  if (retrieval.k <= 0) {
    throw ValidationError("retrieval k must be positive");
  }
}

ExperimentConfig config_from_json(const nlohmann::json& value) {
  ExperimentConfig config;
  if (auto it = value.find("tasks"); it != value.end()) {
    const std::string path = it->get<std::string>();
    if (path != "bundled") {
      config.task_file = path;
    }
  }
  if (auto it = value.find("corpus"); it != value.end()) {
    const std::string path = it->get<std::string>();
    if (path != "bundled") {
      config.corpus_file = path;
    }
  }
  if (auto it = value.find("output_dir"); it != value.end()) {
    config.output_dir = it->get<std::string>();
  }
  if (auto it = value.find("seed"); it != value.end()) {
    config.seed = it->get<std::uint64_t>();
  }
  if (auto it = value.find("statement_count"); it != value.end()) {
    config.statement_count = it->get<int>();
  }
  if (auto it = value.find("workers"); it != value.end()) {
    config.workers = it->get<int>();
  }
  if (auto it = value.find("backend"); it != value.end()) {
    config.backend = backend_from_json(*it);
  }
  if (auto it = value.find("extra_backends"); it != value.end()) {
    for (const nlohmann::json& entry : *it) {
      config.extra_backends.push_back(backend_from_json(entry));
    }
  }
  if (auto it = value.find("retrieval"); it != value.end()) {
    config.retrieval = retrieval_from_json(*it);
  }
  if (auto it = value.find("adapter"); it != value.end()) {
    config.adapter = adapter_from_json(*it);
  }
  if (auto it = value.find("defenses"); it != value.end()) {
    for (const nlohmann::json& entry : *it) {
      config.defenses.push_back(defense_spec_from_json(entry));
    }
  }
  return config;
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  nlohmann::json out;
  out["tasks"] =
      config.task_file.empty() ? "bundled" : config.task_file.string();
  out["corpus"] =
      config.corpus_file.empty() ? "bundled" : config.corpus_file.string();
  out["output_dir"] = config.output_dir.string();
  out["seed"] = config.seed;
  out["statement_count"] = config.statement_count;
  out["workers"] = config.workers;
  out["backend"] = backend_to_json(config.backend);
  if (!config.extra_backends.empty()) {
    nlohmann::json extras = nlohmann::json::array();
    for (const BackendConfig& backend : config.extra_backends) {
      extras.push_back(backend_to_json(backend));
    }
    out["extra_backends"] = extras;
  }
  out["retrieval"] = retrieval_to_json(config.retrieval);
  out["adapter"] = adapter_to_json(config.adapter);
  nlohmann::json defenses = nlohmann::json::array();
  for (const DefenseSpec& spec : config.defenses) {
    defenses.push_back(defense_spec_to_json(spec));
  }
  out["defenses"] = defenses;
  return out;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  ExperimentConfig config = config_from_json(value);
  config.validate();
  return config;
}

std::unique_ptr<ModelAdapter> make_backend(const BackendConfig& config,
                                           const TaskSet& tasks) {
  if (config.kind == "simulator") {
    return std::make_unique<SimulatorModel>(config.simulator, tasks);
  }
  if (config.kind == "http") {
    return std::make_unique<HttpModel>(config.http);
  }
  throw ValidationError("unknown backend kind \"" + config.kind + "\"");
}

nlohmann::json manifest_to_json(const ExperimentManifest& manifest) {
  nlohmann::json out;
  out["config"] = manifest.config_snapshot;
  nlohmann::json artifacts;
  for (const auto& [name, ref] : manifest.artifacts) {
    artifacts[name] = {{"path", ref.path}, {"hash", ref.hash}};
  }
  out["artifacts"] = artifacts;
  out["created_at"] = manifest.created_at;
  return out;
}

ExperimentManifest manifest_from_json(const nlohmann::json& value) {
  ExperimentManifest manifest;
  manifest.config_snapshot = value.at("config");
  for (const auto& [name, ref] : value.at("artifacts").items()) {
    manifest.artifacts[name] = ArtifactRef{
        ref.at("path").get<std::string>(), ref.at("hash").get<std::string>()};
  }
  manifest.created_at = value.at("created_at").get<std::string>();
  return manifest;
}

std::vector<TaskForgeResult> forge_poisons(const ExperimentConfig& config,
                                           const TaskSet& tasks,
                                           const Corpus& corpus,
                                           const Retriever& retriever,
                                           ModelAdapter& model,
                                           bool with_adapter) {
  std::vector<TaskForgeResult> results(tasks.size());
  parallel_for(tasks.size(), config.workers, [&](std::size_t i) {
    const Task& task = tasks.tasks[i];
    TaskForgeResult& result = results[i];
    result.task_id = task.id;
    try {
      Decomposition decomp = decompose(task);
      ContradictionBlueprint blueprint =
          build_blueprint(decomp, config.statement_count);
      blueprint.task_id = task.id;
      result.blueprint = blueprint;
      AdversarialPassage p0 = weave(blueprint, task);
      result.p0 = p0;
      if (with_adapter) {
        AdaptResult adapted = adapt(
            p0, blueprint, default_operator_library(), model, retriever,
            task, corpus, config.adapter, derive_seed(config.seed, task.id));
        result.adapted = std::move(adapted.champion);
        result.audit = std::move(adapted.audit);
      }
    } catch (const ValidationError& e) {
      result.error = e.what();
    } catch (const TransportError& e) {
      result.error = e.what();
    }
  });
  return results;
}

namespace {

struct RunOutcome {
  std::vector<RunRecord> clean;
  std::vector<RunRecord> poisoned;
  std::map<std::string, std::vector<RunRecord>> defended;  // by label
};

RunOutcome execute_runs(const ExperimentConfig& config, const TaskSet& tasks,
                        const Corpus& clean_corpus, const Corpus& corpus_mix,
                        const Retriever& retriever, ModelAdapter& model) {
  RunOutcome outcome;
  outcome.clean.resize(tasks.size());
  outcome.poisoned.resize(tasks.size());
  for (const DefenseSpec& spec : config.defenses) {
    outcome.defended[std::string(to_string(spec.kind))].resize(tasks.size());
  }
  parallel_for(tasks.size(), config.workers, [&](std::size_t i) {
    const Task& task = tasks.tasks[i];
    outcome.clean[i] =
        evaluate_task(task, clean_corpus, retriever, model, Condition::clean)
            .record;
    outcome.poisoned[i] = evaluate_task(task, corpus_mix, retriever, model,
                                        Condition::poisoned)
                              .record;
    for (const DefenseSpec& spec : config.defenses) {
      outcome.defended[std::string(to_string(spec.kind))][i] =
          evaluate_task(task, corpus_mix, retriever, model,
                        Condition::defended, &spec)
              .record;
    }
  });
  return outcome;
}

}  // namespace

ExperimentManifest run_experiment(const ExperimentConfig& config) {
  config.validate();
  LoadedInputs inputs = load_inputs(config);
  Retriever retriever(config.retrieval);
  std::unique_ptr<ModelAdapter> model =
      make_backend(config.backend, inputs.tasks);

  std::vector<TaskForgeResult> forged = forge_poisons(
      config, inputs.tasks, inputs.corpus, retriever, *model, true);

  std::vector<Document> poisons;
  std::vector<nlohmann::json> blueprint_records;
  std::vector<nlohmann::json> p0_records;
  std::vector<nlohmann::json> pn_records;
  std::vector<nlohmann::json> audit_records;
  std::vector<nlohmann::json> error_records;
  TaskSet usable;
  for (std::size_t i = 0; i < forged.size(); ++i) {
    const TaskForgeResult& result = forged[i];
    if (!result.error.empty()) {
      error_records.push_back(
          {{"task_id", result.task_id}, {"error", result.error}});
      warn("task " + result.task_id + " failed: " + result.error);
      continue;
    }
    usable.tasks.push_back(inputs.tasks.tasks[i]);
    blueprint_records.push_back(blueprint_to_json(*result.blueprint));
    p0_records.push_back(passage_to_json(*result.p0));
    pn_records.push_back(passage_to_json(*result.adapted));
    for (const nlohmann::json& line : forge_audit_json(result)) {
      audit_records.push_back(line);
    }
    poisons.push_back(
        result.adapted->to_document(poison_doc_id(result.task_id)));
  }
  if (usable.empty()) {
    throw ValidationError("every task failed during forging");
  }

  const Corpus corpus_mix = inject(inputs.corpus, poisons);
  RunOutcome outcome = execute_runs(config, usable, inputs.corpus,
                                    corpus_mix, retriever, *model);

  MetricsReport attack_report =
      compute_report(outcome.clean, outcome.poisoned);
  std::map<std::string, MetricsReport> defense_reports;
  for (const auto& [label, records] : outcome.defended) {
    defense_reports[label] = compute_report(outcome.clean, records);
  }

  ExperimentManifest manifest;
  manifest.config_snapshot = config_to_json(config);
  manifest.created_at = iso_utc_now();

  std::filesystem::create_directories(config.output_dir);
  ArtifactWriter writer{config.output_dir, &manifest};

  writer.write("config", "config.json",
               dump_sorted(manifest.config_snapshot) + "\n");
  writer.write_records("blueprints", "blueprints.jsonl", blueprint_records);
  writer.write_records("passages_p0", "passages_p0.jsonl", p0_records);
  writer.write_records("passages_pn", "passages_pn.jsonl", pn_records);
  writer.write_records("adapter_audit", "audit.jsonl", audit_records);

  {
    std::vector<nlohmann::json> corpus_records;
    corpus_records.reserve(corpus_mix.size());
    for (const Document& doc : corpus_mix.documents()) {
      corpus_records.push_back(document_to_json(doc));
    }
    writer.write_records("corpus_mix", "corpus_mix.jsonl", corpus_records);
  }

  {
    std::vector<nlohmann::json> run_records;
    for (const RunRecord& record : outcome.clean) {
      run_records.push_back(run_record_to_json(record));
    }
    for (const RunRecord& record : outcome.poisoned) {
      run_records.push_back(run_record_to_json(record));
    }
    for (const auto& [label, records] : outcome.defended) {
      for (const RunRecord& record : records) {
        run_records.push_back(run_record_to_json(record));
      }
    }
    writer.write_records("run_log", "run_log.jsonl", run_records);
  }

  {
    nlohmann::json report;
    report["attack"] = report_to_json(attack_report);
    nlohmann::json defended;
    for (const auto& [label, defense_report] : defense_reports) {
      defended[label] = report_to_json(defense_report);
    }
    report["defenses"] = defended;
    writer.write("report", "report.json", dump_sorted(report) + "\n");

    std::ostringstream rendered;
    rendered << "attack\n" << render_report(attack_report);
    for (const auto& [label, defense_report] : defense_reports) {
      rendered << "\ndefense: " << label << "\n"
               << render_report(defense_report);
    }
    writer.write("report_text", "report.txt", rendered.str());
  }

  if (!error_records.empty()) {
    writer.write_records("errors", "errors.jsonl", error_records);
  }

  write_text_file(config.output_dir / "manifest.json",
                  dump_sorted(manifest_to_json(manifest)) + "\n");
  return manifest;
}

bool verify_manifest(const std::filesystem::path& dir,
                     std::vector<std::string>* mismatches) {
  const std::filesystem::path manifest_path = dir / "manifest.json";
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(read_text_file(manifest_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(manifest_path.string() + ": " + e.what());
  }
  ExperimentManifest manifest = manifest_from_json(value);
  bool ok = true;
  for (const auto& [name, ref] : manifest.artifacts) {
    const std::filesystem::path artifact = dir / ref.path;
    std::string note;
    if (!std::filesystem::exists(artifact)) {
      note = name + ": missing file " + ref.path;
    } else if (hash_hex(read_text_file(artifact)) != ref.hash) {
      note = name + ": hash mismatch for " + ref.path;
    }
    if (!note.empty()) {
      ok = false;
      if (mismatches != nullptr) {
        mismatches->push_back(note);
      }
    }
  }
  return ok;
}

AblationReport ablation(const ExperimentConfig& config,
                        const std::set<AblationStage>& stages) {
  config.validate();
  if (stages.empty()) {
    throw ValidationError("ablation requires at least one stage");
  }
  LoadedInputs inputs = load_inputs(config);
  Retriever retriever(config.retrieval);

  const bool want_full = stages.count(AblationStage::full) > 0;

  std::vector<BackendConfig> backends;
  backends.push_back(config.backend);
  backends.insert(backends.end(), config.extra_backends.begin(),
                  config.extra_backends.end());

  AblationReport report;
  for (const BackendConfig& backend_config : backends) {
    std::unique_ptr<ModelAdapter> model =
        make_backend(backend_config, inputs.tasks);
    std::vector<TaskForgeResult> forged =
        forge_poisons(config, inputs.tasks, inputs.corpus, retriever, *model,
                      want_full);

    TaskSet usable;
    std::vector<Document> p0_docs;
    std::vector<Document> pn_docs;
    for (std::size_t i = 0; i < forged.size(); ++i) {
      const TaskForgeResult& result = forged[i];
      if (!result.error.empty()) {
        warn("task " + result.task_id + " failed: " + result.error);
        continue;
      }
      usable.tasks.push_back(inputs.tasks.tasks[i]);
      p0_docs.push_back(
          result.p0->to_document(poison_doc_id(result.task_id)));
      if (want_full) {
        pn_docs.push_back(
            result.adapted->to_document(poison_doc_id(result.task_id)));
      }
    }
    if (usable.empty()) {
      throw ValidationError("every task failed during forging");
    }

    struct ConditionRun {
      std::string condition;
      const Corpus* corpus;
    };
    const Corpus p0_mix = inject(inputs.corpus, p0_docs);
    Corpus pn_mix;
    std::vector<ConditionRun> runs = {{"noadv", &inputs.corpus},
                                      {"p0", &p0_mix}};
    if (want_full) {
      pn_mix = inject(inputs.corpus, pn_docs);
      runs.push_back({"pn", &pn_mix});
    }

    for (const ConditionRun& run : runs) {
      std::vector<RunRecord> records(usable.size());
      parallel_for(usable.size(), config.workers, [&](std::size_t i) {
        const Condition condition = run.condition == "noadv"
                                        ? Condition::clean
                                        : Condition::poisoned;
        records[i] = evaluate_task(usable.tasks[i], *run.corpus, retriever,
                                   *model, condition)
                         .record;
      });
      AblationRow row;
      row.backend = backend_config.label();
      row.condition = run.condition;
      double rt_sum = 0.0;
      for (const RunRecord& record : records) {
        rt_sum += static_cast<double>(record.rt);
      }
      row.mean_rt = rt_sum / static_cast<double>(records.size());
      row.acc = accuracy(records);
      report.rows.push_back(row);
    }
  }
  return report;
}

std::string render_ablation(const AblationReport& report) {
  std::ostringstream os;
  os << "backend          condition  mean_rt      acc\n";
  for (const AblationRow& row : report.rows) {
    char line[128];
    std::snprintf(line, sizeof(line), "%-16s %-9s  %-11.2f  %.2f\n",
                  row.backend.c_str(), row.condition.c_str(), row.mean_rt,
                  row.acc);
    os << line;
  }
  return os.str();
}

nlohmann::json ablation_to_json(const AblationReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const AblationRow& row : report.rows) {
    rows.push_back({{"backend", row.backend},
                    {"condition", row.condition},
                    {"mean_rt", row.mean_rt},
                    {"acc", row.acc}});
  }
  return nlohmann::json{{"rows", rows}};
}

}  // namespace forge
