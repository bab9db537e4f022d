// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vqinit/dataset.hpp"
#include "vqinit/error.hpp"
#include "vqinit/eval.hpp"
#include "vqinit/selftest.hpp"

namespace vqinit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outputs {
  std::vector<std::string> files;
  void add(const fs::path& p) { files.push_back(p.generic_string()); }
};

fs::path out_dir(const RunConfig& rc) {
  return rc.output_dir.empty() ? fs::path(".") : fs::path(rc.output_dir);
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) fail(ErrorKind::kInvalidArgument, std::string(what) + " path is required");
  if (!fs::is_regular_file(path)) fail(ErrorKind::kIo, std::string(what) + " not found: " + path);
}

json run_config_json(const RunConfig& rc) {
  const auto& o = rc.optimizer;
  const auto& d = rc.diffusion;
  const auto& a = rc.arch;
  return json{
      {"family", rc.family},
      {"records", rc.records_path},
      {"split", rc.split_path},
      {"checkpoint", rc.checkpoint_path},
      {"count", rc.count},
      {"seeds",
       {{"dataset", rc.dataset_seed},
        {"split", rc.split_seed},
        {"train", rc.train_seed},
        {"eval", rc.eval_seed}}},
      {"split_ratio", rc.split_ratio},
      {"optimizer",
       {{"learning_rate", o.learning_rate},
        {"beta1", o.adam.beta1},
        {"beta2", o.adam.beta2},
        {"epsilon", o.adam.epsilon},
        {"max_steps", o.max_steps},
        {"window", o.window},
        {"tolerance", o.tolerance}}},
      {"diffusion",
       {{"timesteps", d.timesteps},
        {"beta_start", d.beta_start},
        {"beta_end", d.beta_end},
        {"guidance", d.guidance},
        {"p_guidance", d.p_guidance},
        {"epochs", d.epochs},
        {"learning_rate", d.learning_rate},
        {"batch_size", d.batch_size}}},
      {"arch",
       {{"hidden", a.hidden},
        {"blocks", a.blocks},
        {"time_dim", a.time_dim},
        {"cond_dim", a.cond_dim}}},
  };
}

void write_provenance(const std::string& command, const RunConfig& rc, const Outputs& outputs) {
  json j;
  j["command"] = command;
  j["generator_version"] = kGeneratorVersion;
  j["schema_versions"] = {{"records", kRecordSchemaVersion},
                          {"manifest", kManifestSchemaVersion},
                          {"checkpoint", kCheckpointSchemaVersion},
                          {"metrics", kMetricsSchemaVersion}};
  j["config"] = run_config_json(rc);
  j["outputs"] = outputs.files;
  const fs::path path = out_dir(rc) / ("provenance_" + command + ".json");
  fs::create_directories(out_dir(rc));
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorKind::kIo, "cannot write " + path.string());
  f << j.dump(2) << "\n";
}

std::vector<DatasetRecord> records_for(const RunConfig& rc, bool train_side) {
  require_file(rc.records_path, "records file");
  auto records = load_records(rc.records_path);
  if (records.empty()) fail(ErrorKind::kInvalidArgument, "records file is empty");
  if (!rc.split_path.empty()) {
    require_file(rc.split_path, "split file");
    const SplitManifest split = load_split(rc.split_path);
    records = select_records(records, train_side ? split.train_ids : split.test_ids);
  }
  return records;
}

void add_optimizer_flags(CLI::App* sub, RunConfig& rc) {
  sub->add_option("--opt-lr", rc.optimizer.learning_rate, "Adam learning rate for ansatz angles")
      ->capture_default_str();
  sub->add_option("--max-steps", rc.optimizer.max_steps, "Optimizer steps per instance")
      ->capture_default_str();
  sub->add_option("--window", rc.optimizer.window, "Convergence window")->capture_default_str();
  sub->add_option("--tolerance", rc.optimizer.tolerance, "Convergence tolerance")
      ->capture_default_str();
}

void add_diffusion_flags(CLI::App* sub, RunConfig& rc) {
  auto& d = rc.diffusion;
  sub->add_option("--epochs", d.epochs)->capture_default_str();
  sub->add_option("--lr", d.learning_rate, "Peak learning rate")->capture_default_str();
  sub->add_option("--T,--timesteps", d.timesteps, "Diffusion steps")->capture_default_str();
  sub->add_option("--beta-start", d.beta_start)->capture_default_str();
  sub->add_option("--beta-end", d.beta_end)->capture_default_str();
  sub->add_option("--g,--guidance", d.guidance, "Guidance scale")->capture_default_str();
  sub->add_option("--p-guidance", d.p_guidance, "Condition dropout probability")
      ->capture_default_str();
  sub->add_option("--batch-size", d.batch_size)->capture_default_str();
}

void add_arch_flags(CLI::App* sub, RunConfig& rc) {
  sub->add_option("--hidden", rc.arch.hidden)->capture_default_str();
  sub->add_option("--blocks", rc.arch.blocks)->capture_default_str();
  sub->add_option("--time-dim", rc.arch.time_dim)->capture_default_str();
  sub->add_option("--cond-dim", rc.arch.cond_dim)->capture_default_str();
}

Outputs cmd_gen_dataset(RunConfig& rc, bool full_preset, bool count_given, std::ostream& out) {
  const TaskFamily family = parse_family(rc.family);
  if (full_preset && !count_given) rc.count = full_scale_count(family);
  rc.optimizer.validate();
  const auto records =
      generate_dataset(family, rc.count, rc.dataset_seed, rc.optimizer, rc.workers);
  const std::string stem(family_id(family));
  const fs::path rec_path =
      rc.records_path.empty() ? out_dir(rc) / (stem + "_records.jsonl") : fs::path(rc.records_path);
  save_records(rec_path, records);
  DatasetManifest m;
  m.family = family;
  m.count = rc.count;
  m.master_seed = rc.dataset_seed;
  m.optimizer = rc.optimizer;
  const fs::path man_path = out_dir(rc) / (stem + "_manifest.json");
  save_manifest(man_path, m);
  out << "wrote " << records.size() << " records to " << rec_path.string() << "\n";
  Outputs o;
  o.add(rec_path);
  o.add(man_path);
  return o;
}

Outputs cmd_split(RunConfig& rc, std::ostream& out) {
  require_file(rc.records_path, "records file");
  const auto records = load_records(rc.records_path);
  const SplitManifest split = split_dataset(records, rc.split_ratio, rc.split_seed);
  const fs::path path =
      rc.split_path.empty() ? out_dir(rc) / "split.json" : fs::path(rc.split_path);
  save_split(path, split);
  out << "split " << records.size() << " records: " << split.train_ids.size() << " train, "
      << split.test_ids.size() << " test\n";
  Outputs o;
  o.add(path);
  return o;
}

Outputs cmd_train(RunConfig& rc, bool family_given, std::ostream& out) {
  const auto train = records_for(rc, true);
  const TaskFamily family = train.front().family;
  if (family_given && parse_family(rc.family) != family) {
    fail(ErrorKind::kInvalidArgument, "records are " + std::string(family_id(family)) +
                                          ", --family says " + rc.family);
  }
  rc.diffusion.validate();
  DenoiserArch arch = default_arch(family, rc.diffusion.timesteps);
  arch.hidden = rc.arch.hidden;
  arch.blocks = rc.arch.blocks;
  arch.time_dim = rc.arch.time_dim;
  arch.cond_dim = rc.arch.cond_dim;
  arch.validate();

  const fs::path hist_path = out_dir(rc) / "loss_history.csv";
  auto write_history = [&](const std::vector<double>& h) {
    std::string text = "epoch,loss\n";
    for (std::size_t i = 0; i < h.size(); ++i) {
      text += std::to_string(i) + "," + format_double(h[i]) + "\n";
    }
    fs::create_directories(out_dir(rc));
    std::ofstream f(hist_path, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorKind::kIo, "cannot write " + hist_path.string());
    f << text;
  };

  TrainResult result = [&] {
    try {
      return train_model(train, rc.diffusion, arch, rc.train_seed, rc.workers);
    } catch (const TrainingDiverged& e) {
      write_history(e.history());
      throw;
    }
  }();
  write_history(result.loss_history);

  Checkpoint ckpt;
  ckpt.family = family;
  ckpt.config = rc.diffusion;
  ckpt.arch = arch;
  ckpt.seed = rc.train_seed;
  ckpt.weights.assign(result.model.params().begin(), result.model.params().end());
  ckpt.loss_history = result.loss_history;
  const fs::path ck_path = rc.checkpoint_path.empty() ? out_dir(rc) / "checkpoint.json"
                                                      : fs::path(rc.checkpoint_path);
  save_checkpoint(ck_path, ckpt);
  out << "trained " << rc.diffusion.epochs << " epochs on " << train.size()
      << " records, final loss " << format_double(result.loss_history.back()) << "\n";
  Outputs o;
  o.add(ck_path);
  o.add(hist_path);
  return o;
}

Outputs cmd_sample(RunConfig& rc, const std::vector<double>& params, std::uint64_t task_seed,
                   std::ostream& out) {
  require_file(rc.checkpoint_path, "checkpoint");
  const Checkpoint ckpt = load_checkpoint(rc.checkpoint_path);
  const std::vector<double> p =
      params.empty() && ckpt.family != TaskFamily::RANDOM_VQE ? default_task_params(ckpt.family)
                                                              : params;
  const TaskInstance task = build_task(ckpt.family, p, task_seed);
  const Denoiser model = ckpt.model();
  const NoiseSchedule sched = linear_schedule(ckpt.config);
  Rng rng(rc.eval_seed);
  const ParamGrid grid = sample_parameters(model, empty_grid(task.layout),
                                           conditioning_features(task), sched,
                                           ckpt.config.guidance, rng);
  const ParamVector theta = decode_sample(task.layout, grid);
  const double loss = task_loss(task, theta);

  json j;
  j["family"] = std::string(family_id(ckpt.family));
  j["task_params"] = task.params;
  j["task_seed"] = task_seed;
  j["prompt"] = task.prompt;
  j["sample_seed"] = rc.eval_seed;
  j["theta"] = theta;
  j["initial_loss"] = loss;
  const fs::path path = out_dir(rc) / "sample.json";
  fs::create_directories(out_dir(rc));
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorKind::kIo, "cannot write " + path.string());
  f << j.dump(2) << "\n";

  out << "theta =";
  for (double v : theta) out << " " << format_double(v);
  out << "\ninitial loss = " << format_double(loss) << "\n";
  Outputs o;
  o.add(path);
  return o;
}

Outputs cmd_eval(RunConfig& rc, const std::string& scheme, std::ostream& out) {
  const auto test = records_for(rc, false);
  Initializer init;
  if (scheme == "random") {
    init = random_initializer(rc.eval_seed);
  } else {
    require_file(rc.checkpoint_path, "checkpoint");
    const Checkpoint ckpt = load_checkpoint(rc.checkpoint_path);
    if (ckpt.family != test.front().family) {
      fail(ErrorKind::kInvalidArgument, "checkpoint family does not match the test records");
    }
    init = model_initializer(ckpt, rc.eval_seed);
  }
  const EvalMetrics m = evaluate_initializer(test, scheme, init, rc.optimizer, rc.workers);
  const fs::path path = out_dir(rc) / ("metrics_" + scheme + ".json");
  save_metrics(path, m);
  out << scheme << ": " << test.size() << " instances, mean initial loss "
      << format_double(m.mean_initial_loss) << ", mean convergence steps "
      << format_double(m.mean_convergence_steps) << "\n";
  Outputs o;
  o.add(path);
  return o;
}

Outputs cmd_compare(RunConfig& rc, const std::string& a_path, const std::string& b_path,
                    std::ostream& out) {
  require_file(a_path, "metrics file");
  require_file(b_path, "metrics file");
  const EvalMetrics a = load_metrics(a_path);
  const EvalMetrics b = load_metrics(b_path);
  ComparisonReport report;
  report.rows.push_back(compare_schemes(a, b));
  fs::create_directories(out_dir(rc));
  const auto files = emit_report(out_dir(rc), report, {a, b});
  const auto& r = report.rows.front();
  out << std::string(family_id(r.family)) << ": initial loss " << format_double(r.initial_loss_a)
      << " -> " << format_double(r.initial_loss_b) << " (delta "
      << format_double(r.delta_initial_loss) << "), steps " << format_double(r.steps_a) << " -> "
      << format_double(r.steps_b) << " (" << format_double(r.delta_steps_pct) << "%)\n";
  Outputs o;
  for (const auto& f : files) o.add(f);
  return o;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo: return kExitIo;
    case ErrorKind::kFormat: return kExitFormat;
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kOutOfRange: return kExitConfig;
    case ErrorKind::kNumerical:
    case ErrorKind::kInternal: return kExitRuntime;
  }
  return kExitRuntime;
}

std::string one_line(std::string s) {
  for (auto& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  CLI::App app{"Diffusion-model initializer for variational quantum circuits", "vqinit"};
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.set_config("--config", "", "INI file with one [command] section per command");
  app.add_option("--workers", rc.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--output-dir", rc.output_dir, "Directory for outputs and provenance")
      ->envname("VQINIT_OUTPUT_DIR");
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-dataset", "Generate optimized-parameter records");
  bool full_preset = false;
  std::string preset = "desk";
  gen->add_option("--family", rc.family, "xyz, fh, tfi, qpulse or random_vqe")
      ->capture_default_str();
  auto* n_opt = gen->add_option("--n", rc.count, "Number of instances");
  gen->add_option("--preset", preset, "desk or full instance count")
      ->check(CLI::IsMember({"desk", "full"}));
  gen->add_option("--seed", rc.dataset_seed, "Master seed")->capture_default_str();
  gen->add_option("--out", rc.records_path, "Records file");
  add_optimizer_flags(gen, rc);

  auto* split = app.add_subcommand("split", "Split records into train and test ids");
  split->add_option("--records", rc.records_path)->required();
  split->add_option("--ratio", rc.split_ratio)->capture_default_str();
  split->add_option("--seed", rc.split_seed)->capture_default_str();
  split->add_option("--out", rc.split_path, "Split file");

  auto* train = app.add_subcommand("train", "Train the noise-prediction model");
  auto* train_family = train->add_option("--family", rc.family, "Expected family of the records");
  train->add_option("--records", rc.records_path)->required();
  train->add_option("--split", rc.split_path, "Use the train ids of this split");
  train->add_option("--seed", rc.train_seed)->capture_default_str();
  train->add_option("--out", rc.checkpoint_path, "Checkpoint file");
  add_diffusion_flags(train, rc);
  add_arch_flags(train, rc);

  auto* sample = app.add_subcommand("sample", "Sample initial angles for one task");
  std::vector<double> task_params;
  std::uint64_t task_seed = 0;
  sample->add_option("--checkpoint", rc.checkpoint_path)->required();
  sample->add_option("--params", task_params, "Comma-separated task parameters")
      ->delimiter(',');
  sample->add_option("--task-seed", task_seed)->capture_default_str();
  sample->add_option("--seed", rc.eval_seed, "Sampling seed")->capture_default_str();

  auto* eval = app.add_subcommand("eval", "Evaluate an initializer on test records");
  std::string scheme = "random";
  eval->add_option("--records", rc.records_path)->required();
  eval->add_option("--split", rc.split_path, "Use the test ids of this split");
  eval->add_option("--scheme", scheme)->check(CLI::IsMember({"random", "diffq"}))
      ->capture_default_str();
  eval->add_option("--checkpoint", rc.checkpoint_path);
  eval->add_option("--seed", rc.eval_seed)->capture_default_str();
  add_optimizer_flags(eval, rc);

  auto* compare = app.add_subcommand("compare", "Compare two metric files");
  std::string a_path;
  std::string b_path;
  compare->add_option("--a", a_path, "Baseline metrics")->required();
  compare->add_option("--b", b_path, "Candidate metrics")->required();

  auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant checks");
  std::uint64_t selftest_seed = 0x5e1f;
  selftest->add_option("--seed", selftest_seed)->capture_default_str();

  std::vector<std::string> argv_store{"vqinit"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::FileError& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return kExitIo;
  } catch (const CLI::ConfigError& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return kExitConfig;
  } catch (const CLI::ValidationError& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return kExitConfig;
  } catch (const CLI::ParseError& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return kExitUsage;
  }

  try {
    Outputs outputs;
    std::string name;
    if (gen->parsed()) {
      name = "gen-dataset";
      full_preset = preset == "full";
      outputs = cmd_gen_dataset(rc, full_preset, n_opt->count() > 0, out);
    } else if (split->parsed()) {
      name = "split";
      outputs = cmd_split(rc, out);
    } else if (train->parsed()) {
      name = "train";
      outputs = cmd_train(rc, train_family->count() > 0, out);
    } else if (sample->parsed()) {
      name = "sample";
      outputs = cmd_sample(rc, task_params, task_seed, out);
    } else if (eval->parsed()) {
      name = "eval";
      outputs = cmd_eval(rc, scheme, out);
    } else if (compare->parsed()) {
      name = "compare";
      outputs = cmd_compare(rc, a_path, b_path, out);
    } else if (selftest->parsed()) {
      name = "selftest";
      const auto results = run_selftest(selftest_seed);
      bool ok = true;
      for (const auto& r : results) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name;
        if (!r.detail.empty()) out << ": " << r.detail;
        out << "\n";
        ok = ok && r.passed;
      }
      write_provenance(name, rc, outputs);
      if (!ok) {
        err << "error: selftest failed\n";
        return kExitRuntime;
      }
      return kExitOk;
    }
    write_provenance(name, rc, outputs);
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return kExitRuntime;
  }
}

}  // namespace vqinit::cli
