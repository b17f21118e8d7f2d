// tide: command-line front end over the shared-library C API.
//
// Exit codes: 0 success, 1 usage/config error, 2 runtime failure.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tide/tide.h"

namespace {

struct SessionDeleter {
  void operator()(tide_session* s) const { tide_session_close(s); }
};
using SessionPtr = std::unique_ptr<tide_session, SessionDeleter>;

struct CommonOpts {
  std::string config;
  std::string out_dir;
  std::string dataset_dir;
  long long seed = -1;
  std::vector<std::string> ablate;
};

int rc_to_exit(tide_rc rc) {
  switch (rc) {
    case TIDE_OK:
      return 0;
    case TIDE_ERR_INVALID_ARG:
    case TIDE_ERR_CONFIG:
      return 1;
    default:
      return 2;
  }
}

int fail(const SessionPtr& session, tide_rc rc) {
  std::fprintf(stderr, "error: %s\n",
               session ? tide_session_last_error(session.get())
                       : "session setup failed");
  return rc_to_exit(rc);
}

SessionPtr open_session(const CommonOpts& opts, tide_rc& rc) {
  tide_session* raw = nullptr;
  rc = tide_session_open(opts.config.empty() ? nullptr : opts.config.c_str(),
                         &raw);
  SessionPtr session(raw);
  if (rc != TIDE_OK) return session;

  auto set = [&](const char* key, const std::string& value) {
    if (rc == TIDE_OK && !value.empty()) {
      rc = tide_session_set(session.get(), key, value.c_str());
    }
  };
  if (opts.seed >= 0) set("seed", std::to_string(opts.seed));
  set("out_dir", opts.out_dir);
  set("dataset_dir", opts.dataset_dir);
  if (!opts.ablate.empty()) {
    std::string joined;
    for (const auto& a : opts.ablate) {
      if (!joined.empty()) joined += ",";
      joined += a;
    }
    set("ablate", joined);
  }
  return session;
}

void print_summary(const char* summary) {
  if (summary) std::printf("%s\n", summary);
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required) {
  auto* c = cmd->add_option("--config", opts.config,
                            "JSON run configuration file");
  if (config_required) c->required();
  cmd->add_option("--out", opts.out_dir, "output directory override");
  cmd->add_option("--dataset", opts.dataset_dir,
                  "dataset directory override");
  cmd->add_option("--seed", opts.seed, "seed override");
  cmd->add_option("--ablate", opts.ablate,
                  "zero a loss weight (k, csa or lcc); repeatable")
      ->check(CLI::IsMember({"k", "csa", "lcc"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TIDE: concept-grounded single-source domain generalization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tide_version()));

  CommonOpts opts;
  bool with_correction = false;
  std::string sample_ids;
  std::string split = "test";
  std::string traces_path;

  auto* generate = app.add_subcommand("generate",
                                      "write the synthetic benchmark");
  add_common(generate, opts, false);

  auto* annotate = app.add_subcommand(
      "annotate", "transfer concept masks from per-class exemplars");
  add_common(annotate, opts, false);

  auto* discover = app.add_subcommand(
      "discover", "train the auxiliary classifier and pick important concepts");
  add_common(discover, opts, false);

  auto* train = app.add_subcommand("train", "train the model");
  add_common(train, opts, false);

  auto* evaluate =
      app.add_subcommand("evaluate", "evaluate on the target domains");
  add_common(evaluate, opts, false);
  evaluate->add_flag("--correct", with_correction,
                     "apply iterative test-time correction");

  auto* correct = app.add_subcommand(
      "correct", "run test-time correction and write per-sample traces");
  add_common(correct, opts, false);

  auto* overlay =
      app.add_subcommand("overlay", "write saliency overlays for samples");
  add_common(overlay, opts, false);
  overlay->add_option("--samples", sample_ids,
                      "comma-separated sample ids")
      ->required();

  auto* export_features = app.add_subcommand(
      "export-features", "write pooled concept features as CSV");
  add_common(export_features, opts, false);
  export_features->add_option("--split", split, "dataset split (train|test)");

  auto* report =
      app.add_subcommand("report", "summarize correction traces");
  add_common(report, opts, false);
  report->add_option("--traces", traces_path, "traces.jsonl path");

  CLI11_PARSE(app, argc, argv);

  tide_rc rc = TIDE_OK;
  SessionPtr session = open_session(opts, rc);
  if (rc != TIDE_OK) return fail(session, rc);

  char* summary = nullptr;
  if (generate->parsed()) {
    rc = tide_run_generate(session.get(), &summary);
  } else if (annotate->parsed()) {
    rc = tide_run_annotate(session.get(), &summary);
  } else if (discover->parsed()) {
    rc = tide_run_discover(session.get(), &summary);
  } else if (train->parsed()) {
    rc = tide_run_train(session.get(), &summary);
  } else if (evaluate->parsed()) {
    rc = tide_run_evaluate(session.get(), with_correction ? 1 : 0, &summary);
  } else if (correct->parsed()) {
    rc = tide_run_correct(session.get(), &summary);
  } else if (overlay->parsed()) {
    rc = tide_run_overlay(session.get(), sample_ids.c_str(), &summary);
  } else if (export_features->parsed()) {
    rc = tide_run_export_features(session.get(), split.c_str(), &summary);
  } else if (report->parsed()) {
    rc = tide_run_report(session.get(),
                         traces_path.empty() ? nullptr : traces_path.c_str(),
                         &summary);
  }

  if (rc != TIDE_OK) {
    tide_string_free(summary);
    return fail(session, rc);
  }
  print_summary(summary);
  tide_string_free(summary);
  return 0;
}
