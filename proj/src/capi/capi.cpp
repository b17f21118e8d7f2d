#include "tide/tide.h"

#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "pipeline/stages.hpp"

struct tide_session {
  tide::pipeline::RunConfig cfg;
  std::string last_error;
};

namespace {

tide_rc map_error(tide::ErrorCode code) {
  using tide::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidInput:
    case ErrorCode::kInvalidLabel:
    case ErrorCode::kUnknownClass:
      return TIDE_ERR_INVALID_ARG;
    case ErrorCode::kInvalidConfig:
      return TIDE_ERR_CONFIG;
    case ErrorCode::kIo:
      return TIDE_ERR_IO;
    case ErrorCode::kCorruptDataset:
      return TIDE_ERR_CORRUPT_DATASET;
    case ErrorCode::kGeneration:
    case ErrorCode::kTripletExhausted:
      return TIDE_ERR_GENERATION;
    case ErrorCode::kProvider:
      return TIDE_ERR_PROVIDER;
    default:
      return TIDE_ERR_RUNTIME;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) {
    std::memcpy(out, s.c_str(), s.size() + 1);
  }
  return out;
}

template <typename Fn>
tide_rc guarded(tide_session* session, char** out_json, Fn&& fn) {
  if (!session) return TIDE_ERR_INVALID_ARG;
  session->last_error.clear();
  try {
    nlohmann::json summary = fn();
    if (out_json) {
      *out_json = dup_string(summary.dump());
    }
    return TIDE_OK;
  } catch (const tide::Error& e) {
    session->last_error = e.what();
    return map_error(e.code());
  } catch (const std::exception& e) {
    session->last_error = e.what();
    return TIDE_ERR_UNKNOWN;
  }
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

extern "C" {

const char* tide_version(void) { return "1.0.0"; }

tide_rc tide_session_open(const char* config_path_or_null,
                          tide_session** out_session) {
  if (!out_session) return TIDE_ERR_INVALID_ARG;
  *out_session = nullptr;
  auto session = new (std::nothrow) tide_session();
  if (!session) return TIDE_ERR_UNKNOWN;
  try {
    if (config_path_or_null && *config_path_or_null) {
      session->cfg = tide::pipeline::RunConfig::load(config_path_or_null);
    } else {
      session->cfg = tide::pipeline::RunConfig::defaults();
      session->cfg.validate();
    }
  } catch (const tide::Error& e) {
    delete session;
    return map_error(e.code());
  } catch (const std::exception&) {
    delete session;
    return TIDE_ERR_UNKNOWN;
  }
  *out_session = session;
  return TIDE_OK;
}

void tide_session_close(tide_session* session) { delete session; }

const char* tide_session_last_error(const tide_session* session) {
  if (!session) return "null session";
  return session->last_error.c_str();
}

tide_rc tide_session_set(tide_session* session, const char* key,
                         const char* value) {
  if (!session || !key || !value) return TIDE_ERR_INVALID_ARG;
  return guarded(session, nullptr, [&]() -> nlohmann::json {
    const std::string k = key;
    const std::string v = value;
    if (k == "seed") {
      const std::uint64_t seed = std::stoull(v);
      session->cfg.seed = seed;
      session->cfg.benchmark.seed = seed;
      session->cfg.train.seed = seed;
      session->cfg.discovery_train.seed = seed ^ 0x444953435256ull;
    } else if (k == "out_dir") {
      session->cfg.out_dir = v;
    } else if (k == "dataset_dir") {
      session->cfg.dataset_dir = v;
    } else if (k == "ablate") {
      tide::pipeline::apply_ablations(session->cfg, split_csv(v));
    } else if (k == "split") {
      session->cfg.eval_split = v;
    } else if (k == "tau") {
      session->cfg.tau = std::stod(v);
    } else if (k == "delta") {
      session->cfg.correction.delta = std::stod(v);
    } else {
      throw tide::Error(tide::ErrorCode::kInvalidConfig,
                        "unknown option '" + k + "'");
    }
    session->cfg.validate();
    return nlohmann::json{{"set", k}};
  });
}

tide_rc tide_run_generate(tide_session* session, char** out_summary_json) {
  return guarded(session, out_summary_json,
                 [&] { return tide::pipeline::run_generate(session->cfg); });
}

tide_rc tide_run_annotate(tide_session* session, char** out_summary_json) {
  return guarded(session, out_summary_json,
                 [&] { return tide::pipeline::run_annotate(session->cfg); });
}

tide_rc tide_run_discover(tide_session* session, char** out_summary_json) {
  return guarded(session, out_summary_json,
                 [&] { return tide::pipeline::run_discover(session->cfg); });
}

tide_rc tide_run_train(tide_session* session, char** out_summary_json) {
  return guarded(session, out_summary_json,
                 [&] { return tide::pipeline::run_train(session->cfg); });
}

tide_rc tide_run_evaluate(tide_session* session, int with_correction,
                          char** out_report_json) {
  return guarded(session, out_report_json, [&] {
    return tide::pipeline::run_evaluate(session->cfg, with_correction != 0);
  });
}

tide_rc tide_run_correct(tide_session* session, char** out_summary_json) {
  return guarded(session, out_summary_json,
                 [&] { return tide::pipeline::run_correct(session->cfg); });
}

tide_rc tide_run_overlay(tide_session* session, const char* sample_ids,
                         char** out_summary_json) {
  if (!sample_ids) return TIDE_ERR_INVALID_ARG;
  return guarded(session, out_summary_json, [&] {
    return tide::pipeline::run_overlay(session->cfg, split_csv(sample_ids));
  });
}

tide_rc tide_run_export_features(tide_session* session, const char* split,
                                 char** out_summary_json) {
  return guarded(session, out_summary_json, [&] {
    const std::string s = split && *split ? split : session->cfg.eval_split;
    return tide::pipeline::run_export_features(session->cfg, s);
  });
}

tide_rc tide_run_report(tide_session* session, const char* traces_path,
                        char** out_report_json) {
  return guarded(session, out_report_json, [&] {
    return tide::pipeline::run_report(session->cfg,
                                      traces_path ? traces_path : "");
  });
}

void tide_string_free(char* s) { std::free(s); }

}  // extern "C"
