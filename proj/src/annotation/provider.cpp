#include "annotation/provider.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace tide::annotation {

using nlohmann::json;

MockConceptProvider::MockConceptProvider() {
  table_ = {
      {"cat", {"whiskers", "eyes", "ears"}},
      {"dog", {"snout", "ears", "tail"}},
      {"bird", {"beak", "feet", "feathers"}},
      {"squirrel", {"tail", "ears", "claws"}},
      {"hammer", {"claw", "cheek", "face"}},
      {"chair", {"seat", "legs", "backrest"}},
  };
}

void MockConceptProvider::add_class(const std::string& class_name,
                                    std::vector<std::string> concepts) {
  if (concepts.size() < 3 || concepts.size() > 6) {
    throw Error(ErrorCode::kInvalidConfig,
                "provider entries carry 3-6 concepts per class");
  }
  table_[class_name] = std::move(concepts);
}

std::vector<std::string> MockConceptProvider::list_concepts(
    const std::string& class_name) const {
  auto it = table_.find(class_name);
  if (it == table_.end()) {
    throw Error(ErrorCode::kUnknownClass,
                "provider has no entry for class '" + class_name + "'");
  }
  // Ordered and deduplicated (table entries are already unique; keep the
  // guarantee even for hand-edited tables).
  std::vector<std::string> out;
  for (const auto& c : it->second) {
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  }
  return out;
}

struct ExternalConceptProvider::Impl {
  ProviderConfig cfg;
  mutable std::mutex mutex;
  mutable std::condition_variable cv;
  mutable int in_flight = 0;
};

ExternalConceptProvider::ExternalConceptProvider(ProviderConfig cfg)
    : impl_(std::make_unique<Impl>()) {
  if (cfg.endpoint.empty()) {
    throw Error(ErrorCode::kInvalidConfig,
                "external provider needs an endpoint");
  }
  impl_->cfg = std::move(cfg);
}

ExternalConceptProvider::~ExternalConceptProvider() = default;

std::vector<std::string> ExternalConceptProvider::list_concepts(
    const std::string& class_name) const {
  const auto& cfg = impl_->cfg;

  // Bounded concurrency across caller threads.
  std::unique_lock lock(impl_->mutex);
  impl_->cv.wait(lock,
                 [&] { return impl_->in_flight < cfg.max_concurrency; });
  ++impl_->in_flight;
  lock.unlock();
  struct Release {
    Impl* impl;
    ~Release() {
      std::lock_guard guard(impl->mutex);
      --impl->in_flight;
      impl->cv.notify_one();
    }
  } release{impl_.get()};

  httplib::Client client(cfg.endpoint);
  client.set_connection_timeout(5, 0);
  client.set_read_timeout(10, 0);

  httplib::Headers headers;
  if (!cfg.auth_env.empty()) {
    if (const char* token = std::getenv(cfg.auth_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
  }

  const std::string body = json{{"class_name", class_name}}.dump();
  std::string last_status = "no response";
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(
          cfg.backoff_base_ms * (1 << (attempt - 1))));
    }
    auto res = client.Post(cfg.path, headers, body, "application/json");
    if (!res) {
      last_status = "transport error";
      continue;
    }
    if (res->status != 200) {
      last_status = "HTTP " + std::to_string(res->status);
      continue;
    }
    try {
      auto j = json::parse(res->body);
      auto concepts = j.at("concepts").get<std::vector<std::string>>();
      if (concepts.empty()) {
        throw Error(ErrorCode::kProvider,
                    "service returned an empty concept list for '" +
                        class_name + "'");
      }
      return concepts;
    } catch (const json::exception& e) {
      last_status = std::string("bad payload: ") + e.what();
    }
  }
  throw Error(ErrorCode::kProvider,
              "concept service failed for '" + class_name + "' after " +
                  std::to_string(cfg.max_retries + 1) + " attempts (last: " +
                  last_status + ")");
}

std::unique_ptr<ConceptProvider> make_provider(const ProviderConfig& cfg) {
  if (cfg.kind == "mock") {
    return std::make_unique<MockConceptProvider>();
  }
  if (cfg.kind == "external") {
    return std::make_unique<ExternalConceptProvider>(cfg);
  }
  throw Error(ErrorCode::kInvalidConfig,
              "unknown provider kind: " + cfg.kind);
}

std::string build_prompt(const std::string& class_name,
                         const std::vector<std::string>& concepts) {
  if (concepts.empty()) {
    throw Error(ErrorCode::kInvalidInput, "build_prompt: no concepts");
  }
  std::string out = "Generate a photo of a " + class_name + " with its ";
  if (concepts.size() == 1) {
    out += concepts[0];
  } else if (concepts.size() == 2) {
    out += concepts[0] + " and " + concepts[1];
  } else {
    for (size_t i = 0; i + 1 < concepts.size(); ++i) {
      out += concepts[i] + ", ";
    }
    out += "and " + concepts.back();
  }
  out += ".";
  return out;
}

}  // namespace tide::annotation
