#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace tide::annotation {

// Source of per-class concept lists. The mock variant is a deterministic
// table; the external variant talks to a JSON service.
class ConceptProvider {
 public:
  virtual ~ConceptProvider() = default;
  virtual std::vector<std::string> list_concepts(
      const std::string& class_name) const = 0;
  virtual std::string kind() const = 0;
};

class MockConceptProvider : public ConceptProvider {
 public:
  // Starts with a built-in table of everyday classes; extend per dataset.
  MockConceptProvider();
  void add_class(const std::string& class_name,
                 std::vector<std::string> concepts);
  std::vector<std::string> list_concepts(
      const std::string& class_name) const override;
  std::string kind() const override { return "mock-table"; }

 private:
  std::map<std::string, std::vector<std::string>> table_;
};

struct ProviderConfig {
  std::string kind = "mock";  // "mock" | "external"
  std::string endpoint;       // e.g. "http://127.0.0.1:8080"
  std::string path = "/concepts";
  std::string auth_env = "TIDE_PROVIDER_TOKEN";
  int max_retries = 3;
  int backoff_base_ms = 50;
  int max_concurrency = 4;
};

// POSTs {"class_name": ...} and expects {"concepts": [...]}. Retries with
// exponential backoff and bounds concurrent requests. Failures raise
// ProviderError with attempt count and last status in the message.
class ExternalConceptProvider : public ConceptProvider {
 public:
  explicit ExternalConceptProvider(ProviderConfig cfg);
  ~ExternalConceptProvider() override;
  std::vector<std::string> list_concepts(
      const std::string& class_name) const override;
  std::string kind() const override { return "external-service"; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::unique_ptr<ConceptProvider> make_provider(const ProviderConfig& cfg);

// "Generate a photo of a {class} with its {c1}, {c2}, ..., and {cn}."
// A single concept omits the conjunction; two concepts join with "and";
// three or more use a comma before the final "and".
std::string build_prompt(const std::string& class_name,
                         const std::vector<std::string>& concepts);

}  // namespace tide::annotation
