#include <json.hpp>
#include <set>

#include "la3/augment.hpp"
#include "la3/hash.hpp"
#include "la3/io.hpp"

namespace la3::augment {
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

ProviderConfig parse_provider(const Json& j) {
  ProviderConfig p;
  p.name = j.at("name").get<std::string>();
  p.endpoint = j.at("endpoint").get<std::string>();
  p.model = j.at("model").get<std::string>();
  p.api_key_env = j.value("api_key_env", std::string{});
  p.max_concurrency = j.value("max_concurrency", p.max_concurrency);
  p.requests_per_minute = j.value("requests_per_minute", p.requests_per_minute);
  p.max_retries = j.value("max_retries", p.max_retries);
  p.timeout = Duration{j.value("timeout_ms", static_cast<long long>(p.timeout.count()))};
  p.rounds = j.value("rounds", p.rounds);
  p.response_path = j.value("response_path", p.response_path);
  p.temperature = j.value("temperature", p.temperature);
  return p;
}

void check_provider(const ProviderConfig& p) {
  auto fail = [&](const std::string& why) { throw ConfigError("provider '" + p.name + "': " + why); };
  if (p.name.empty()) throw ConfigError("provider without a name");
  if (p.endpoint.empty()) fail("endpoint is empty");
  if (p.model.empty()) fail("model is empty");
  if (p.max_concurrency < 1) fail("max_concurrency must be >= 1");
  if (p.requests_per_minute < 0) fail("requests_per_minute must be >= 0");
  if (p.max_retries < 0) fail("max_retries must be >= 0");
  if (p.timeout.count() <= 0) fail("timeout must be positive");
  if (p.rounds < 0) fail("rounds must be >= 0");
}

}  // namespace

AugmentConfig parse_augment_config(std::string_view json_text) {
  AugmentConfig cfg;
  try {
    const auto doc = Json::parse(json_text);
    for (const auto& p : doc.at("providers")) cfg.providers.push_back(parse_provider(p));
    cfg.template_name = doc.value("template", cfg.template_name);
    if (doc.contains("budget") && !doc["budget"].is_null()) cfg.budget = doc["budget"].get<std::size_t>();
    if (doc.contains("validation")) {
      const auto& v = doc["validation"];
      cfg.validation.min_length = v.value("min_length", cfg.validation.min_length);
      cfg.validation.max_length = v.value("max_length", cfg.validation.max_length);
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed provider config: ") + e.what());
  }
  if (cfg.providers.empty()) throw ConfigError("provider config lists no providers");
  std::set<std::string> names;
  for (const auto& p : cfg.providers) {
    check_provider(p);
    if (!names.insert(p.name).second) throw ConfigError("duplicate provider name '" + p.name + "'");
  }
  if (cfg.validation.min_length >= cfg.validation.max_length) {
    throw ConfigError("validation min_length must be below max_length");
  }
  template_by_name(cfg.template_name);
  return cfg;
}

AugmentConfig load_augment_config(const std::filesystem::path& path) {
  return parse_augment_config(read_file(path));
}

void assign_rounds(std::vector<ProviderConfig>& providers, int k) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (providers.empty()) throw ConfigError("no providers configured");
  int explicit_sum = 0;
  std::size_t unset = 0;
  for (const auto& p : providers) {
    explicit_sum += p.rounds;
    if (p.rounds == 0) ++unset;
  }
  if (unset == providers.size()) {
    for (int r = 0; r < k; ++r) ++providers[static_cast<std::size_t>(r) % providers.size()].rounds;
    return;
  }
  if (unset != 0 || explicit_sum != k) {
    throw ConfigError("provider rounds sum to " + std::to_string(explicit_sum) + " but k is " + std::to_string(k));
  }
}

std::string request_body(const ProviderConfig& provider, const Prompt& prompt, int round) {
  OrderedJson body;
  body["model"] = provider.model;
  body["messages"] = OrderedJson::array({{{"role", "system"}, {"content", prompt.system}},
                                         {{"role", "user"}, {"content", prompt.user}}});
  body["temperature"] = provider.temperature;
  body["seed"] = round;
  return body.dump();
}

std::size_t estimate_tokens(std::string_view prompt, std::string_view response) {
  return (prompt.size() + response.size() + 3) / 4;
}

std::string cache_key(std::string_view id, std::string_view provider, std::string_view model,
                      std::string_view template_hash, int round) {
  std::string blob;
  for (auto part : {id, provider, model, template_hash}) {
    blob.append(part);
    blob += '\x1f';
  }
  blob += std::to_string(round);
  return to_hex(fnv1a64(blob));
}

std::string JobReport::to_json() const {
  OrderedJson j;
  j["records"] = records;
  j["tasks"] = tasks;
  j["cached"] = cached;
  j["fetched"] = fetched;
  j["rejected"] = rejected;
  j["failed"] = failed;
  j["retries"] = retries;
  j["requests"] = requests;
  j["estimated_tokens"] = estimated_tokens;
  j["dry_run"] = dry_run;
  if (dry_run) j["planned_requests"] = planned_requests;
  j["failures"] = OrderedJson::array();
  for (const auto& f : failures) {
    j["failures"].push_back({{"id", f.id}, {"provider", f.provider}, {"round", f.round}, {"reason", f.reason}});
  }
  j["all_providers_failed"] = all_providers_failed;
  return j.dump(2) + "\n";
}

}  // namespace la3::augment
