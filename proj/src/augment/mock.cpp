#include <json.hpp>
#include <thread>

#include "la3/provider.hpp"

namespace la3::augment {
namespace {

using Json = nlohmann::json;

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

std::string smiles_from_prompt(std::string_view user) {
  constexpr std::string_view kMarker = "SMILES string of target molecule: ";
  const auto start = user.find(kMarker);
  if (start == std::string_view::npos) return {};
  const auto from = start + kMarker.size();
  const auto end = user.find(".\n", from);
  return std::string(user.substr(from, end == std::string_view::npos ? std::string_view::npos : end - from));
}

}  // namespace

std::optional<std::string> extract_text(std::string_view json_body, std::string_view path) {
  const auto doc = Json::parse(json_body, nullptr, false);
  if (doc.is_discarded()) return std::nullopt;
  const Json* node = &doc;
  std::size_t pos = 0;
  while (pos < path.size()) {
    auto end = path.find_first_of(".[", pos);
    if (end == std::string_view::npos) end = path.size();
    if (end > pos) {
      const std::string key(path.substr(pos, end - pos));
      if (!node->is_object() || !node->contains(key)) return std::nullopt;
      node = &(*node)[key];
    }
    pos = end;
    while (pos < path.size() && path[pos] == '[') {
      const auto close = path.find(']', pos);
      if (close == std::string_view::npos) return std::nullopt;
      std::size_t index = 0;
      for (std::size_t i = pos + 1; i < close; ++i) {
        if (path[i] < '0' || path[i] > '9') return std::nullopt;
        index = index * 10 + static_cast<std::size_t>(path[i] - '0');
      }
      if (!node->is_array() || index >= node->size()) return std::nullopt;
      node = &(*node)[index];
      pos = close + 1;
    }
    if (pos < path.size() && path[pos] == '.') ++pos;
  }
  if (!node->is_string()) return std::nullopt;
  return node->get<std::string>();
}

MockProvider::MockProvider(Clock& clock, std::vector<MockStep> script, MockStep fallback)
    : clock_(clock), script_(script.begin(), script.end()), fallback_(std::move(fallback)) {}

HttpResponse MockProvider::handle(std::string_view body) {
  MockRequestLog entry;
  entry.at = clock_.now();
  entry.body = std::string(body);
  const auto doc = Json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.contains("messages")) return {400, R"({"error":"bad request"})"};
  entry.model = doc.value("model", "");
  entry.seed = doc.value("seed", 0);
  for (const auto& m : doc["messages"]) {
    if (m.value("role", "") == "user") entry.smiles = smiles_from_prompt(m.value("content", ""));
  }

  MockStep step;
  std::size_t serial = 0;
  {
    std::lock_guard lock(mutex_);
    if (script_.empty()) {
      step = fallback_;
    } else {
      step = std::move(script_.front());
      script_.pop_front();
    }
    log_.push_back(entry);
    serial = log_.size();
  }
  if (step.latency.count() > 0) std::this_thread::sleep_for(step.latency);

  switch (step.kind) {
    case MockStep::Kind::Timeout:
      return {0, {}};
    case MockStep::Kind::HttpError:
      return {step.status, R"({"error":{"message":"scripted failure"}})"};
    case MockStep::Kind::Ok:
      break;
  }
  std::string text = step.text;
  replace_all(text, "{SMILES}", entry.smiles);
  replace_all(text, "{SEED}", std::to_string(entry.seed));
  Json reply = {{"id", "mock-" + std::to_string(serial)},
                {"object", "chat.completion"},
                {"model", entry.model},
                {"choices", Json::array({{{"index", 0},
                                          {"message", {{"role", "assistant"}, {"content", text}}},
                                          {"finish_reason", "stop"}}})}};
  return {200, reply.dump()};
}

HttpResponse MockProvider::post(const HttpRequest& request) {
  auto reply = handle(request.body);
  if (reply.status == 0) throw TransportError(TransportError::Kind::Timeout, "mock provider timeout");
  return reply;
}

std::size_t MockProvider::request_count() const {
  std::lock_guard lock(mutex_);
  return log_.size();
}

std::vector<MockRequestLog> MockProvider::requests() const {
  std::lock_guard lock(mutex_);
  return log_;
}

}  // namespace la3::augment
