#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <json.hpp>
#include <mutex>
#include <set>
#include <thread>

#include "la3/augment.hpp"
#include "la3/hash.hpp"
#include "la3/io.hpp"

namespace la3::augment {
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;
using dataset::MoleculeRecord;

struct Task {
  std::size_t record;
  std::size_t provider;
  int round;
  std::string key;
};

struct Outcome {
  std::optional<dataset::CaptionRewrite> rewrite;
  std::optional<std::string> failure;
};

struct CacheEntry {
  bool ok = false;
  std::string text;
  std::string reason;
  std::string created_at;
};

class Cache {
 public:
  explicit Cache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  [[nodiscard]] bool enabled() const { return !dir_.empty(); }
  [[nodiscard]] std::filesystem::path path_for(const Task& t) const { return dir_ / (t.key + ".json"); }

  std::optional<CacheEntry> load(const Task& t, const MoleculeRecord& r, const ProviderConfig& p,
                                 const std::string& template_hash) const {
    if (!enabled()) return std::nullopt;
    const auto path = path_for(t);
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return std::nullopt;
    const auto doc = Json::parse(read_file(path), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw CacheCorrupt(path, "not a JSON object");
    try {
      if (doc.at("id").get<std::string>() != r.id || doc.at("provider").get<std::string>() != p.name ||
          doc.at("model").get<std::string>() != p.model ||
          doc.at("template_hash").get<std::string>() != template_hash || doc.at("round").get<int>() != t.round) {
        throw CacheCorrupt(path, "key fields do not match the file name");
      }
      CacheEntry e;
      const auto status = doc.at("status").get<std::string>();
      if (status != "ok" && status != "failed") throw CacheCorrupt(path, "unknown status '" + status + "'");
      e.ok = status == "ok";
      e.text = doc.at("text").get<std::string>();
      e.reason = doc.at("reason").get<std::string>();
      e.created_at = doc.at("created_at").get<std::string>();
      if (e.ok && e.text.empty()) throw CacheCorrupt(path, "accepted entry without text");
      return e;
    } catch (const Json::exception& ex) {
      throw CacheCorrupt(path, ex.what());
    }
  }

  void store(const Task& t, const MoleculeRecord& r, const ProviderConfig& p, const std::string& template_hash,
             const CacheEntry& e) const {
    if (!enabled()) return;
    OrderedJson doc;
    doc["id"] = r.id;
    doc["provider"] = p.name;
    doc["model"] = p.model;
    doc["template_hash"] = template_hash;
    doc["round"] = t.round;
    doc["status"] = e.ok ? "ok" : "failed";
    doc["text"] = e.text;
    doc["reason"] = e.reason;
    doc["created_at"] = e.created_at;
    write_file_atomic(path_for(t), doc.dump(2) + "\n");
  }

 private:
  std::filesystem::path dir_;
};

Duration backoff_delay(const BackoffPolicy& policy, const std::string& key, int attempt) {
  const double u = static_cast<double>(fnv1a64(key + "#" + std::to_string(attempt)) >> 11) * 0x1.0p-53;
  const double ms = static_cast<double>(policy.base.count()) * std::pow(policy.factor, attempt - 1) *
                    (1.0 + policy.jitter * u);
  return Duration{static_cast<Duration::rep>(std::llround(ms))};
}

bool retryable_status(int status) { return status == 408 || status == 429 || status >= 500; }

struct Counters {
  std::atomic<std::size_t> fetched{0};
  std::atomic<std::size_t> rejected{0};
  std::atomic<std::size_t> failed{0};
  std::atomic<std::size_t> retries{0};
  std::atomic<std::size_t> requests{0};
  std::atomic<std::size_t> tokens{0};
  std::atomic<std::size_t> budget_used{0};
  std::atomic<bool> budget_exhausted{false};
  std::atomic<bool> abort{false};
};

class Runner {
 public:
  Runner(const AugmentJob& job, Clock& clock, const TransportFactory& transports)
      : job_(job), clock_(clock), transports_(transports), cache_(job.cache_dir) {}

  JobResult run() {
    providers_ = job_.providers;
    assign_rounds(providers_, job_.k);
    std::set<std::string> names;
    for (const auto& p : providers_) {
      if (p.max_concurrency < 1) throw ConfigError("provider '" + p.name + "': max_concurrency must be >= 1");
      if (p.timeout.count() <= 0) throw ConfigError("provider '" + p.name + "': timeout must be positive");
      if (!names.insert(p.name).second) throw ConfigError("duplicate provider name '" + p.name + "'");
    }
    records_ = dataset::select(job_.corpus, job_.split.train);
    template_hash_ = template_hash(job_.prompt_template);

    for (std::size_t r = 0; r < records_.size(); ++r) {
      for (std::size_t p = 0; p < providers_.size(); ++p) {
        for (int round = 1; round <= providers_[p].rounds; ++round) {
          tasks_.push_back({r, p, round,
                            cache_key(records_[r].id, providers_[p].name, providers_[p].model, template_hash_, round)});
        }
      }
    }
    outcomes_.resize(tasks_.size());

    JobReport report;
    report.records = records_.size();
    report.tasks = tasks_.size();
    report.dry_run = job_.dry_run;

    std::vector<std::vector<std::size_t>> pending(providers_.size());
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
      const auto& t = tasks_[i];
      const auto entry = cache_.load(t, records_[t.record], providers_[t.provider], template_hash_);
      if (entry && (entry->ok || !job_.retry_failed)) {
        ++report.cached;
        if (entry->ok) {
          outcomes_[i].rewrite = dataset::CaptionRewrite{entry->text, providers_[t.provider].name, t.round,
                                                         entry->created_at};
        } else {
          outcomes_[i].failure = entry->reason;
        }
      } else {
        pending[t.provider].push_back(i);
      }
    }

    if (job_.dry_run) {
      for (const auto& list : pending) report.planned_requests += list.size();
      return assemble(std::move(report));
    }

    for (std::size_t p = 0; p < providers_.size(); ++p) {
      const auto& env = providers_[p].api_key_env;
      if (!pending[p].empty() && !env.empty() && std::getenv(env.c_str()) == nullptr) {
        throw ConfigError("provider '" + providers_[p].name + "': environment variable " + env + " is not set");
      }
    }

    std::vector<std::unique_ptr<RateLimiter>> limiters;
    std::vector<std::shared_ptr<Transport>> transports;
    for (const auto& p : providers_) {
      limiters.push_back(std::make_unique<RateLimiter>(clock_, p.requests_per_minute));
      transports.push_back(transports_(p));
    }

    std::vector<std::thread> workers;
    std::vector<std::atomic<std::size_t>> next(providers_.size());
    for (std::size_t p = 0; p < providers_.size(); ++p) {
      const auto n = std::min<std::size_t>(static_cast<std::size_t>(providers_[p].max_concurrency), pending[p].size());
      for (std::size_t w = 0; w < n; ++w) {
        workers.emplace_back([&, p] {
          try {
            for (;;) {
              if (counters_.abort || counters_.budget_exhausted) return;
              const auto slot = next[p].fetch_add(1);
              if (slot >= pending[p].size()) return;
              process(pending[p][slot], *limiters[p], *transports[p]);
            }
          } catch (...) {
            std::lock_guard lock(mutex_);
            if (!error_) error_ = std::current_exception();
            counters_.abort = true;
          }
        });
      }
    }
    for (auto& t : workers) t.join();
    if (error_) std::rethrow_exception(error_);

    report.fetched = counters_.fetched;
    report.rejected = counters_.rejected;
    report.retries = counters_.retries;
    report.requests = counters_.requests;
    report.estimated_tokens = counters_.tokens;
    if (counters_.budget_exhausted) throw BudgetExhausted(*job_.budget, assemble(std::move(report)).report);
    return assemble(std::move(report));
  }

 private:
  void process(std::size_t index, RateLimiter& limiter, Transport& transport) {
    const auto& task = tasks_[index];
    const auto& record = records_[task.record];
    const auto& provider = providers_[task.provider];
    const auto prompt = build_prompt(job_.prompt_template, record);
    const auto prompt_text = prompt.text();

    HttpRequest request;
    request.url = provider.endpoint;
    request.body = request_body(provider, prompt, task.round);
    request.timeout = provider.timeout;
    if (!provider.api_key_env.empty()) {
      request.headers.emplace_back("Authorization", std::string("Bearer ") + std::getenv(provider.api_key_env.c_str()));
    }

    std::string reason;
    for (int attempt = 0; attempt <= provider.max_retries; ++attempt) {
      if (attempt > 0) {
        ++counters_.retries;
        clock_.sleep_for(backoff_delay(job_.backoff, task.key, attempt));
      }
      if (job_.budget && counters_.budget_used.fetch_add(1) >= *job_.budget) {
        counters_.budget_exhausted = true;
        return;
      }
      ++counters_.requests;
      HttpResponse response;
      try {
        auto permit = limiter.acquire();
        response = transport.post(request);
      } catch (const TransportError& e) {
        counters_.tokens += estimate_tokens(prompt_text, {});
        reason = e.kind() == TransportError::Kind::Timeout ? "timeout" : "connection";
        continue;
      }
      if (response.status != 200) {
        counters_.tokens += estimate_tokens(prompt_text, {});
        reason = "http_" + std::to_string(response.status);
        if (!retryable_status(response.status)) break;
        continue;
      }
      const auto text = extract_text(response.body, provider.response_path);
      counters_.tokens += estimate_tokens(prompt_text, text.value_or(std::string{}));
      if (!text) {
        reason = "malformed_response";
        continue;
      }
      auto verdict = validate_caption(*text, record, job_.validation);
      if (!verdict.accepted()) {
        ++counters_.rejected;
        reason = std::string(to_string(*verdict.reason));
        continue;
      }
      CacheEntry entry{true, std::move(verdict.text), {}, utc_timestamp()};
      cache_.store(task, record, provider, template_hash_, entry);
      ++counters_.fetched;
      outcomes_[index].rewrite = dataset::CaptionRewrite{entry.text, provider.name, task.round, entry.created_at};
      return;
    }
    ++counters_.failed;
    cache_.store(task, record, provider, template_hash_, CacheEntry{false, {}, reason, utc_timestamp()});
    outcomes_[index].failure = reason;
  }

  JobResult assemble(JobReport report) const {
    JobResult result;
    result.records.reserve(records_.size());
    for (const auto& r : records_) result.records.push_back({r, {}});
    std::vector<std::size_t> failed_per_record(records_.size(), 0);
    std::vector<std::size_t> tasks_per_record(records_.size(), 0);
    report.failed = 0;
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
      const auto& t = tasks_[i];
      ++tasks_per_record[t.record];
      if (outcomes_[i].rewrite) result.records[t.record].rewrites.push_back(*outcomes_[i].rewrite);
      if (outcomes_[i].failure) {
        ++report.failed;
        ++failed_per_record[t.record];
        report.failures.push_back({records_[t.record].id, providers_[t.provider].name, t.round, *outcomes_[i].failure});
      }
    }
    for (std::size_t r = 0; r < records_.size(); ++r) {
      if (tasks_per_record[r] > 0 && failed_per_record[r] == tasks_per_record[r]) {
        report.all_providers_failed.push_back(records_[r].id);
      }
    }
    result.report = std::move(report);
    return result;
  }

  const AugmentJob& job_;
  Clock& clock_;
  const TransportFactory& transports_;
  Cache cache_;
  std::vector<ProviderConfig> providers_;
  std::vector<MoleculeRecord> records_;
  std::string template_hash_;
  std::vector<Task> tasks_;
  std::vector<Outcome> outcomes_;
  Counters counters_;
  std::mutex mutex_;
  std::exception_ptr error_;
};

}  // namespace

JobResult run_job(const AugmentJob& job, Clock& clock, const TransportFactory& transports) {
  return Runner(job, clock, transports).run();
}

JobResult run_job(const AugmentJob& job) {
  SystemClock clock;
  const TransportFactory http = [](const ProviderConfig&) { return std::make_shared<HttplibTransport>(); };
  return run_job(job, clock, http);
}

}  // namespace la3::augment
