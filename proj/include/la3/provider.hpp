#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "la3/error.hpp"

namespace la3::augment {

using Duration = std::chrono::milliseconds;
using TimePoint = std::chrono::time_point<std::chrono::steady_clock, Duration>;

/// Time source for rate limiting and backoff. `freeze` returns the current
/// time together with a guard; while any guard is alive the clock does not
/// advance, so a request sent under the guard is observed at that time.
class Clock {
 public:
  class Frozen {
   public:
    Frozen(TimePoint at, std::function<void()> release) : at_(at), release_(std::move(release)) {}
    Frozen(Frozen&& other) noexcept : at_(other.at_), release_(std::exchange(other.release_, nullptr)) {}
    Frozen& operator=(Frozen&&) = delete;
    Frozen(const Frozen&) = delete;
    ~Frozen() { reset(); }
    void reset() {
      if (release_) std::exchange(release_, nullptr)();
    }
    [[nodiscard]] TimePoint at() const noexcept { return at_; }

   private:
    TimePoint at_;
    std::function<void()> release_;
  };

  virtual ~Clock() = default;
  virtual TimePoint now() = 0;
  virtual void sleep_until(TimePoint t) = 0;
  virtual Frozen freeze() = 0;
  void sleep_for(Duration d) { sleep_until(now() + d); }
};

class SystemClock final : public Clock {
 public:
  TimePoint now() override;
  void sleep_until(TimePoint t) override;
  Frozen freeze() override;
};

/// Virtual time: sleeping jumps forward instead of blocking, once no
/// Frozen guard is outstanding.
class SimulatedClock final : public Clock {
 public:
  explicit SimulatedClock(TimePoint start = TimePoint{}) : now_(start) {}
  TimePoint now() override;
  void sleep_until(TimePoint t) override;
  Frozen freeze() override;
  void advance(Duration d);

 private:
  std::mutex mutex_;
  std::condition_variable released_;
  TimePoint now_;
  int holders_ = 0;
};

/// At most `per_minute` grants in any half-open 60 s window (sliding log).
/// 0 disables limiting.
class RateLimiter {
 public:
  RateLimiter(Clock& clock, int per_minute) : clock_(clock), per_minute_(per_minute) {}
  /// Blocks until a slot is free; the returned guard pins the grant time.
  Clock::Frozen acquire();

 private:
  Clock& clock_;
  int per_minute_;
  std::mutex mutex_;
  std::deque<TimePoint> granted_;
};

// ---- transport ---------------------------------------------------------------

struct HttpRequest {
  std::string url;
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;
  Duration timeout{60000};
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

class TransportError : public ExternalError {
 public:
  enum class Kind { Timeout, Connection };
  TransportError(Kind kind, const std::string& what) : ExternalError(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class Transport {
 public:
  virtual ~Transport() = default;
  /// Throws TransportError on timeout or connection failure; HTTP error
  /// statuses are returned, not thrown.
  virtual HttpResponse post(const HttpRequest& request) = 0;
};

/// HTTP(S) POST through cpp-httplib.
class HttplibTransport final : public Transport {
 public:
  HttpResponse post(const HttpRequest& request) override;
};

struct ParsedUrl {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path;
};
ParsedUrl parse_url(std::string_view url);

// ---- mock provider -------------------------------------------------------------

struct MockStep {
  enum class Kind { Ok, Timeout, HttpError };
  Kind kind = Kind::Ok;
  /// Response text; "{SMILES}" and "{SEED}" are replaced from the request.
  std::string text;
  int status = 500;
  Duration latency{0};

  static MockStep ok(std::string text) { return {Kind::Ok, std::move(text), 200, Duration{0}}; }
  static MockStep timeout() { return {Kind::Timeout, {}, 0, Duration{0}}; }
  static MockStep http_error(int status) { return {Kind::HttpError, {}, status, Duration{0}}; }
};

struct MockRequestLog {
  TimePoint at;
  std::string model;
  std::string smiles;
  std::string body;
  int seed = 0;
};

/// Scripted provider speaking the chat-completions wire format. Steps are
/// consumed in order, then `fallback` repeats. Usable in-process as a
/// Transport or behind a local HTTP server (MockServer).
class MockProvider final : public Transport {
 public:
  explicit MockProvider(Clock& clock, std::vector<MockStep> script = {},
                        MockStep fallback = MockStep::ok("Rewritten description number {SEED} of the molecule, "
                                                          "covering its structure and its biological role."));

  HttpResponse post(const HttpRequest& request) override;
  HttpResponse handle(std::string_view body);

  [[nodiscard]] std::size_t request_count() const;
  [[nodiscard]] std::vector<MockRequestLog> requests() const;

 private:
  Clock& clock_;
  mutable std::mutex mutex_;
  std::deque<MockStep> script_;
  MockStep fallback_;
  std::vector<MockRequestLog> log_;
};

/// Serves a MockProvider on 127.0.0.1 at an ephemeral port.
class MockServer {
 public:
  explicit MockServer(MockProvider& provider);
  ~MockServer();
  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  [[nodiscard]] int port() const noexcept { return port_; }
  [[nodiscard]] std::string endpoint() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

/// Extracts a string at a path such as "choices[0].message.content".
/// Returns nullopt when the body is not JSON or the path is missing.
std::optional<std::string> extract_text(std::string_view json_body, std::string_view path);

}  // namespace la3::augment
