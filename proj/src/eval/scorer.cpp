#include <fcntl.h>
#include <spawn.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <json.hpp>

#include "la3/evalharness.hpp"
#include "la3/io.hpp"

extern char** environ;

namespace la3::eval {
namespace {

namespace fs = std::filesystem;

bool is_executable(const fs::path& p) {
  struct stat st {};
  return ::stat(p.c_str(), &st) == 0 && S_ISREG(st.st_mode) && ::access(p.c_str(), X_OK) == 0;
}

std::optional<fs::path> resolve(const std::string& program) {
  if (program.find('/') != std::string::npos) {
    return is_executable(program) ? std::optional<fs::path>(program) : std::nullopt;
  }
  const char* path_env = std::getenv("PATH");
  std::string_view dirs = path_env != nullptr ? path_env : "/usr/bin:/bin";
  while (!dirs.empty()) {
    const auto colon = dirs.find(':');
    const auto dir = dirs.substr(0, colon);
    const auto candidate = fs::path(dir.empty() ? "." : std::string(dir)) / program;
    if (is_executable(candidate)) return candidate;
    if (colon == std::string_view::npos) break;
    dirs.remove_prefix(colon + 1);
  }
  return std::nullopt;
}

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "la3-scorer-XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) throw IoError("cannot create a temporary directory");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  [[nodiscard]] const fs::path& path() const noexcept { return path_; }

 private:
  fs::path path_;
};

std::string tail(const std::string& s, std::size_t n) { return s.size() <= n ? s : s.substr(s.size() - n); }

}  // namespace

ScorerOutcome run_external_scorer(const ExternalScorerSpec& spec, const std::vector<ScorerPair>& pairs) {
  ScorerOutcome outcome;
  if (spec.command.empty()) {
    outcome.skipped_reason = "no command configured";
    return outcome;
  }
  const auto program = resolve(spec.command.front());
  if (!program) {
    outcome.skipped_reason = "executable not found: " + spec.command.front();
    return outcome;
  }

  TempDir dir;
  const auto input = dir.path() / "pairs.jsonl";
  const auto output = dir.path() / "result.json";
  const auto log = dir.path() / "stderr.txt";
  std::string jsonl;
  for (const auto& p : pairs) {
    nlohmann::ordered_json row;
    row["id"] = p.id;
    row["prediction"] = p.prediction;
    row["reference"] = p.reference;
    jsonl += row.dump() + "\n";
  }
  write_file_atomic(input, jsonl);

  std::vector<std::string> args = spec.command;
  args.front() = program->string();
  args.push_back(input.string());
  args.push_back(output.string());
  for (const auto& a : args) {
    if (!outcome.provenance.empty()) outcome.provenance += ' ';
    outcome.provenance += a;
  }
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
  posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);
  pid_t pid = 0;
  const int rc = ::posix_spawn(&pid, argv.front(), &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw ScorerError(ScorerError::Kind::ScorerFailed, spec.name + ": cannot start " + args.front(), -1);
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw ScorerError(ScorerError::Kind::ScorerFailed, spec.name + ": waitpid failed", -1);
  }
  const int exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  if (exit_code != 0) {
    std::string err;
    try {
      err = tail(read_file(log), 2000);
    } catch (const IoError&) {
    }
    throw ScorerError(ScorerError::Kind::ScorerFailed,
                      spec.name + " scorer exited with code " + std::to_string(exit_code) + ": " + err, exit_code,
                      err);
  }

  std::string text;
  try {
    text = read_file(output);
  } catch (const IoError&) {
    throw ScorerError(ScorerError::Kind::MalformedScorerOutput, spec.name + " scorer wrote no output file");
  }
  const auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("value") || !doc["value"].is_number()) {
    throw ScorerError(ScorerError::Kind::MalformedScorerOutput,
                      spec.name + " scorer output is not a JSON object with a numeric \"value\"");
  }
  outcome.value = doc["value"].get<double>();
  return outcome;
}

}  // namespace la3::eval
