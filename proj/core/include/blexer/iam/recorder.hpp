#pragma once

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "blexer/common/error.hpp"
#include "blexer/common/event_log.hpp"

namespace blexer::iam {

inline constexpr std::size_t kLogStreamCount = 7;

// Where log lines go. write() throws Error{StorageFull} when a line cannot
// be stored.
class Storage {
 public:
  virtual ~Storage() = default;
  virtual void write(LogStream stream, std::string_view line) = 0;
  virtual void sync() = 0;
};

// sessions/<id>/<stream>.jsonl, opened lazily in append mode.
class FileStorage final : public Storage {
 public:
  explicit FileStorage(std::filesystem::path dir);
  ~FileStorage() override;
  FileStorage(const FileStorage&) = delete;
  FileStorage& operator=(const FileStorage&) = delete;

  void write(LogStream stream, std::string_view line) override;
  void sync() override;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::array<std::FILE*, kLogStreamCount> files_{};
};

// In-memory storage; `fail_after` lines in total it starts failing.
class MemoryStorage final : public Storage {
 public:
  explicit MemoryStorage(std::size_t fail_after = static_cast<std::size_t>(-1))
      : fail_after_(fail_after) {}
  void write(LogStream stream, std::string_view line) override;
  void sync() override { ++syncs_; }
  const std::vector<std::string>& lines(LogStream s) const {
    return lines_[static_cast<std::size_t>(s)];
  }
  std::size_t syncs() const { return syncs_; }

 private:
  std::array<std::vector<std::string>, kLogStreamCount> lines_;
  std::size_t fail_after_;
  std::size_t written_ = 0;
  std::size_t syncs_ = 0;
};

// Appends typed JSONL records. Syncs at most once per second. The first
// storage failure is reported through the failure handler; afterwards the
// recorder drops records and live operation continues.
class Recorder final : public EventSink {
 public:
  using FailureHandler = std::function<void(const Error&)>;

  explicit Recorder(std::unique_ptr<Storage> storage, FailureHandler on_failure = {});
  ~Recorder() override;

  void append(LogStream stream, const nlohmann::json& record) override;
  void set_failure_handler(FailureHandler h) { on_failure_ = std::move(h); }
  void flush();

  // Position the next record of `stream` will take (== records appended).
  std::size_t count(LogStream stream) const { return counts_[static_cast<std::size_t>(stream)]; }
  bool failed() const { return failed_; }
  Storage& storage() { return *storage_; }

 private:
  std::unique_ptr<Storage> storage_;
  FailureHandler on_failure_;
  std::array<std::size_t, kLogStreamCount> counts_{};
  std::chrono::steady_clock::time_point last_sync_;
  bool dirty_ = false;
  bool failed_ = false;
};

inline constexpr const char* kSessionMetaFile = "session.json";

void write_session_meta(const std::filesystem::path& dir, const nlohmann::json& meta);
nlohmann::json read_session_meta(const std::filesystem::path& dir);

}  // namespace blexer::iam
