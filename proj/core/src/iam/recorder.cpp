#include "blexer/iam/recorder.hpp"

#include <fstream>

#include <unistd.h>

namespace blexer::iam {

namespace fs = std::filesystem;

FileStorage::FileStorage(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(Errc::StorageFull, dir_.string(), ec.message());
}

FileStorage::~FileStorage() {
  for (auto* f : files_) {
    if (!f) continue;
    std::fflush(f);
    ::fsync(fileno(f));
    std::fclose(f);
  }
}

void FileStorage::write(LogStream stream, std::string_view line) {
  auto& f = files_[static_cast<std::size_t>(stream)];
  if (!f) {
    const fs::path p = dir_ / std::string(file_name(stream));
    f = std::fopen(p.c_str(), "ab");
    if (!f) throw Error(Errc::StorageFull, p.string(), "cannot open for append");
  }
  if (std::fwrite(line.data(), 1, line.size(), f) != line.size() || std::fputc('\n', f) == EOF)
    throw Error(Errc::StorageFull, std::string(file_name(stream)), "write failed");
}

void FileStorage::sync() {
  for (auto* f : files_) {
    if (!f) continue;
    if (std::fflush(f) != 0 || ::fsync(fileno(f)) != 0)
      throw Error(Errc::StorageFull, dir_.string(), "sync failed");
  }
}

void MemoryStorage::write(LogStream stream, std::string_view line) {
  if (written_ >= fail_after_)
    throw Error(Errc::StorageFull, std::string(file_name(stream)), "injected write failure");
  ++written_;
  lines_[static_cast<std::size_t>(stream)].emplace_back(line);
}

Recorder::Recorder(std::unique_ptr<Storage> storage, FailureHandler on_failure)
    : storage_(std::move(storage)),
      on_failure_(std::move(on_failure)),
      last_sync_(std::chrono::steady_clock::now()) {}

Recorder::~Recorder() {
  try {
    flush();
  } catch (...) {
  }
}

void Recorder::append(LogStream stream, const nlohmann::json& record) {
  if (failed_) return;
  try {
    storage_->write(stream, record.dump());
    ++counts_[static_cast<std::size_t>(stream)];
    dirty_ = true;
    const auto now = std::chrono::steady_clock::now();
    if (now - last_sync_ >= std::chrono::seconds(1)) {
      storage_->sync();
      last_sync_ = now;
      dirty_ = false;
    }
  } catch (const Error& e) {
    failed_ = true;
    if (on_failure_) on_failure_(e);
  }
}

void Recorder::flush() {
  if (failed_ || !dirty_) return;
  try {
    storage_->sync();
    dirty_ = false;
    last_sync_ = std::chrono::steady_clock::now();
  } catch (const Error& e) {
    failed_ = true;
    if (on_failure_) on_failure_(e);
  }
}

void write_session_meta(const fs::path& dir, const nlohmann::json& meta) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path tmp = dir / (std::string(kSessionMetaFile) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(Errc::StorageFull, tmp.string(), "cannot write");
    out << meta.dump(2) << '\n';
    if (!out) throw Error(Errc::StorageFull, tmp.string(), "write failed");
  }
  fs::rename(tmp, dir / kSessionMetaFile, ec);
  if (ec) throw Error(Errc::StorageFull, (dir / kSessionMetaFile).string(), ec.message());
}

nlohmann::json read_session_meta(const fs::path& dir) {
  const fs::path p = dir / kSessionMetaFile;
  std::ifstream in(p);
  if (!in) return nlohmann::json();
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::CorruptLog, p.string() + ":1", e.what());
  }
}

}  // namespace blexer::iam
