#include "medseek/run_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <fstream>

#include "medseek/error.hpp"
#include "medseek/text.hpp"

namespace medseek {

namespace {

RecordKind kind_from_string(std::string_view s) {
  if (s == "serp") return RecordKind::Serp;
  if (s == "page") return RecordKind::Page;
  if (s == "completion") return RecordKind::Completion;
  if (s == "answer") return RecordKind::Answer;
  throw Error(ErrorCode::StoreCorrupt, "unknown record kind '" + std::string(s) + "'");
}

class FileLock {
 public:
  explicit FileLock(const std::filesystem::path& path) {
    fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw Error(ErrorCode::IoError, "cannot lock " + path.string());
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

  int fd() const { return fd_; }

 private:
  int fd_ = -1;
};

RunRecord decode_line(const std::string& line, RecordKind expected) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
    RunRecord rec;
    rec.run_id = obj.at("run_id").get<std::string>();
    rec.kind = kind_from_string(obj.at("kind").get<std::string>());
    rec.key_hash = obj.at("key_hash").get<std::string>();
    rec.payload = obj.at("payload");
    rec.created_at = obj.at("created_at").get<std::string>();
    rec.checksum = obj.at("checksum").get<std::string>();
    if (rec.kind != expected) throw Error(ErrorCode::StoreCorrupt, "record kind mismatch");
    return rec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::StoreCorrupt, std::string("unreadable store record: ") + e.what());
  }
}

}  // namespace

std::string_view to_string(RecordKind kind) {
  switch (kind) {
    case RecordKind::Serp: return "serp";
    case RecordKind::Page: return "page";
    case RecordKind::Completion: return "completion";
    case RecordKind::Answer: return "answer";
  }
  return "?";
}

RunStore::RunStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create store " + dir_.string() + ": " + ec.message());
}

std::string RunStore::canonical_dump(const nlohmann::json& value) {
  return value.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::filesystem::path RunStore::file_for(RecordKind kind) const {
  return dir_ / (std::string(to_string(kind)) + ".jsonl");
}

RunStore::Log& RunStore::log_for(RecordKind kind) {
  auto& log = logs_[kind];
  refresh(kind, log);
  return log;
}

void RunStore::refresh(RecordKind kind, Log& log) {
  auto path = file_for(kind);
  std::error_code ec;
  auto size = std::filesystem::file_size(path, ec);
  if (ec || size <= log.consumed) return;

  std::ifstream in(path, std::ios::binary);
  in.seekg(static_cast<std::streamoff>(log.consumed));
  std::string chunk(size - log.consumed, '\0');
  in.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
  chunk.resize(static_cast<size_t>(in.gcount()));

  size_t start = 0;
  for (;;) {
    auto nl = chunk.find('\n', start);
    if (nl == std::string::npos) break;  // partial trailing line: wait for the writer
    auto line = chunk.substr(start, nl - start);
    start = nl + 1;
    if (text::trim(line).empty()) continue;
    auto rec = decode_line(line, kind);
    if (!log.by_key.contains(rec.key_hash)) log.by_key.emplace(rec.key_hash, log.records.size());
    log.records.push_back(std::move(rec));
  }
  log.consumed += start;
}

std::optional<RunRecord> RunStore::find(RecordKind kind, const std::string& key_hash) {
  std::lock_guard lock(mu_);
  auto& log = log_for(kind);
  auto it = log.by_key.find(key_hash);
  if (it == log.by_key.end()) return std::nullopt;
  const auto& rec = log.records[it->second];
  if (text::sha256_hex(canonical_dump(rec.payload)) != rec.checksum)
    throw Error(ErrorCode::StoreCorrupt, "checksum mismatch for " + std::string(to_string(kind)) +
                                             " record " + key_hash);
  return rec;
}

RunRecord RunStore::append(RecordKind kind, const std::string& key_hash,
                           const nlohmann::json& payload, const std::string& run_id) {
  std::lock_guard lock(mu_);
  auto path = file_for(kind);
  FileLock file(path);
  auto& log = log_for(kind);  // re-read under the lock: another process may have written
  if (auto it = log.by_key.find(key_hash); it != log.by_key.end()) return log.records[it->second];

  RunRecord rec;
  rec.run_id = run_id;
  rec.kind = kind;
  rec.key_hash = key_hash;
  auto body = canonical_dump(payload);
  rec.payload = nlohmann::json::parse(body);  // normalised (invalid UTF-8 replaced)
  rec.checksum = text::sha256_hex(body);
  rec.created_at = text::now_iso8601();

  nlohmann::json line = {{"run_id", rec.run_id},     {"kind", to_string(kind)},
                         {"key_hash", rec.key_hash}, {"created_at", rec.created_at},
                         {"checksum", rec.checksum}, {"payload", rec.payload}};
  auto bytes = canonical_dump(line) + "\n";
  size_t written = 0;
  while (written < bytes.size()) {
    auto n = ::write(file.fd(), bytes.data() + written, bytes.size() - written);
    if (n < 0) throw Error(ErrorCode::IoError, "write failed on " + path.string());
    written += static_cast<size_t>(n);
  }
  refresh(kind, log);
  return rec;
}

std::vector<RunRecord> RunStore::records(RecordKind kind) {
  std::lock_guard lock(mu_);
  auto& log = log_for(kind);
  for (const auto& rec : log.records) {
    if (text::sha256_hex(canonical_dump(rec.payload)) != rec.checksum)
      throw Error(ErrorCode::StoreCorrupt, "checksum mismatch for " + std::string(to_string(kind)) +
                                               " record " + rec.key_hash);
  }
  return log.records;
}

}  // namespace medseek
