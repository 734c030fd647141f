#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace medseek {

enum class RecordKind { Serp, Page, Completion, Answer };

std::string_view to_string(RecordKind kind);

// One immutable cache-keyed interaction. `checksum` is the SHA-256 of the
// compact payload serialization.
struct RunRecord {
  std::string run_id;
  RecordKind kind = RecordKind::Serp;
  std::string key_hash;
  nlohmann::json payload;
  std::string created_at;
  std::string checksum;
};

// Append-only store: one JSON-lines file per record kind inside `dir`.
// Appends are serialized with an in-process mutex plus an flock on the file,
// so several workers or processes may share one store. Readers only consume
// complete lines, so they always observe a prefix of the log.
class RunStore {
 public:
  explicit RunStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }

  // Throws StoreCorrupt when the stored record fails its checksum.
  std::optional<RunRecord> find(RecordKind kind, const std::string& key_hash);

  // Returns the stored record. If the key already exists nothing is written
  // and the existing record is returned.
  RunRecord append(RecordKind kind, const std::string& key_hash, const nlohmann::json& payload,
                   const std::string& run_id);

  // Every record of one kind in append order.
  std::vector<RunRecord> records(RecordKind kind);

  std::filesystem::path file_for(RecordKind kind) const;

  // Canonical serialization used for hashing and storage.
  static std::string canonical_dump(const nlohmann::json& value);

 private:
  struct Log {
    std::uintmax_t consumed = 0;  // bytes of the file already parsed
    std::vector<RunRecord> records;
    std::map<std::string, size_t> by_key;
  };

  void refresh(RecordKind kind, Log& log);
  Log& log_for(RecordKind kind);

  std::filesystem::path dir_;
  std::mutex mu_;
  std::map<RecordKind, Log> logs_;
};

}  // namespace medseek
