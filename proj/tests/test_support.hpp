#pragma once

#include <atomic>
#include <functional>
#include <optional>
#include <filesystem>
#include <random>
#include <string>
#include <thread>

#include <httplib.h>

#include "medseek/error.hpp"

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("medseek-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Local HTTP server on an ephemeral port for exercising network adapters.
class TestServer {
 public:
  httplib::Server server;

  void start() {
    port_ = server.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~TestServer() {
    server.stop();
    if (thread_.joinable()) thread_.join();
  }

  std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }

 private:
  int port_ = 0;
  std::thread thread_;
};

// Code of the medseek::Error thrown by `f`, or nullopt when nothing is thrown.
inline std::optional<medseek::ErrorCode> error_code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const medseek::Error& e) {
    return e.code();
  }
  return std::nullopt;
}
