#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "keygest/frame.hpp"
#include "keygest/rng.hpp"

namespace testutil {

inline keygest::Frame random_frame(keygest::Rng& rng, int w, int h, int levels = 256) {
  keygest::Frame f(w, h);
  for (auto& p : f.pixels()) p = static_cast<std::uint8_t>(rng.below(static_cast<std::size_t>(levels)));
  return f;
}

inline keygest::FrameSequence constant_sequence(std::size_t n, int w, int h, std::uint8_t value = 128) {
  return keygest::FrameSequence(std::vector<keygest::Frame>(n, keygest::Frame(w, h, value)), "constant");
}

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    keygest::Rng rng(std::hash<std::string>{}(tag) ^ static_cast<std::uint64_t>(
        std::filesystem::file_time_type::clock::now().time_since_epoch().count()));
    path_ = std::filesystem::temp_directory_path() / ("keygest_" + tag + "_" + std::to_string(rng.next() % 1000000007ULL));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
