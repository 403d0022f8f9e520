#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <system_error>
#include <vector>

#include <unistd.h>

#include "muvsim/generation.hpp"

namespace fixture {

// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("muvsim_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] const std::filesystem::path& path() const { return path_; }
  [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// 8 x 8 px of 1.25 mm, 100 frames: small enough to fuzz byte by byte, long
// enough (0.25 s) that every unit fires at least once.
inline muvsim::GenerationConfig small_config() {
  muvsim::GenerationConfig c;
  c.grid.width_px = 8;
  c.grid.height_px = 8;
  c.grid.px_mm = 1.25;
  c.grid.frames = 100;
  c.muscle.diameter_mm = {2.5, 5.0};
  c.train.count = 6;
  c.validation.count = 3;
  c.train.min_units = 1;
  c.train.max_units = 4;
  c.validation.min_units = 1;
  c.validation.max_units = 4;
  c.test.categories = {1, 3};
  c.test.per_category = 2;
  return c;
}

inline std::vector<muvsim::SequenceRecord> small_records(const muvsim::GenerationConfig& c,
                                                         std::size_t scenes, int units) {
  std::vector<muvsim::SequenceRecord> out;
  for (std::size_t i = 0; i < scenes; ++i) {
    for (auto& r : muvsim::make_records(c, muvsim::Split::test, {i, units})) out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<char> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const std::filesystem::path& p, const std::vector<char>& bytes, std::size_t n) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(n));
}

}  // namespace fixture
