#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace opmark {

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);
void write_binary_file(const std::filesystem::path& path,
                       const std::vector<std::uint8_t>& bytes);

// FNV-1a, 64 bit. Used for cache keys and config hashes, not for security.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);

// Little-endian binary container building blocks shared by the OMK1 / OIC1 /
// OTE1 / OFV1 formats.
class BinaryWriter {
 public:
  void magic(const char tag[4]);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void str(std::string_view s);
  void f64_array(const std::vector<double>& v);
  const std::vector<std::uint8_t>& bytes() const { return buf_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::uint8_t> buf_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::vector<std::uint8_t> bytes) : buf_(std::move(bytes)) {}
  static BinaryReader open(const std::filesystem::path& path);

  void expect_magic(const char tag[4]);
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::string str();
  std::vector<double> f64_array();
  bool at_end() const { return pos_ == buf_.size(); }

 private:
  const std::uint8_t* take(std::size_t n);
  std::vector<std::uint8_t> buf_;
  std::size_t pos_ = 0;
};

}  // namespace opmark
