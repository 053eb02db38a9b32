#include "cinediff/manifest.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cinediff/error.hpp"

namespace cinediff {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a_step(std::uint64_t h, unsigned char b) {
  return (h ^ b) * kFnvPrime;
}

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::uint64_t fnv1a_bytes(std::span<const std::byte> bytes) {
  std::uint64_t h = kFnvOffset;
  for (std::byte b : bytes) h = fnv1a_step(h, static_cast<unsigned char>(b));
  return h;
}

std::uint64_t fnv1a_text(const std::string& text) {
  std::uint64_t h = kFnvOffset;
  for (char c : text) h = fnv1a_step(h, static_cast<unsigned char>(c));
  return h;
}

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot read " + path.string());
  std::uint64_t h = kFnvOffset;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h = fnv1a_step(h, static_cast<unsigned char>(buf[i]));
    }
  }
  return h;
}

RunManifest::RunManifest(std::string command, std::string tool_version)
    : command_(std::move(command)), tool_version_(std::move(tool_version)) {}

void RunManifest::set(const std::string& key, const std::string& value) {
  entries_.emplace_back(key, value);
}

void RunManifest::set(const std::string& key, std::uint64_t value) {
  entries_.emplace_back(key, std::to_string(value));
}

void RunManifest::set(const std::string& key, double value) {
  std::ostringstream s;
  s << std::setprecision(17) << value;
  entries_.emplace_back(key, s.str());
}

void RunManifest::add_input(const std::string& label, const std::filesystem::path& path) {
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a_file(path);
  entries_.emplace_back("input." + label, path.string());
  entries_.emplace_back("input." + label + ".fnv1a", hex.str());
}

std::uint64_t RunManifest::digest() const {
  std::vector<std::pair<std::string, std::string>> sorted = entries_;
  sorted.emplace_back("command", command_);
  sorted.emplace_back("tool", tool_version_);
  std::sort(sorted.begin(), sorted.end());
  std::uint64_t h = kFnvOffset;
  for (const auto& [k, v] : sorted) {
    for (char c : k) h = fnv1a_step(h, static_cast<unsigned char>(c));
    h = fnv1a_step(h, '=');
    for (char c : v) h = fnv1a_step(h, static_cast<unsigned char>(c));
    h = fnv1a_step(h, '\n');
  }
  return h;
}

std::string RunManifest::text() const {
  std::ostringstream out;
  out << "tool=" << tool_version_ << '\n';
  out << "command=" << command_ << '\n';
  out << "written=" << timestamp_utc() << '\n';
  for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << digest();
  out << "digest=" << hex.str() << '\n';
  return out.str();
}

void RunManifest::write_beside(const std::filesystem::path& output) const {
  std::filesystem::path path = output;
  path += ".manifest";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
  out << text();
  if (!out) throw Error(ErrorKind::IoFailure, "failed writing " + path.string());
}

}  // namespace cinediff
