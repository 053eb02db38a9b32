#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cinediff {

inline constexpr const char* kToolVersion = "cinediff 0.1.0";

std::uint64_t fnv1a_bytes(std::span<const std::byte> bytes);
std::uint64_t fnv1a_text(const std::string& text);
/// Streaming digest of a file's raw bytes; throws IoFailure if unreadable.
std::uint64_t fnv1a_file(const std::filesystem::path& path);

/// Sidecar provenance record written beside every produced artifact as
/// `<output>.manifest`: a stable key=value text file capturing the command,
/// configuration digest, seeds, and input digests so any output can be
/// traced back to the exact invocation that made it.
class RunManifest {
 public:
  RunManifest(std::string command, std::string tool_version = kToolVersion);

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, std::uint64_t value);
  void set(const std::string& key, double value);
  void add_input(const std::string& label, const std::filesystem::path& path);

  /// Digest over the sorted key=value entries (inputs included).
  std::uint64_t digest() const;
  std::string text() const;
  void write_beside(const std::filesystem::path& output) const;

 private:
  std::string command_;
  std::string tool_version_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace cinediff
