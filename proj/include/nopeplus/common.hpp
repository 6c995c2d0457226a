#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace nopeplus {

/// Error categories surfaced by the library. Each maps to one failure mode
/// named in the module contracts; the CLI translates them to exit codes.
enum class ErrorCode {
  NonPositiveDepth,
  DegenerateConfiguration,
  UnknownImageId,
  DisconnectedGraph,
  LengthMismatch,
  ShapeMismatch,
  TooSmall,
  NonFiniteLoss,
  InfeasibleSpec,
  MissingData,
  IncompatibleCheckpoint,
  InvalidConfig,
  IoError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Thrown by maximum_spanning_tree on a disconnected graph; carries the
/// node partition so callers can report which images lack matches.
class DisconnectedGraphError : public Error {
 public:
  DisconnectedGraphError(std::string what, std::vector<std::vector<int>> parts)
      : Error(ErrorCode::DisconnectedGraph, std::move(what)),
        components(std::move(parts)) {}
  std::vector<std::vector<int>> components;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

// Raw little-endian float32 blob i/o (image buffers, checkpoints).
std::vector<float> read_f32_blob(const std::filesystem::path& path);
void write_f32_blob(const std::filesystem::path& path,
                    const std::vector<float>& data);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

}  // namespace nopeplus
