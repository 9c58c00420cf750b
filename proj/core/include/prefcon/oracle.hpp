#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "prefcon/protocol.hpp"

namespace prefcon {

struct DecodeParams {
  double temperature = 0.0;
  int max_tokens = 256;

  bool operator==(const DecodeParams&) const = default;
};

struct OracleRequest {
  std::string prompt;
  DecodeParams decode;
  std::string task_key;
  std::string template_id;
  /// Structured task behind the prompt. Synthetic oracles answer from it;
  /// remote oracles ignore it.
  const TaskInstance* task = nullptr;
};

enum class OracleKind { kTotalOrder, kPositionalBias, kRandom, kRemote };

std::string_view to_string(OracleKind kind);

struct OracleDescriptor {
  OracleKind kind = OracleKind::kTotalOrder;
  std::uint64_t seed = 0;
  double bias_p = 0.0;

  // Remote only.
  std::string model;
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string api_key_env = "OPENAI_API_KEY";
  std::chrono::milliseconds timeout{60000};
  std::size_t max_in_flight = 4;

  /// Parses "kind[:key=value,...]", e.g. "positional_bias:p=0.5,seed=3" or
  /// "remote:model=gpt-4o,endpoint=http://localhost:8080/v1/chat/completions".
  /// Throws std::invalid_argument on unknown kinds, keys or bad values.
  static OracleDescriptor parse(std::string_view spec);
  static OracleDescriptor from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// Stable text form; part of every cache key.
  std::string canonical() const;

  void validate() const;
};

enum class OracleErrorKind {
  kTransport,         ///< connection failure or timeout
  kRateLimited,       ///< HTTP 429
  kServerError,       ///< HTTP 5xx
  kClientError,       ///< other HTTP 4xx
  kMalformedPayload,  ///< response body not in the expected shape
  kConfiguration,     ///< e.g. missing credentials
};

std::string_view to_string(OracleErrorKind kind);

class OracleError : public std::runtime_error {
 public:
  OracleError(OracleErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  OracleErrorKind kind() const { return kind_; }
  bool retryable() const {
    return kind_ == OracleErrorKind::kTransport || kind_ == OracleErrorKind::kRateLimited ||
           kind_ == OracleErrorKind::kServerError;
  }

 private:
  OracleErrorKind kind_;
};

/// Any black box that answers a prompt. Implementations must be safe to call
/// from several threads at once.
class Oracle {
 public:
  virtual ~Oracle() = default;

  /// Raw answer text. Throws OracleError on failure.
  virtual std::string answer(const OracleRequest& request) const = 0;
  virtual const OracleDescriptor& descriptor() const = 0;
  /// Whether answers depend on the task key in addition to the prompt; if
  /// so the key is part of the cache digest.
  virtual bool keyed_by_task() const = 0;
};

/// Builds the oracle a descriptor names.
std::unique_ptr<Oracle> make_oracle(const OracleDescriptor& descriptor);

}  // namespace prefcon
