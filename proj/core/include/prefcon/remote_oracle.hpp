#pragma once

#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "prefcon/oracle.hpp"

namespace prefcon {

/// Chat-completion client. POSTs
///   {"model", "messages": [{"role": "user", "content": prompt}], "temperature", "max_tokens"}
/// and returns choices[0].message.content verbatim. The bearer token is read
/// from the environment variable named by the descriptor; an empty variable
/// name sends no Authorization header.
class RemoteOracle final : public Oracle {
 public:
  explicit RemoteOracle(OracleDescriptor descriptor);
  ~RemoteOracle() override;

  std::string answer(const OracleRequest& request) const override;
  const OracleDescriptor& descriptor() const override { return descriptor_; }
  bool keyed_by_task() const override { return false; }

  static nlohmann::json request_body(const OracleRequest& request, std::string_view model);
  /// Throws OracleError(kMalformedPayload) when the body lacks the content.
  static std::string extract_content(std::string_view body);

 private:
  struct Endpoint;
  struct Gate;

  OracleDescriptor descriptor_;
  std::unique_ptr<Endpoint> endpoint_;
  std::unique_ptr<Gate> gate_;
};

}  // namespace prefcon
