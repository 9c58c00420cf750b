#include "prefcon/remote_oracle.hpp"

#include <cstdlib>
#include <semaphore>

#include <httplib.h>

namespace prefcon {

struct RemoteOracle::Endpoint {
  std::string scheme_host_port;  // e.g. "https://api.example.com:443"
  std::string path;
};

struct RemoteOracle::Gate {
  explicit Gate(std::ptrdiff_t slots) : slots(slots) {}
  std::counting_semaphore<1024> slots;
};

RemoteOracle::RemoteOracle(OracleDescriptor descriptor)
    : descriptor_(std::move(descriptor)) {
  if (descriptor_.kind != OracleKind::kRemote) {
    throw std::invalid_argument("RemoteOracle needs a remote descriptor");
  }
  descriptor_.validate();
  const auto& url = descriptor_.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw std::invalid_argument("endpoint '" + url + "' has no scheme");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  endpoint_ = std::make_unique<Endpoint>(Endpoint{
      url.substr(0, path_start),
      path_start == std::string::npos ? std::string("/") : url.substr(path_start)});
  gate_ = std::make_unique<Gate>(
      static_cast<std::ptrdiff_t>(std::min<std::size_t>(descriptor_.max_in_flight, 1024)));
}

RemoteOracle::~RemoteOracle() = default;

nlohmann::json RemoteOracle::request_body(const OracleRequest& request, std::string_view model) {
  return nlohmann::json{
      {"model", model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.decode.temperature},
      {"max_tokens", request.decode.max_tokens},
  };
}

std::string RemoteOracle::extract_content(std::string_view body) {
  const auto parsed = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) {
    throw OracleError(OracleErrorKind::kMalformedPayload, "response body is not JSON");
  }
  const auto choices = parsed.find("choices");
  if (choices == parsed.end() || !choices->is_array() || choices->empty()) {
    throw OracleError(OracleErrorKind::kMalformedPayload, "response has no choices");
  }
  const auto& first = (*choices)[0];
  if (!first.is_object() || !first.contains("message") || !first["message"].is_object()) {
    throw OracleError(OracleErrorKind::kMalformedPayload, "first choice has no message");
  }
  const auto& content = first["message"].value("content", nlohmann::json());
  if (!content.is_string()) {
    throw OracleError(OracleErrorKind::kMalformedPayload, "message content is not a string");
  }
  return content.get<std::string>();
}

std::string RemoteOracle::answer(const OracleRequest& request) const {
  httplib::Headers headers;
  if (!descriptor_.api_key_env.empty()) {
    const char* key = std::getenv(descriptor_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw OracleError(OracleErrorKind::kConfiguration,
                        "environment variable " + descriptor_.api_key_env + " is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  const std::string body = request_body(request, descriptor_.model).dump();

  httplib::Result result = [&] {
    gate_->slots.acquire();
    struct Release {
      Gate& gate;
      ~Release() { gate.slots.release(); }
    } release{*gate_};
    httplib::Client client(endpoint_->scheme_host_port);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(descriptor_.timeout);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    return client.Post(endpoint_->path, headers, body, "application/json");
  }();

  if (!result) {
    throw OracleError(OracleErrorKind::kTransport,
                      "request to " + descriptor_.endpoint + " failed: " +
                          httplib::to_string(result.error()));
  }
  const int status = result->status;
  if (status == 429) {
    throw OracleError(OracleErrorKind::kRateLimited, "rate limited (HTTP 429)");
  }
  if (status >= 500) {
    throw OracleError(OracleErrorKind::kServerError, "server error (HTTP " + std::to_string(status) + ")");
  }
  if (status < 200 || status >= 300) {
    throw OracleError(OracleErrorKind::kClientError, "request rejected (HTTP " + std::to_string(status) +
                                                         "): " + result->body.substr(0, 200));
  }
  return extract_content(result->body);
}

}  // namespace prefcon
