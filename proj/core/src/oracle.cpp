#include "prefcon/oracle.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include "prefcon/remote_oracle.hpp"
#include "prefcon/synthetic_oracle.hpp"

namespace prefcon {
namespace {

std::string shortest(double v) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

OracleKind parse_kind(std::string_view name) {
  for (auto k : {OracleKind::kTotalOrder, OracleKind::kPositionalBias, OracleKind::kRandom,
                 OracleKind::kRemote}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown oracle kind '" + std::string(name) + "'");
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw std::invalid_argument("oracle option " + std::string(key) + "='" + std::string(text) +
                                "' is not a number");
  }
  return value;
}

}  // namespace

std::string_view to_string(OracleKind kind) {
  switch (kind) {
    case OracleKind::kTotalOrder: return "total_order";
    case OracleKind::kPositionalBias: return "positional_bias";
    case OracleKind::kRandom: return "random";
    case OracleKind::kRemote: return "remote";
  }
  return "total_order";
}

std::string_view to_string(OracleErrorKind kind) {
  switch (kind) {
    case OracleErrorKind::kTransport: return "transport";
    case OracleErrorKind::kRateLimited: return "rate_limited";
    case OracleErrorKind::kServerError: return "server_error";
    case OracleErrorKind::kClientError: return "client_error";
    case OracleErrorKind::kMalformedPayload: return "malformed_payload";
    case OracleErrorKind::kConfiguration: return "configuration";
  }
  return "transport";
}

OracleDescriptor OracleDescriptor::parse(std::string_view spec) {
  OracleDescriptor d;
  const auto colon = spec.find(':');
  d.kind = parse_kind(spec.substr(0, colon));
  if (colon == std::string_view::npos) {
    d.validate();
    return d;
  }
  std::string_view rest = spec.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("oracle option '" + std::string(item) + "' is not key=value");
    }
    const auto key = item.substr(0, eq);
    const auto value = item.substr(eq + 1);
    if (key == "seed") {
      d.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "p" || key == "bias_p") {
      d.bias_p = parse_number<double>(key, value);
    } else if (key == "model") {
      d.model = value;
    } else if (key == "endpoint") {
      d.endpoint = value;
    } else if (key == "key_env") {
      d.api_key_env = value;
    } else if (key == "timeout_ms") {
      d.timeout = std::chrono::milliseconds(parse_number<long>(key, value));
    } else if (key == "max_in_flight") {
      d.max_in_flight = parse_number<std::size_t>(key, value);
    } else {
      throw std::invalid_argument("unknown oracle option '" + std::string(key) + "'");
    }
  }
  d.validate();
  return d;
}

OracleDescriptor OracleDescriptor::from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse(j.get<std::string>());
  if (!j.is_object()) throw std::invalid_argument("oracle must be a string or an object");
  static const std::array<std::string_view, 8> kKeys = {
      "kind", "seed", "bias_p", "model", "endpoint", "key_env", "timeout_ms", "max_in_flight"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      throw std::invalid_argument("unknown oracle field '" + key + "'");
    }
  }
  OracleDescriptor d;
  d.kind = parse_kind(j.at("kind").get<std::string>());
  d.seed = j.value("seed", d.seed);
  d.bias_p = j.value("bias_p", d.bias_p);
  d.model = j.value("model", d.model);
  d.endpoint = j.value("endpoint", d.endpoint);
  d.api_key_env = j.value("key_env", d.api_key_env);
  d.timeout = std::chrono::milliseconds(j.value("timeout_ms", d.timeout.count()));
  d.max_in_flight = j.value("max_in_flight", d.max_in_flight);
  d.validate();
  return d;
}

nlohmann::json OracleDescriptor::to_json() const {
  nlohmann::json j{{"kind", to_string(kind)}};
  switch (kind) {
    case OracleKind::kTotalOrder:
      break;
    case OracleKind::kPositionalBias:
      j["bias_p"] = bias_p;
      j["seed"] = seed;
      break;
    case OracleKind::kRandom:
      j["seed"] = seed;
      break;
    case OracleKind::kRemote:
      j["model"] = model;
      j["endpoint"] = endpoint;
      j["key_env"] = api_key_env;
      j["timeout_ms"] = timeout.count();
      j["max_in_flight"] = max_in_flight;
      break;
  }
  return j;
}

std::string OracleDescriptor::canonical() const {
  switch (kind) {
    case OracleKind::kTotalOrder:
      return "total_order";
    case OracleKind::kPositionalBias:
      return "positional_bias:p=" + shortest(bias_p) + ",seed=" + std::to_string(seed);
    case OracleKind::kRandom:
      return "random:seed=" + std::to_string(seed);
    case OracleKind::kRemote:
      return "remote:model=" + model + ",endpoint=" + endpoint;
  }
  return "total_order";
}

void OracleDescriptor::validate() const {
  if (kind == OracleKind::kPositionalBias && !(bias_p >= 0.0 && bias_p <= 1.0)) {
    throw std::invalid_argument("bias_p must lie in [0, 1], got " + shortest(bias_p));
  }
  if (kind == OracleKind::kRemote) {
    if (model.empty()) throw std::invalid_argument("remote oracle needs a model name");
    if (endpoint.find("://") == std::string::npos) {
      throw std::invalid_argument("remote endpoint '" + endpoint + "' is not a URL");
    }
    if (max_in_flight == 0) throw std::invalid_argument("max_in_flight must be positive");
    if (timeout.count() <= 0) throw std::invalid_argument("timeout must be positive");
  }
}

std::unique_ptr<Oracle> make_oracle(const OracleDescriptor& descriptor) {
  if (descriptor.kind == OracleKind::kRemote) return std::make_unique<RemoteOracle>(descriptor);
  return std::make_unique<SyntheticOracle>(descriptor);
}

}  // namespace prefcon
