#include "privacycube/gateway/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace privacycube::gateway {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr std::array<std::string_view, 17> kKnownKeys{
    "corpus_path",         "ip2c_path",           "continents_path",    "capture",
    "flowlog",             "live",                "simulate",           "broker",
    "listen",              "log_dir",             "emit_window_seconds", "led_timeout_seconds",
    "ip2c_refresh_seconds", "sim_end_seconds",    "realtime",           "linger",
    "$schema"};

std::string string_key(const json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (!v.is_string() || v.get<std::string>().empty()) {
    throw ConfigError(std::string(key) + ": expected a non-empty string");
  }
  return v.get<std::string>();
}

std::string path_key(const json& doc, const char* key, const fs::path& base) {
  fs::path p = string_key(doc, key);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.string();
}

double positive_key(const json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc.at(key);
  if (!v.is_number()) throw ConfigError(std::string(key) + ": expected a number");
  const double d = v.get<double>();
  if (!(d > 0)) throw ConfigError(std::string(key) + ": must be > 0");
  return d;
}

bool bool_key(const json& doc, const char* key) {
  if (!doc.contains(key)) return false;
  const auto& v = doc.at(key);
  if (!v.is_boolean()) throw ConfigError(std::string(key) + ": expected true or false");
  return v.get<bool>();
}

std::pair<std::string, std::uint16_t> endpoint_key(const json& doc, const char* key) {
  const auto text = string_key(doc, key);
  auto hp = parse_host_port(text);
  if (!hp) throw ConfigError(std::string(key) + ": expected host:port, got \"" + text + "\"");
  return *hp;
}

}  // namespace

std::optional<std::pair<std::string, std::uint16_t>> parse_host_port(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  const auto port_text = text.substr(colon + 1);
  unsigned port = 0;
  auto [end, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || end != port_text.data() + port_text.size() || port > 65535) {
    return std::nullopt;
  }
  return std::pair{std::string(text.substr(0, colon)), static_cast<std::uint16_t>(port)};
}

GatewayConfig parse_config(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
      throw ConfigError("unknown config key \"" + key + "\"");
    }
  }

  GatewayConfig c;
  if (!doc.contains("corpus_path")) throw ConfigError("corpus_path is required");
  if (!doc.contains("ip2c_path")) throw ConfigError("ip2c_path is required");
  c.corpus_path = path_key(doc, "corpus_path", base_dir);
  c.ip2c_path = path_key(doc, "ip2c_path", base_dir);
  if (doc.contains("continents_path")) c.continents_path = path_key(doc, "continents_path", base_dir);

  int sources = 0;
  const std::array<std::pair<const char*, SourceKind>, 4> kinds{{{"capture", SourceKind::Capture},
                                                                 {"flowlog", SourceKind::FlowLog},
                                                                 {"live", SourceKind::Live},
                                                                 {"simulate", SourceKind::Simulate}}};
  for (const auto& [key, kind] : kinds) {
    if (!doc.contains(key)) continue;
    ++sources;
    c.source = kind;
    c.source_arg = kind == SourceKind::Live ? string_key(doc, key) : path_key(doc, key, base_dir);
  }
  if (sources != 1) {
    throw ConfigError("exactly one of capture, flowlog, live, simulate is required (got " +
                      std::to_string(sources) + ")");
  }

  if (doc.contains("broker")) {
    auto [host, port] = endpoint_key(doc, "broker");
    c.broker = BrokerAddress{std::move(host), port};
  }
  if (doc.contains("listen")) {
    auto [host, port] = endpoint_key(doc, "listen");
    c.listen = ListenAddress{std::move(host), port};
  }
  if (doc.contains("log_dir")) c.log_dir = path_key(doc, "log_dir", base_dir);

  c.emit_window_seconds = positive_key(doc, "emit_window_seconds", c.emit_window_seconds);
  c.led_timeout_seconds = positive_key(doc, "led_timeout_seconds", c.led_timeout_seconds);
  c.ip2c_refresh_seconds = positive_key(doc, "ip2c_refresh_seconds", c.ip2c_refresh_seconds);
  if (doc.contains("sim_end_seconds")) {
    c.sim_end_seconds = positive_key(doc, "sim_end_seconds", 0.0);
  }
  c.realtime = bool_key(doc, "realtime");
  c.linger = bool_key(doc, "linger");
  if ((c.realtime || c.sim_end_seconds) && c.source != SourceKind::Simulate) {
    throw ConfigError("realtime and sim_end_seconds apply to simulate only");
  }
  return c;
}

json read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return json::parse(text.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void check_inputs(const GatewayConfig& config) {
  auto require_file = [](const std::string& what, const std::string& path) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) throw InputError(what + " not found: " + path);
  };
  require_file("corpus", config.corpus_path);
  require_file("ip2c table", config.ip2c_path);
  if (config.continents_path) require_file("continent overrides", *config.continents_path);
  switch (config.source) {
    case SourceKind::Capture:
      require_file("capture", config.source_arg);
      break;
    case SourceKind::FlowLog:
      require_file("flow log", config.source_arg);
      break;
    case SourceKind::Simulate:
      require_file("schedule", config.source_arg);
      break;
    case SourceKind::Live:
      break;
  }
}

}  // namespace privacycube::gateway
