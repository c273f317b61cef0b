#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "privacycube/gateway/state_stream.hpp"

namespace privacycube::gateway {

inline constexpr std::string_view kConfigEnvVar = "PRIVACYCUBE_CONFIG";

enum class SourceKind { Capture, FlowLog, Live, Simulate };

struct BrokerAddress {
  std::string host;
  std::uint16_t port = 1883;
};

// "host:port"; nullopt when malformed.
std::optional<std::pair<std::string, std::uint16_t>> parse_host_port(std::string_view text);

struct GatewayConfig {
  std::string corpus_path;
  std::string ip2c_path;
  std::optional<std::string> continents_path;

  SourceKind source = SourceKind::Capture;
  std::string source_arg;  // file path, interface name or schedule path

  std::optional<BrokerAddress> broker;  // external MQTT broker
  std::optional<ListenAddress> listen;  // WebSocket state stream
  std::string log_dir = "logs";

  double emit_window_seconds = 60.0;
  double led_timeout_seconds = 30.0;
  double ip2c_refresh_seconds = 86400.0;

  // Simulation only: end time (defaults to one full rotation) and pacing.
  std::optional<double> sim_end_seconds;
  bool realtime = false;
  // File and unpaced simulation modes: keep serving after the input ends.
  bool linger = false;
};

// Bad keys, types or values. Exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing or unreadable input files. Exit status 3.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Keys: corpus_path, ip2c_path, continents_path, exactly one of capture /
// flowlog / live / simulate, broker, listen, log_dir, emit_window_seconds,
// led_timeout_seconds, ip2c_refresh_seconds, sim_end_seconds, realtime,
// linger. Relative paths are resolved against `base_dir`. Throws ConfigError.
GatewayConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

// Reads a JSON config file. Throws InputError when unreadable, ConfigError
// when malformed.
nlohmann::json read_config_file(const std::filesystem::path& path);

// Throws InputError naming the first missing input path.
void check_inputs(const GatewayConfig& config);

}  // namespace privacycube::gateway
