// privacycube-gateway: watches home traffic and drives the cube.
//
//   privacycube-gateway --config gateway.json
//   privacycube-gateway --corpus c.json --ip2c t.csv --capture home.pcap --listen 127.0.0.1:8765
//   privacycube-gateway --verify logs/run-A logs/run-B

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "privacycube/gateway/app.hpp"

namespace gw = privacycube::gateway;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int verify(const std::vector<std::string>& logs) {
  try {
    const auto r = gw::replay_verify(logs[0], logs[1]);
    if (r.equal) {
      std::cout << "equal\n";
      return gw::kExitOk;
    }
    std::cout << "diverged at seq " << (r.seq ? std::to_string(*r.seq) : "?") << ": " << r.detail
              << "\n";
    return gw::kExitDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gw::kExitInput;
  }
}

// Waits for SIGINT/SIGTERM on a dedicated thread; all other threads inherit
// the blocked mask.
class SignalWatcher {
 public:
  explicit SignalWatcher(gw::StopSignal& stop) {
    sigemptyset(&set_);
    sigaddset(&set_, SIGINT);
    sigaddset(&set_, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set_, nullptr);
    thread_ = std::thread([this, &stop] {
      const timespec poll{0, 200'000'000};
      while (!done_.load()) {
        if (sigtimedwait(&set_, nullptr, &poll) > 0) {
          spdlog::info("shutdown requested");
          stop.request();
          return;
        }
      }
    });
  }

  ~SignalWatcher() {
    done_.store(true);
    thread_.join();
  }

 private:
  sigset_t set_;
  std::atomic<bool> done_{false};
  std::thread thread_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PrivacyCube gateway"};

  std::string config_path;
  std::string capture, flowlog, live, simulate, corpus, ip2c, continents, broker, listen, log_dir;
  double emit_window = 0, led_timeout = 0, sim_end = 0;
  bool realtime = false, linger = false, verbose = false;
  std::vector<std::string> verify_logs;

  app.add_option("--config", config_path, "JSON config file (falls back to $PRIVACYCUBE_CONFIG)");
  auto* sources = app.add_option_group("source");
  sources->add_option("--capture", capture, "pcap file");
  sources->add_option("--flowlog", flowlog, "JSONL flow log");
  sources->add_option("--live", live, "network interface to sniff");
  sources->add_option("--simulate", simulate, "simulation schedule JSON");
  sources->require_option(0, 1);
  app.add_option("--corpus", corpus, "policy corpus JSON");
  app.add_option("--ip2c", ip2c, "IP-range to country CSV");
  app.add_option("--continents", continents, "country,continent override CSV");
  app.add_option("--broker", broker, "external MQTT broker host:port");
  app.add_option("--listen", listen, "WebSocket state stream host:port");
  app.add_option("--log-dir", log_dir, "event log root directory");
  app.add_option("--emit-window", emit_window, "per-device notification window, seconds");
  app.add_option("--led-timeout", led_timeout, "seconds of silence before a device goes idle");
  app.add_option("--sim-end", sim_end, "simulation end time, simulated seconds");
  app.add_flag("--realtime", realtime, "pace the simulation against the wall clock");
  app.add_flag("--linger", linger, "keep serving after the input is exhausted");
  app.add_option("--verify", verify_logs, "compare two event logs and exit")->expected(2);
  app.add_flag("-v,--verbose", verbose, "debug logging");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : gw::kExitConfig;
  }
  spdlog::set_default_logger(spdlog::default_logger());
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  if (!verify_logs.empty()) return verify(verify_logs);

  if (config_path.empty()) {
    if (const char* env = std::getenv(std::string(gw::kConfigEnvVar).c_str())) config_path = env;
  }

  gw::GatewayConfig config;
  try {
    json doc = json::object();
    fs::path base;
    if (!config_path.empty()) {
      doc = gw::read_config_file(config_path);
      if (!doc.is_object()) throw gw::ConfigError(config_path + ": expected a JSON object");
      base = fs::absolute(config_path).parent_path();
    }
    auto set_path = [&doc](const char* key, const std::string& v) {
      if (!v.empty()) doc[key] = fs::absolute(v).string();
    };
    const bool source_given = !capture.empty() || !flowlog.empty() || !live.empty() || !simulate.empty();
    if (source_given) {
      for (auto key : {"capture", "flowlog", "live", "simulate"}) doc.erase(key);
    }
    set_path("capture", capture);
    set_path("flowlog", flowlog);
    if (!live.empty()) doc["live"] = live;
    set_path("simulate", simulate);
    set_path("corpus_path", corpus);
    set_path("ip2c_path", ip2c);
    set_path("continents_path", continents);
    set_path("log_dir", log_dir);
    if (!broker.empty()) doc["broker"] = broker;
    if (!listen.empty()) doc["listen"] = listen;
    if (app.count("--emit-window")) doc["emit_window_seconds"] = emit_window;
    if (app.count("--led-timeout")) doc["led_timeout_seconds"] = led_timeout;
    if (app.count("--sim-end")) doc["sim_end_seconds"] = sim_end;
    if (realtime) doc["realtime"] = true;
    if (linger) doc["linger"] = true;
    config = gw::parse_config(doc, base);
  } catch (const gw::InputError& e) {
    spdlog::error("{}", e.what());
    return gw::kExitInput;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return gw::kExitConfig;
  }

  gw::StopSignal stop;
  SignalWatcher signals(stop);
  const auto report = gw::run_gateway(config, stop);
  if (report.exit_code == gw::kExitOk) std::cout << report.run_dir.string() << "\n";
  return report.exit_code;
}
