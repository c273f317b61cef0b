#include "privacycube/gateway/app.hpp"

#include <unistd.h>

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "privacycube/core/blocking_queue.hpp"
#include "privacycube/flow/capture.hpp"
#include "privacycube/flow/coalesce.hpp"
#include "privacycube/gateway/mqtt.hpp"
#include "privacycube/gateway/state_stream.hpp"
#include "privacycube/notify/notification.hpp"
#include "privacycube/sim/schedule.hpp"

namespace privacycube::gateway {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

double wall_seconds() {
  return std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch()).count();
}

flow::CaptureSource capture_source(const GatewayConfig& c) {
  switch (c.source) {
    case SourceKind::FlowLog:
      return flow::FlowLog{c.source_arg};
    case SourceKind::Live:
      return flow::LiveInterface{c.source_arg};
    default:
      return flow::CaptureFile{c.source_arg};
  }
}

// Feeds packets through the assembler until the reader runs dry.
void pump_packets(flow::PacketReader& reader, const policy::PolicyCorpus& corpus,
                  BlockingQueue<PipelineEvent>& queue, const StopSignal& stop) {
  flow::FlowAssembler assembler{flow::LocalNetwork(corpus.local_prefixes())};
  double last_ts = 0.0;
  while (!stop.requested()) {
    auto packet = reader.next();
    if (!packet) break;
    last_ts = packet->timestamp;
    if (auto record = assembler.push(*packet)) queue.push(std::move(*record));
  }
  const auto& stats = reader.stats();
  if (stats.parse_errors > 0) {
    queue.push(SourceError{std::to_string(stats.parse_errors) + " malformed records skipped", last_ts});
  }
  spdlog::info("source done: {} packets, {} skipped, {} malformed, {} flows", stats.records,
               stats.skipped, stats.parse_errors, assembler.stats().episodes);
}

// Replays a schedule. With `realtime`, simulated seconds are paced against
// the wall clock and the cube is ticked every second in between.
void pump_simulation(const sim::SimSchedule& schedule, const policy::PolicyCorpus& corpus,
                     double t_end, bool realtime, BlockingQueue<PipelineEvent>& queue,
                     const StopSignal& stop) {
  const auto events = sim::generate(schedule, corpus, t_end);
  const auto transitions = sim::room_transitions(schedule, t_end);
  const auto started = Clock::now();

  auto wait_until = [&](double t) {
    if (!realtime) return !stop.requested();
    for (;;) {
      const double elapsed = std::chrono::duration<double>(Clock::now() - started).count();
      if (elapsed >= t) return !stop.requested();
      const double step = std::min(1.0, t - elapsed);
      if (stop.wait_for(std::chrono::duration<double>(step))) return false;
      queue.push(Tick{std::min(t, elapsed + step)});
    }
  };

  if (auto room = sim::room_at(schedule, 0.0)) queue.push(RoomChange{*room, 0.0});
  std::size_t next_transition = 0;
  for (const auto& e : events) {
    while (next_transition < transitions.size() && transitions[next_transition].timestamp <= e.timestamp) {
      const auto& t = transitions[next_transition++];
      if (!wait_until(t.timestamp)) return;
      queue.push(RoomChange{t.room, t.timestamp});
    }
    if (!wait_until(e.timestamp)) return;
    queue.push(e.flow);
  }
  for (; next_transition < transitions.size(); ++next_transition) {
    const auto& t = transitions[next_transition];
    if (!wait_until(t.timestamp)) return;
    queue.push(RoomChange{t.room, t.timestamp});
  }
  spdlog::info("simulation done: {} events, {} room transitions", events.size(), transitions.size());
}

}  // namespace

RunReport run_gateway(const GatewayConfig& config, const StopSignal& stop, RunHooks hooks) {
  RunReport report;
  auto fail = [&report](int code, const std::string& message) {
    report.exit_code = code;
    report.diagnostic = message;
    spdlog::error("{}", message);
    return report;
  };

  std::shared_ptr<const policy::PolicyCorpus> corpus;
  std::shared_ptr<const geo::Ip2cTable> table;
  auto continents = geo::ContinentMap::builtin();
  std::optional<sim::SimSchedule> schedule;
  try {
    check_inputs(config);
    corpus = std::make_shared<const policy::PolicyCorpus>(policy::load_corpus_file(config.corpus_path));
    if (config.continents_path) continents.apply_overrides(read_file(*config.continents_path));
    table = std::make_shared<const geo::Ip2cTable>(geo::load_ip2c(read_file(config.ip2c_path)));
    if (config.source == SourceKind::Simulate) {
      schedule = sim::load_schedule_file(config.source_arg, *corpus);
    }
  } catch (const policy::CorpusError& e) {
    return fail(kExitInput, config.corpus_path + ": " + e.what());
  } catch (const geo::Ip2cError& e) {
    return fail(kExitInput, config.ip2c_path + ": " + e.what());
  } catch (const sim::ScheduleError& e) {
    return fail(kExitInput, config.source_arg + ": " + e.what());
  } catch (const std::exception& e) {
    return fail(kExitInput, e.what());
  }

  double sim_end = 0.0;
  if (schedule) {
    sim_end = config.sim_end_seconds.value_or(schedule->rotation_period());
    if (!(sim_end > 0)) return fail(kExitConfig, "sim_end_seconds is required for a schedule without rotation");
  }

  std::unique_ptr<flow::PacketReader> reader;
  if (!schedule) {
    try {
      reader = flow::open_source(capture_source(config));
    } catch (const std::exception& e) {
      return fail(kExitInput, config.source_arg + ": " + e.what());
    }
  }

  std::optional<EventLog> log;
  try {
    log.emplace(EventLog::open_run(config.log_dir));
  } catch (const std::exception& e) {
    return fail(kExitInput, "cannot create event log under " + config.log_dir + ": " + e.what());
  }
  report.run_dir = log->run_dir();
  spdlog::info("event log: {}", report.run_dir.string());

  geo::GeoResolver resolver(table, continents);
  Broker broker;
  Pipeline pipeline(corpus, resolver, broker, &*log,
                    PipelineOptions{config.emit_window_seconds, config.led_timeout_seconds});
  BlockingQueue<PipelineEvent> queue;

  auto taps = broker.subscribe(cube::kTapsTopic, [&queue](std::string_view, const std::string& payload) {
    queue.push(cube::tap_from_json(json::parse(payload)));
  });

  std::unique_ptr<StateStreamServer> stream;
  if (config.listen) {
    stream = std::make_unique<StateStreamServer>(
        broker, *config.listen, [&queue](policy::RoomId room) { queue.push(RoomChange{room, 0.0}); });
    try {
      stream->start();
    } catch (const std::exception& e) {
      return fail(kExitConfig, "cannot listen on " + config.listen->host + ":" +
                                   std::to_string(config.listen->port) + ": " + e.what());
    }
    report.listen_port = stream->port();
    spdlog::info("state stream on ws://{}:{}", config.listen->host, report.listen_port);
  }

  std::unique_ptr<mqtt::Client> mqtt_client;
  std::vector<Broker::Subscription> mirrors;
  if (config.broker) {
    mqtt_client = std::make_unique<mqtt::Client>(config.broker->host, config.broker->port,
                                                 "privacycube-gateway-" + std::to_string(::getpid()));
    try {
      mqtt_client->connect();
    } catch (const std::exception& e) {
      return fail(kExitInput, "cannot reach broker " + config.broker->host + ":" +
                                  std::to_string(config.broker->port) + ": " + e.what());
    }
    mqtt_client->subscribe(std::string(cube::kTapsTopic),
                           [&broker](const std::string& topic, const std::string& payload) {
                             try {
                               broker.publish(topic, payload);
                             } catch (const TopicError& e) {
                               spdlog::warn("dropped tap from broker: {}", e.what());
                             }
                           });
    for (auto topic : {notify::kNotificationsTopic, cube::kStateTopic}) {
      mirrors.push_back(broker.subscribe(topic, [&client = *mqtt_client](std::string_view t,
                                                                         const std::string& p) {
        if (client.connected()) client.publish(t, p);
      }));
    }
  }

  const bool live = config.source == SourceKind::Live;
  const bool paced = live || (schedule && config.realtime);
  const double start_ts = live ? wall_seconds() : 0.0;

  pipeline.handle(GeoRefreshEvent{{true, table->source_version(), {}}, start_ts});
  pipeline.start(start_ts);

  std::unique_ptr<geo::GeoRefresher> refresher;
  if (paced) {
    refresher = std::make_unique<geo::GeoRefresher>(
        resolver, geo::file_provider(config.ip2c_path),
        std::chrono::milliseconds(static_cast<long long>(config.ip2c_refresh_seconds * 1000)),
        [&queue, live](const geo::RefreshOutcome& outcome) {
          queue.push(GeoRefreshEvent{outcome, live ? wall_seconds() : 0.0});
        });
    refresher->start();
  }

  if (hooks.on_ready) hooks.on_ready(report);

  std::atomic<bool> finished{false};
  std::thread producer([&] {
    if (schedule) {
      pump_simulation(*schedule, *corpus, sim_end, config.realtime, queue, stop);
    } else {
      pump_packets(*reader, *corpus, queue, stop);
    }
    if (config.linger && !paced) {
      spdlog::info("input exhausted; serving until stopped");
      while (!stop.wait_for(std::chrono::seconds(1))) {
      }
    }
    finished.store(true);
    queue.close();
  });
  std::thread watcher([&] {
    while (!finished.load()) {
      if (stop.wait_for(std::chrono::milliseconds(100))) {
        if (reader) reader->stop();
        return;
      }
    }
  });
  std::thread ticker;
  if (live) {
    ticker = std::thread([&] {
      while (!finished.load() && !stop.wait_for(std::chrono::seconds(1))) {
        queue.push(Tick{wall_seconds()});
      }
    });
  }

  while (auto event = queue.pop()) {
    try {
      pipeline.handle(*event);
    } catch (const std::exception& e) {
      spdlog::warn("record dropped: {}", e.what());
      pipeline.handle(SourceError{e.what(), 0.0});
    }
  }

  producer.join();
  watcher.join();
  if (ticker.joinable()) ticker.join();
  if (refresher) refresher->stop();
  mirrors.clear();
  if (mqtt_client) mqtt_client->close();
  if (stream) stream->stop();
  taps.reset();

  report.stats = pipeline.stats();
  report.final_snapshot = pipeline.last_snapshot();
  spdlog::info("done: {} flows, {} notifications, {} state changes, {} errors", report.stats.flows,
               report.stats.notifications, report.stats.state_changes, report.stats.errors);
  return report;
}

}  // namespace privacycube::gateway
