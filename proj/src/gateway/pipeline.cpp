#include "privacycube/gateway/pipeline.hpp"

#include <algorithm>

#include "privacycube/flow/attribute.hpp"
#include "privacycube/notify/notification.hpp"

namespace privacycube::gateway {

using nlohmann::json;

Pipeline::Pipeline(std::shared_ptr<const policy::PolicyCorpus> corpus,
                   const geo::GeoResolver& resolver, Broker& broker, EventLog* log,
                   PipelineOptions options)
    : corpus_(std::move(corpus)),
      resolver_(resolver),
      broker_(broker),
      log_(log),
      emit_(options.emit_window_seconds),
      cube_(corpus_, cube::CubeConfig{options.led_timeout_seconds}) {}

void Pipeline::start(double ts) {
  clock_ = ts;
  last_snapshot_.clear();
  publish_state_if_changed(ts);
}

void Pipeline::handle(const PipelineEvent& event) {
  std::visit(
      [this](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, flow::FlowRecord>) {
          on_flow(e);
        } else if constexpr (std::is_same_v<T, cube::TapEvent>) {
          on_tap(e);
        } else if constexpr (std::is_same_v<T, RoomChange>) {
          advance(e.timestamp);
          cube_.select_room(e.room);
          publish_state_if_changed(clock_);
        } else if constexpr (std::is_same_v<T, Tick>) {
          advance(e.now);
          publish_state_if_changed(clock_);
        } else if constexpr (std::is_same_v<T, GeoRefreshEvent>) {
          json payload{{"installed", e.outcome.installed},
                       {"source_version", e.outcome.source_version}};
          if (!e.outcome.error.empty()) payload["error"] = e.outcome.error;
          log(RecordKind::GeoRefresh, e.timestamp, std::move(payload));
        } else if constexpr (std::is_same_v<T, SourceError>) {
          ++stats_.errors;
          log(RecordKind::Error, e.timestamp, json{{"message", e.message}});
        }
      },
      event);
}

void Pipeline::on_flow(const flow::FlowRecord& flow) {
  ++stats_.flows;
  // Expire before applying, so a device silent past the timeout relights
  // with a fresh contribution.
  advance(flow.timestamp);
  publish_state_if_changed(clock_);

  const auto attribution = flow::attribute_flow(*corpus_, flow);
  const auto* attributed = std::get_if<flow::AttributedFlow>(&attribution);
  log(RecordKind::Flow, flow.timestamp,
      json{{"flow", flow::to_json(flow)},
           {"device_id", attributed ? json(attributed->device_id) : json(nullptr)}});
  if (!attributed) return;
  ++stats_.attributed;

  if (!emit_.should_emit(attributed->device_id, flow.timestamp)) {
    ++stats_.suppressed;
    cube_.touch(attributed->device_id, flow.timestamp);
    return;
  }

  const auto* profile = corpus_->find(attributed->device_id);
  const auto n = notify::build_notification(*profile, flow, resolver_.resolve(flow.remote_ip));
  auto bytes = notify::encode_notification(n);
  log(RecordKind::Notification, flow.timestamp, json::parse(bytes));
  broker_.publish(notify::kNotificationsTopic, bytes);
  ++stats_.notifications;

  cube_.apply_notification(n, flow.timestamp);
  publish_state_if_changed(clock_);
}

void Pipeline::on_tap(const cube::TapEvent& tap) {
  ++stats_.taps;
  log(RecordKind::Tap, clock_, cube::to_json(tap));
  cube_.apply_tap(tap);
  publish_state_if_changed(clock_);
}

void Pipeline::advance(double now) {
  clock_ = std::max(clock_, now);
  cube_.tick(clock_);
}

void Pipeline::publish_state_if_changed(double ts) {
  auto snapshot = cube_.snapshot_json();
  auto text = snapshot.dump();
  if (text == last_snapshot_) return;
  ++stats_.state_changes;
  log(RecordKind::StateChange, ts, std::move(snapshot));
  broker_.publish(cube::kStateTopic, text);
  last_snapshot_ = std::move(text);
}

void Pipeline::log(RecordKind kind, double ts, json payload) {
  if (log_ != nullptr) log_->append(kind, ts, std::move(payload));
}

}  // namespace privacycube::gateway
