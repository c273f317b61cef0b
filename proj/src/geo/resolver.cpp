#include "privacycube/geo/resolver.hpp"

#include <fstream>
#include <sstream>

namespace privacycube::geo {

GeoResolver::GeoResolver(std::shared_ptr<const Ip2cTable> table, ContinentMap continents)
    : table_(std::move(table)), continents_(std::move(continents)) {}

GeoResult GeoResolver::resolve(Ipv4 ip) const {
  return resolve_versioned(ip).result;
}

VersionedResult GeoResolver::resolve_versioned(Ipv4 ip) const {
  const auto table = table_.load();
  return {resolve_country(*table, ip, continents_), table->source_version()};
}

TableProvider file_provider(std::string path) {
  return [path = std::move(path)] {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
}

std::shared_ptr<const Ip2cTable> refresh_table(const TableProvider& provider,
                                               std::shared_ptr<const Ip2cTable> current,
                                               std::string* error) {
  try {
    return std::make_shared<const Ip2cTable>(load_ip2c(provider()));
  } catch (const std::exception& e) {
    if (error != nullptr) *error = e.what();
    return current;
  }
}

GeoRefresher::GeoRefresher(GeoResolver& resolver, TableProvider provider,
                           std::chrono::milliseconds period, Listener listener)
    : resolver_(resolver),
      provider_(std::move(provider)),
      period_(period),
      listener_(std::move(listener)) {}

GeoRefresher::~GeoRefresher() { stop(); }

void GeoRefresher::start() {
  std::lock_guard lock(mutex_);
  if (worker_.joinable()) return;
  stopping_ = false;
  worker_ = std::thread([this] { loop(); });
}

void GeoRefresher::stop() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  wake_.notify_all();
  if (worker_.joinable()) worker_.join();
}

RefreshOutcome GeoRefresher::refresh_now() {
  const auto current = resolver_.table();
  RefreshOutcome outcome;
  auto next = refresh_table(provider_, current, &outcome.error);
  outcome.installed = next != current;
  if (outcome.installed) resolver_.install(next);
  outcome.source_version = next->source_version();
  if (listener_) listener_(outcome);
  return outcome;
}

void GeoRefresher::loop() {
  std::unique_lock lock(mutex_);
  while (!stopping_) {
    if (wake_.wait_for(lock, period_, [this] { return stopping_; })) break;
    lock.unlock();
    refresh_now();
    lock.lock();
  }
}

}  // namespace privacycube::geo
