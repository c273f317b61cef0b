#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "privacycube/core/snapshot_cell.hpp"
#include "privacycube/geo/ip2c.hpp"

namespace privacycube::geo {

inline constexpr std::chrono::seconds kDefaultRefreshPeriod{24 * 60 * 60};

struct VersionedResult {
  GeoResult result;
  std::string source_version;
};

// Lookups read one table snapshot; install() swaps the whole table at once.
class GeoResolver {
 public:
  explicit GeoResolver(std::shared_ptr<const Ip2cTable> table,
                       ContinentMap continents = ContinentMap::builtin());

  GeoResult resolve(Ipv4 ip) const;
  VersionedResult resolve_versioned(Ipv4 ip) const;

  std::shared_ptr<const Ip2cTable> table() const { return table_.load(); }
  void install(std::shared_ptr<const Ip2cTable> table) { table_.store(std::move(table)); }

  const ContinentMap& continents() const { return continents_; }

 private:
  SnapshotCell<Ip2cTable> table_;
  ContinentMap continents_;
};

// Returns the candidate CSV text; throws on failure.
using TableProvider = std::function<std::string()>;

TableProvider file_provider(std::string path);

struct RefreshOutcome {
  bool installed = false;
  std::string source_version;  // version serving lookups afterwards
  std::string error;
};

// Loads a candidate from `provider`. On any failure returns `current` and
// fills `error`.
std::shared_ptr<const Ip2cTable> refresh_table(const TableProvider& provider,
                                               std::shared_ptr<const Ip2cTable> current,
                                               std::string* error = nullptr);

// Periodically refreshes a resolver's table on a background thread.
class GeoRefresher {
 public:
  using Listener = std::function<void(const RefreshOutcome&)>;

  GeoRefresher(GeoResolver& resolver, TableProvider provider,
               std::chrono::milliseconds period = kDefaultRefreshPeriod, Listener listener = {});
  ~GeoRefresher();

  GeoRefresher(const GeoRefresher&) = delete;
  GeoRefresher& operator=(const GeoRefresher&) = delete;

  void start();
  void stop();
  RefreshOutcome refresh_now();

  std::chrono::milliseconds period() const { return period_; }

 private:
  void loop();

  GeoResolver& resolver_;
  TableProvider provider_;
  std::chrono::milliseconds period_;
  Listener listener_;
  std::mutex mutex_;
  std::condition_variable wake_;
  bool stopping_ = false;
  std::thread worker_;
};

}  // namespace privacycube::geo
