#pragma once

#include <atomic>
#include <memory>
#include <utility>

namespace privacycube {

// Holds an immutable value that readers load as a whole and writers replace
// as a whole. A reader's shared_ptr keeps its version alive after a swap.
template <class T>
class SnapshotCell {
 public:
  SnapshotCell() = default;
  explicit SnapshotCell(std::shared_ptr<const T> initial) : value_(std::move(initial)) {}

  SnapshotCell(const SnapshotCell&) = delete;
  SnapshotCell& operator=(const SnapshotCell&) = delete;

  std::shared_ptr<const T> load() const { return std::atomic_load(&value_); }

  void store(std::shared_ptr<const T> next) { std::atomic_store(&value_, std::move(next)); }

 private:
  std::shared_ptr<const T> value_;
};

}  // namespace privacycube
