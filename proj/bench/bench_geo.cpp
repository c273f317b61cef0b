// Batch geo lookup: parallel vs serial binary search vs a linear scan.

#include <benchmark/benchmark.h>

#include <random>

#include "privacycube/geo/ip2c.hpp"

using namespace privacycube;
using namespace privacycube::geo;

namespace {

Ip2cTable make_table(std::size_t rows) {
  std::vector<Ip2cEntry> entries;
  const std::uint32_t step = 0xE0000000u / static_cast<std::uint32_t>(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::uint32_t start = 0x01000000u + static_cast<std::uint32_t>(i) * step;
    const char code[3] = {"USDEJPBRAUFR"[2 * (i % 6)], "USDEJPBRAUFR"[2 * (i % 6) + 1], 0};
    entries.push_back({start, start + step / 2, *CountryCode::parse(code)});
  }
  return Ip2cTable(std::move(entries), "bench");
}

std::vector<Ipv4> make_ips(std::size_t n) {
  std::mt19937_64 rng(2);
  std::vector<Ipv4> ips;
  ips.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ips.emplace_back(static_cast<std::uint32_t>(rng()));
  return ips;
}

const Ip2cTable& table() {
  static const Ip2cTable t = make_table(200000);
  return t;
}

void BM_ResolveAll(benchmark::State& state) {
  const auto ips = make_ips(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(resolve_all(table(), ips));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ResolveAllSerial(benchmark::State& state) {
  const auto ips = make_ips(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(resolve_all_serial(table(), ips));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LinearScan(benchmark::State& state) {
  const auto ips = make_ips(static_cast<std::size_t>(state.range(0)));
  const auto& entries = table().entries();
  for (auto _ : state) {
    std::size_t hits = 0;
    for (auto ip : ips) {
      for (const auto& e : entries) {
        if (e.range_start <= ip.value() && ip.value() <= e.range_end) {
          ++hits;
          break;
        }
      }
    }
    benchmark::DoNotOptimize(hits);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_ResolveAll)->Arg(1 << 16);
BENCHMARK(BM_ResolveAllSerial)->Arg(1 << 16);
BENCHMARK(BM_LinearScan)->Arg(256);

BENCHMARK_MAIN();
