#pragma once

#include <atomic>
#include <chrono>

#include <json.hpp>

#include "slotsim/performer.hpp"
#include "slotsim/profile.hpp"

namespace slotsim {

// Test double standing in for a model server: counts calls and sleeps a fixed latency.
class CountingPerformer final : public Performer {
public:
  explicit CountingPerformer(std::chrono::microseconds latency = std::chrono::microseconds{0})
      : latency_(latency) {}

  Utterance perform(const PerformerRequest& req) override;
  [[nodiscard]] std::string_view backend_id() const override { return "counting"; }
  [[nodiscard]] long calls() const { return calls_.load(); }
  void reset() { calls_ = 0; }

private:
  std::chrono::microseconds latency_;
  std::atomic<long> calls_{0};
  TemplatePerformer voice_;
};

struct BenchmarkConfig {
  double latency_ms = 100.0;
  int stages = 5;
  int beam = 3;
  int turns = 10;
  std::uint64_t seed = 7;
};

struct PipelineStats {
  long calls_per_turn = 0;
  long total_calls = 0;
  double total_wall_ms = 0.0;
  double wall_ms_per_turn = 0.0;
  double median_turn_ms = 0.0;
  double p95_turn_ms = 0.0;
};

struct BenchmarkReport {
  BenchmarkConfig config;
  PipelineStats single_call;
  PipelineStats multi_stage;
  double speedup = 0.0;  // multi-stage wall time / single-call wall time
};

// Runs T turns through the single-call pipeline (one spin, one performer call)
// and through a simulated multi-stage refinement chain (k stages x b candidates
// per turn), both against a sleeping, counting performer.
// Throws INVALID_ARGUMENT unless latency >= 0 and stages, beam, turns >= 1.
BenchmarkReport run_benchmark(const BenchmarkConfig& config);

StudentProfile benchmark_profile();

nlohmann::json benchmark_report_json(const BenchmarkReport& r);

}  // namespace slotsim
