#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "rhtl/controller.hpp"
#include "rhtl/system.hpp"

namespace rhtl {

/// Time-varying reward field R(q, k) over the states of a system. The
/// process starts at k = 0 and moves forward one tick per advance().
class RewardProcess {
 public:
  virtual ~RewardProcess() = default;

  virtual std::size_t num_states() const = 0;
  int time() const { return time_; }

  /// R(q, k). Only the current tick is readable.
  double full_reward(std::size_t q, int k) const;

  /// Moves to tick k; throws InputError unless k == time() + 1.
  void advance(int k);

  /// Clears the reward at q for the rest of the current tick and onwards
  /// until the process refills it.
  virtual void consume(std::size_t q) = 0;

  /// Digest of the exogenous random stream drawn so far. Two processes with
  /// equal digests saw identical realizations regardless of consumption.
  virtual std::uint64_t stream_digest() const { return 0; }

  virtual std::unique_ptr<RewardProcess> clone() const = 0;

 protected:
  virtual double value(std::size_t q) const = 0;
  virtual void step() = 0;

 private:
  int time_ = 0;
};

struct CaseStudyConfig {
  double decay = 0.9;
  double respawn_probability = 0.05;
  double low = 10.0;
  double high = 25.0;
  std::uint64_t seed = 1;
};

/// Uniform initial rewards in [low, high]; positive rewards decay
/// geometrically, zero rewards respawn with a fixed probability per tick.
/// Every tick draws the same number of variates per state, so the stream does
/// not depend on what the controller consumes.
class CaseStudyRewards final : public RewardProcess {
 public:
  CaseStudyRewards(std::size_t num_states, const CaseStudyConfig& config);

  std::size_t num_states() const override { return values_.size(); }
  void consume(std::size_t q) override { values_.at(q) = 0.0; }
  std::uint64_t stream_digest() const override { return digest_; }
  std::unique_ptr<RewardProcess> clone() const override {
    return std::make_unique<CaseStudyRewards>(*this);
  }
  const CaseStudyConfig& config() const { return config_; }

 protected:
  double value(std::size_t q) const override { return values_.at(q); }
  void step() override;

 private:
  double uniform();

  CaseStudyConfig config_;
  std::mt19937_64 rng_;
  std::uint64_t digest_ = 14695981039346656037ull;
  std::vector<double> values_;
};

struct RewardEvent {
  int k;
  std::size_t state;
  double value;
};

/// Table-driven process: an event (k, q, v) sets R(q, .) to v from tick k on.
/// Values persist until consumed or overwritten.
class ScriptedRewards final : public RewardProcess {
 public:
  ScriptedRewards(std::size_t num_states, std::vector<RewardEvent> events);

  std::size_t num_states() const override { return values_.size(); }
  void consume(std::size_t q) override { values_.at(q) = 0.0; }
  std::unique_ptr<RewardProcess> clone() const override {
    return std::make_unique<ScriptedRewards>(*this);
  }

 protected:
  double value(std::size_t q) const override { return values_.at(q); }
  void step() override;

 private:
  void apply(int k);

  std::vector<RewardEvent> events_;
  std::vector<double> values_;
  int tick_ = 0;
};

/// CSV with rows `k,state,value` (optional header) resolved against `ts`.
std::vector<RewardEvent> reward_events_from_csv(const std::string& text, const TransitionSystem& ts);

/// Observation neighborhood N(q, k). Time-invariant here.
struct Neighborhood {
  enum class Policy { kAll, kMetric, kHops };

  Policy policy = Policy::kAll;
  double radius = 0.0;

  static Neighborhood all() { return {Policy::kAll, 0.0}; }
  static Neighborhood metric(double radius) { return {Policy::kMetric, radius}; }
  static Neighborhood hops(int radius) { return {Policy::kHops, static_cast<double>(radius)}; }

  /// Membership mask of the neighborhood centered at `center`.
  std::vector<char> members(const TransitionSystem& ts, std::size_t center) const;

  /// Parses "all", "metric:<r>" or "hops:<n>".
  static Neighborhood parse(const std::string& text);
  std::string to_string() const;
};

/// R_k: full reward inside the neighborhood of q_k, zero outside.
RewardSnapshot observe(const RewardProcess& rp, const Neighborhood& nb, const TransitionSystem& ts,
                       std::size_t qk, int k);

}  // namespace rhtl
