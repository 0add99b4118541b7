#include "rhtl/environment.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <sstream>

namespace rhtl {

double RewardProcess::full_reward(std::size_t q, int k) const {
  if (k != time_) {
    throw InputError("reward requested for tick " + std::to_string(k) + " at tick " +
                     std::to_string(time_));
  }
  return value(q);
}

void RewardProcess::advance(int k) {
  if (k != time_ + 1) {
    throw InputError("out-of-order tick " + std::to_string(k) + " after " + std::to_string(time_));
  }
  step();
  time_ = k;
}

CaseStudyRewards::CaseStudyRewards(std::size_t num_states, const CaseStudyConfig& config)
    : config_(config), rng_(config.seed), values_(num_states, 0.0) {
  if (!(config.low <= config.high) || config.low < 0.0) {
    throw InputError("reward range must satisfy 0 <= low <= high");
  }
  if (!(config.decay >= 0.0 && config.decay <= 1.0)) throw InputError("decay must lie in [0, 1]");
  if (!(config.respawn_probability >= 0.0 && config.respawn_probability <= 1.0)) {
    throw InputError("respawn probability must lie in [0, 1]");
  }
  for (auto& v : values_) v = config_.low + (config_.high - config_.low) * uniform();
}

double CaseStudyRewards::uniform() {
  const std::uint64_t bits = rng_();
  for (int i = 0; i < 8; ++i) {
    digest_ ^= (bits >> (8 * i)) & 0xffu;
    digest_ *= 1099511628211ull;
  }
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

void CaseStudyRewards::step() {
  for (auto& v : values_) {
    const double spawn = uniform();
    const double amount = config_.low + (config_.high - config_.low) * uniform();
    if (v > 0.0) {
      v *= config_.decay;
    } else {
      v = 0.0;
      if (spawn < config_.respawn_probability) v = amount;
    }
  }
}

ScriptedRewards::ScriptedRewards(std::size_t num_states, std::vector<RewardEvent> events)
    : events_(std::move(events)), values_(num_states, 0.0) {
  for (const auto& ev : events_) {
    if (ev.state >= num_states) throw InputError("reward event for unknown state");
    if (ev.k < 0) throw InputError("reward event with negative tick");
    if (!(ev.value >= 0.0)) throw InputError("reward values must be nonnegative");
  }
  std::stable_sort(events_.begin(), events_.end(),
                   [](const RewardEvent& a, const RewardEvent& b) { return a.k < b.k; });
  apply(0);
}

void ScriptedRewards::apply(int k) {
  for (const auto& ev : events_) {
    if (ev.k == k) values_[ev.state] = ev.value;
  }
}

void ScriptedRewards::step() {
  ++tick_;
  apply(tick_);
}

std::vector<RewardEvent> reward_events_from_csv(const std::string& text, const TransitionSystem& ts) {
  std::vector<RewardEvent> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) {
      const auto b = field.find_first_not_of(" \t\r");
      const auto e = field.find_last_not_of(" \t\r");
      fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (fields.size() != 3) {
      throw InputError("reward file line " + std::to_string(line_no) + ": expected k,state,value");
    }
    if (fields[0] == "k") continue;  // header
    const auto q = ts.find(fields[1]);
    if (!q) throw InputError("reward file line " + std::to_string(line_no) + ": unknown state '" + fields[1] + "'");
    try {
      out.push_back({std::stoi(fields[0]), *q, std::stod(fields[2])});
    } catch (const std::exception&) {
      throw InputError("reward file line " + std::to_string(line_no) + ": bad number");
    }
  }
  return out;
}

std::vector<char> Neighborhood::members(const TransitionSystem& ts, std::size_t center) const {
  const std::size_t n = ts.num_states();
  std::vector<char> in(n, 0);
  switch (policy) {
    case Policy::kAll:
      std::fill(in.begin(), in.end(), 1);
      break;
    case Policy::kMetric: {
      if (!ts.has_coordinates()) {
        throw InputError("metric neighborhood needs state coordinates");
      }
      for (std::size_t q = 0; q < n; ++q) {
        in[q] = distance(*ts.coords[center], *ts.coords[q]) <= radius ? 1 : 0;
      }
      break;
    }
    case Policy::kHops: {
      std::vector<int> depth(n, -1);
      std::deque<std::size_t> queue{center};
      depth[center] = 0;
      while (!queue.empty()) {
        const auto q = queue.front();
        queue.pop_front();
        in[q] = 1;
        if (depth[q] >= static_cast<int>(radius)) continue;
        for (const auto& e : ts.edges[q]) {
          if (depth[e.to] < 0) {
            depth[e.to] = depth[q] + 1;
            queue.push_back(e.to);
          }
        }
      }
      break;
    }
  }
  in[center] = 1;
  return in;
}

Neighborhood Neighborhood::parse(const std::string& text) {
  if (text == "all") return all();
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string kind = text.substr(0, colon);
    const std::string arg = text.substr(colon + 1);
    try {
      if (kind == "metric") return metric(std::stod(arg));
      if (kind == "hops") return hops(std::stoi(arg));
    } catch (const std::exception&) {
    }
  }
  throw InputError("bad neighborhood '" + text + "' (expected all, metric:<r> or hops:<n>)");
}

std::string Neighborhood::to_string() const {
  std::ostringstream os;
  switch (policy) {
    case Policy::kAll: return "all";
    case Policy::kMetric: os << "metric:" << radius; break;
    case Policy::kHops: os << "hops:" << static_cast<int>(radius); break;
  }
  return os.str();
}

RewardSnapshot observe(const RewardProcess& rp, const Neighborhood& nb, const TransitionSystem& ts,
                       std::size_t qk, int k) {
  if (qk >= ts.num_states()) throw InputError("observer state out of range");
  if (rp.num_states() != ts.num_states()) throw InputError("reward process does not match the system");
  const auto in = nb.members(ts, qk);
  RewardSnapshot snap(ts.num_states(), 0.0);
  for (std::size_t q = 0; q < snap.size(); ++q) {
    if (in[q]) snap[q] = rp.full_reward(q, k);
  }
  return snap;
}

}  // namespace rhtl
