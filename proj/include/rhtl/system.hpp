#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rhtl/formula.hpp"

namespace rhtl {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point& a, const Point& b);

struct Edge {
  std::size_t to;
  double weight;
};

/// Weighted deterministic transition system (Q, q0, Delta, omega, Pi, h).
/// Outgoing edges of each state are kept sorted by target index.
struct TransitionSystem {
  std::vector<std::string> states;
  std::size_t initial = 0;
  std::vector<std::vector<Edge>> edges;
  std::vector<std::string> ap;
  std::vector<Observation> obs;
  std::vector<std::optional<Point>> coords;

  std::size_t num_states() const { return states.size(); }
  std::size_t num_transitions() const;
  std::optional<std::size_t> find(const std::string& id) const;
  bool has_coordinates() const;
};

struct Violation {
  enum class Kind {
    kBlockingState,
    kNonPositiveWeight,
    kUnknownObservation,
    kBadInitialState,
    kBadEndpoint,
    kDuplicateState,
    kShapeMismatch,
  };
  Kind kind;
  std::string message;
};

std::string to_string(Violation::Kind kind);

/// Checks the non-blocking, positive-weight and labeling invariants. An empty
/// report means the system is valid.
std::vector<Violation> validate(const TransitionSystem& ts);

/// Throws InputError carrying the first violation if `ts` is invalid.
void require_valid(const TransitionSystem& ts);

struct GridSpec {
  int rows = 10;
  int cols = 10;
  double cell = 10.0;
  double edge_cutoff = 15.0;
  std::vector<std::string> ap;
  std::map<std::string, Observation> labels;
  std::string initial = "r0c0";
};

/// Lattice system: state "r<i>c<j>" at (j*cell, i*cell); an edge joins every
/// pair of distinct vertices closer than `edge_cutoff`, weighted by their
/// Euclidean distance.
TransitionSystem grid_dts(const GridSpec& spec);

/// `dts-v1` JSON format.
std::string system_to_json(const TransitionSystem& ts);
TransitionSystem system_from_json(const std::string& text);

/// Label assignment file for gen-grid: {"ap": [...], "initial": id,
/// "labels": {id: [prop, ...]}}. Grid dimensions are left as in `base`.
GridSpec grid_labels_from_json(const std::string& text, GridSpec base = {});

}  // namespace rhtl
