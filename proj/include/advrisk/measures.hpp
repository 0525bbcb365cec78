#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "advrisk/ground.hpp"

namespace advrisk {

// Class-0 and class-1 masses per ground point. Totals need not sum to one.
struct TwoClassMeasure {
  std::vector<double> mass0;
  std::vector<double> mass1;

  double total0() const;
  double total1() const;
  double total() const { return total0() + total1(); }
  std::size_t size() const { return mass0.size(); }
};

// Throws NegativeMass on a negative or non-finite entry and
// Error(kValidationError) when lengths differ from n.
void validate_measure(const TwoClassMeasure& measure, std::size_t n);

struct Transport {
  std::uint32_t source;
  std::uint32_t target;
  double mass;

  bool operator==(const Transport&) const = default;
};

// Sparse transport plan sorted by (source, target) with positive masses.
struct Coupling {
  std::vector<Transport> entries;

  bool operator==(const Coupling&) const = default;
};

// Sorts entries, merges duplicates and drops zero masses.
Coupling normalize_coupling(std::vector<Transport> entries);

Coupling identity_coupling(std::span<const double> p);

// Target marginal m(j) = sum_i w(i, j).
std::vector<double> pushforward(const Coupling& c, std::size_t n);
// Source marginal sum_j w(i, j).
std::vector<double> source_marginal(const Coupling& c, std::size_t n);

// True when every entry pairs a point with one of its epsilon-neighbors.
bool supported_in_ball(const Coupling& c, const GroundSet& g);

// sum over entries of w(i, j) * field(j), with 0 * inf = 0.
double transported_integral(const Coupling& c, std::span<const double> field);

// True iff a coupling of p and q supported on pairs at distance <= epsilon
// exists. Decided by max-flow on the bipartite support graph; accepts when the
// flow reaches total - 1e-10 * total. Throws MassMismatch when totals differ
// by more than 1e-9 * max(1, total).
bool winf_feasible(const GroundSet& g, std::span<const double> p, std::span<const double> q,
                   double epsilon);

// Smallest pairwise source-target distance at which winf_feasible holds.
double winf_distance(const GroundSet& g, std::span<const double> p, std::span<const double> q);

// Each source sends all of its mass to the lowest-index maximizer of field
// over its neighbors.
Coupling greedy_attack(const GroundSet& g, std::span<const double> field,
                       std::span<const double> p);

// Each source splits its mass over neighbors with weights proportional to
// exp((score_j - max score) / temperature). Infinite maxima split evenly over
// the maximizers.
Coupling soft_attack(const GroundSet& g, std::span<const double> scores,
                     std::span<const double> p, double temperature);

}  // namespace advrisk
