#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "percnet/geometry.hpp"
#include "percnet/rng.hpp"

namespace percnet {

namespace stream_tag {
inline constexpr std::uint64_t positions = 1;
inline constexpr std::uint64_t destinations = 2;
inline constexpr std::uint64_t lattice = 3;
inline constexpr std::uint64_t trial = 4;
}  // namespace stream_tag

// Realization of a unit-intensity Poisson point process restricted to the disk
// of radius sqrt(n) centered at the origin. Immutable after creation.
struct NetworkInstance {
  double scale_n = 0.0;
  double region_radius = 0.0;  // = sqrt(scale_n)
  std::vector<Vec2> nodes;
  std::uint64_t seed = 0;
};

// Source i sends to dest_of[i]; every node is a source exactly once.
struct TrafficPattern {
  std::vector<std::size_t> dest_of;
};

// Draws N ~ Poisson(pi*n), then N i.i.d. uniform points on the disk.
// Identical (n, seed) reproduces the instance bit-for-bit.
inline NetworkInstance sample_network(double n, std::uint64_t seed) {
  if (!(n > 0)) throw std::invalid_argument("sample_network: n must be > 0");
  NetworkInstance inst;
  inst.scale_n = n;
  inst.region_radius = std::sqrt(n);
  inst.seed = seed;
  Rng rng(derive_seed(seed, stream_tag::positions));
  const std::uint64_t count = rng.poisson(M_PI * n);
  inst.nodes.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    // Uniform on the disk via sqrt-radius transform.
    const double r = inst.region_radius * std::sqrt(rng.uniform());
    const double theta = rng.uniform(0.0, 2.0 * M_PI);
    inst.nodes.push_back({r * std::cos(theta), r * std::sin(theta)});
  }
  return inst;
}

// Each source's destination is uniform over the other N-1 nodes, independent
// across sources.
inline TrafficPattern assign_destinations(const NetworkInstance& inst,
                                          std::uint64_t seed) {
  const std::size_t n = inst.nodes.size();
  if (n < 2)
    throw std::invalid_argument(
        "assign_destinations: need at least 2 nodes for a traffic pattern");
  Rng rng(derive_seed(seed, stream_tag::destinations));
  TrafficPattern tp;
  tp.dest_of.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t d = rng.uniform_index(n - 1);
    if (d >= i) ++d;  // skip self
    tp.dest_of[i] = d;
  }
  return tp;
}

struct NodeCountCheck {
  bool within_bound = false;
  std::uint64_t count = 0;
};

// Checks the event N_n <= 2*pi*n (twice the Poisson mean pi*n); only the
// event frequency is reported, no tail-probability estimate.
inline NodeCountCheck node_count_check(const NetworkInstance& inst) {
  NodeCountCheck r;
  r.count = inst.nodes.size();
  r.within_bound = double(r.count) <= 2.0 * M_PI * inst.scale_n;
  return r;
}

inline nlohmann::json instance_to_json(const NetworkInstance& inst,
                                       const TrafficPattern* tp = nullptr) {
  nlohmann::json j;
  j["n"] = inst.scale_n;
  j["seed"] = inst.seed;
  auto& nodes = j["nodes"] = nlohmann::json::array();
  for (const auto& p : inst.nodes) nodes.push_back({p.x, p.y});
  if (tp) j["dest_of"] = tp->dest_of;
  return j;
}

inline NetworkInstance instance_from_json(const nlohmann::json& j,
                                          TrafficPattern* tp = nullptr) {
  NetworkInstance inst;
  inst.scale_n = j.at("n").get<double>();
  inst.region_radius = std::sqrt(inst.scale_n);
  inst.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& p : j.at("nodes"))
    inst.nodes.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  if (tp && j.contains("dest_of"))
    tp->dest_of = j.at("dest_of").get<std::vector<std::size_t>>();
  return inst;
}

}  // namespace percnet
