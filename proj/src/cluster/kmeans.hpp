#pragma once

#include <cstdint>
#include <vector>

#include "cluster/event_classes.hpp"

namespace aep::cluster {

struct KmeansTrace {
  std::vector<double> sse;  // after each Lloyd iteration
  int iterations = 0;
};

// k-means++ seeding, Lloyd iterations until center movement < 1e-8 or 200
// iterations, then single-point reassignment descent to shed the shallow
// local optima Lloyd cannot leave. Empty clusters are reseeded to the point
// farthest from its assigned center. `tau` is recorded on the result for
// provenance only.
EventClasses kmeans(const std::vector<std::vector<double>>& data, int k, std::uint64_t seed,
                    double tau = 0.0, KmeansTrace* trace = nullptr);

// Within-cluster sum of squared distances to the nearest center.
double kmeans_sse(const std::vector<std::vector<double>>& data,
                  const std::vector<std::vector<double>>& centers);

}  // namespace aep::cluster
