#include "cluster/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "common/error.hpp"

namespace aep::cluster {

namespace {

int nearest(const std::vector<std::vector<double>>& centers, const std::vector<double>& p) {
  int best = 0;
  double best_d = squared_distance(p, centers[0]);
  for (std::size_t i = 1; i < centers.size(); ++i) {
    const double d = squared_distance(p, centers[i]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::vector<std::vector<double>> seed_pp(const std::vector<std::vector<double>>& data, int k,
                                         std::mt19937_64& rng) {
  std::vector<std::vector<double>> centers;
  std::uniform_int_distribution<std::size_t> first(0, data.size() - 1);
  centers.push_back(data[first(rng)]);
  std::vector<double> d2(data.size());
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      double best = std::numeric_limits<double>::max();
      for (const auto& c : centers) best = std::min(best, squared_distance(data[i], c));
      d2[i] = best;
      total += best;
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> unif(0.0, total);
      double r = unif(rng);
      while (pick + 1 < data.size() && r > d2[pick]) r -= d2[pick++];
      // Never pick a zero-distance duplicate if anything else is available.
      if (d2[pick] == 0.0)
        for (std::size_t i = 0; i < data.size(); ++i)
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
    } else {
      pick = first(rng);  // all points coincide with centers already
    }
    centers.push_back(data[pick]);
  }
  return centers;
}

// Single-point reassignment descent (Hartigan moves). Lloyd halts at the
// nearest assignment fixed point; moving one point at a time accounts for
// the centroid shift the move itself causes, so it escapes the shallow
// local optima Lloyd gets stuck in. That precision is what lets a handful
// of restarts reach the global optimum on small corpora.
void refine_by_reassignment(const std::vector<std::vector<double>>& data, int k,
                            std::vector<std::vector<double>>& centers,
                            std::vector<int>& assign) {
  if (k < 2) return;
  const std::size_t dim = data[0].size();
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    assign[i] = nearest(centers, data[i]);
    ++counts[static_cast<std::size_t>(assign[i])];
  }
  for (int c = 0; c < k; ++c)
    if (counts[static_cast<std::size_t>(c)] == 0) return;  // degenerate corpus

  const int max_passes = 100;
  for (int pass = 0; pass < max_passes; ++pass) {
    bool moved = false;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const int a = assign[i];
      const double na = counts[static_cast<std::size_t>(a)];
      if (na <= 1.0) continue;  // never empty a cluster
      const double removal =
          na / (na - 1.0) *
          squared_distance(data[i], centers[static_cast<std::size_t>(a)]);
      int best_b = -1;
      double best_delta = -1e-12;  // strict improvement only
      for (int b = 0; b < k; ++b) {
        if (b == a) continue;
        const double nb = counts[static_cast<std::size_t>(b)];
        const double delta =
            nb / (nb + 1.0) *
                squared_distance(data[i], centers[static_cast<std::size_t>(b)]) -
            removal;
        if (delta < best_delta) {
          best_delta = delta;
          best_b = b;
        }
      }
      if (best_b < 0) continue;
      const double nb = counts[static_cast<std::size_t>(best_b)];
      for (std::size_t d = 0; d < dim; ++d) {
        centers[static_cast<std::size_t>(a)][d] =
            (na * centers[static_cast<std::size_t>(a)][d] - data[i][d]) / (na - 1.0);
        centers[static_cast<std::size_t>(best_b)][d] =
            (nb * centers[static_cast<std::size_t>(best_b)][d] + data[i][d]) /
            (nb + 1.0);
      }
      --counts[static_cast<std::size_t>(a)];
      ++counts[static_cast<std::size_t>(best_b)];
      assign[i] = best_b;
      moved = true;
    }
    if (!moved) break;
  }

  // The incremental updates accumulate rounding drift; recompute the final
  // centroids exactly.
  for (int c = 0; c < k; ++c)
    std::fill(centers[static_cast<std::size_t>(c)].begin(),
              centers[static_cast<std::size_t>(c)].end(), 0.0);
  for (std::size_t i = 0; i < data.size(); ++i)
    for (std::size_t d = 0; d < dim; ++d)
      centers[static_cast<std::size_t>(assign[i])][d] += data[i][d];
  for (int c = 0; c < k; ++c)
    for (std::size_t d = 0; d < dim; ++d)
      centers[static_cast<std::size_t>(c)][d] /=
          counts[static_cast<std::size_t>(c)];
}

}  // namespace

double kmeans_sse(const std::vector<std::vector<double>>& data,
                  const std::vector<std::vector<double>>& centers) {
  double sse = 0.0;
  for (const auto& p : data) sse += squared_distance(p, centers[static_cast<std::size_t>(nearest(centers, p))]);
  return sse;
}

EventClasses kmeans(const std::vector<std::vector<double>>& data, int k, std::uint64_t seed,
                    double tau, KmeansTrace* trace) {
  if (k < 1) throw InputError("kmeans: k must be >= 1");
  if (static_cast<int>(data.size()) < k) throw InputError("kmeans: fewer points than k");
  const std::size_t dim = data[0].size();
  for (const auto& p : data)
    if (p.size() != dim) throw InputError("kmeans: inconsistent point dims");

  std::mt19937_64 rng(seed);
  auto centers = seed_pp(data, k, rng);
  std::vector<int> assign(data.size());

  for (int iter = 0; iter < 200; ++iter) {
    for (std::size_t i = 0; i < data.size(); ++i) assign[i] = nearest(centers, data[i]);

    std::vector<std::vector<double>> next(static_cast<std::size_t>(k),
                                          std::vector<double>(dim, 0.0));
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
      auto& acc = next[static_cast<std::size_t>(assign[i])];
      for (std::size_t d = 0; d < dim; ++d) acc[d] += data[i][d];
      ++counts[static_cast<std::size_t>(assign[i])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        for (std::size_t d = 0; d < dim; ++d)
          next[static_cast<std::size_t>(c)][d] /= counts[static_cast<std::size_t>(c)];
      } else {
        // Reseed an empty cluster to the point farthest from its center.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
          const double d =
              squared_distance(data[i], centers[static_cast<std::size_t>(assign[i])]);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        next[static_cast<std::size_t>(c)] = data[far];
      }
    }

    double moved = 0.0;
    for (int c = 0; c < k; ++c)
      moved = std::max(moved, std::sqrt(squared_distance(
                                  centers[static_cast<std::size_t>(c)],
                                  next[static_cast<std::size_t>(c)])));
    centers = std::move(next);
    if (trace) {
      trace->sse.push_back(kmeans_sse(data, centers));
      trace->iterations = iter + 1;
    }
    if (moved < 1e-8) break;
  }

  refine_by_reassignment(data, k, centers, assign);
  if (trace) trace->sse.push_back(kmeans_sse(data, centers));
  return EventClasses(std::move(centers), tau);
}

}  // namespace aep::cluster
