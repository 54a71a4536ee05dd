#include <limits>
#include <random>

#include "stlkit/store.hpp"

namespace stlkit::retrieval {

TooFewPoints::TooFewPoints(std::size_t points, std::size_t k)
    : Error("cannot form " + std::to_string(k) + " clusters from " + std::to_string(points) +
            " points") {}

namespace {

// Explicit draws so results do not depend on the standard library's
// distribution implementations.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<Vector> seed_centers(const std::vector<Vector>& points,
                                 const std::vector<std::string>& ids, std::size_t k,
                                 std::mt19937_64& rng) {
  const std::size_t n = points.size();
  std::vector<bool> chosen(n, false);
  std::vector<Vector> centers;
  std::size_t first = static_cast<std::size_t>(rng() % n);
  chosen[first] = true;
  centers.push_back(points[first]);

  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = squared_distance(points[i], points[first]);

  while (centers.size() < k) {
    double total = 0;
    for (double d : nearest) total += d;
    std::size_t pick = n;
    if (total > 0) {
      const double target = uniform01(rng) * total;
      double cumulative = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (nearest[i] <= 0) continue;
        cumulative += nearest[i];
        pick = i;
        if (cumulative > target) break;
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i] && (pick == n || ids[i] < ids[pick])) pick = i;
      }
    }
    chosen[pick] = true;
    centers.push_back(points[pick]);
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(points[i], points[pick]));
    }
  }
  return centers;
}

std::vector<std::size_t> assign(const std::vector<Vector>& points,
                                const std::vector<Vector>& centroids) {
  std::vector<std::size_t> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      const double d = squared_distance(points[i], centroids[c]);
      if (d < best) {
        best = d;
        out[i] = c;
      }
    }
  }
  return out;
}

void fill_empty(const std::vector<Vector>& points, std::vector<Vector>& centroids,
                std::vector<std::size_t>& assignment) {
  const std::size_t k = centroids.size();
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<std::size_t> sizes(k, 0);
    for (auto a : assignment) ++sizes[a];
    if (sizes[c] > 0) continue;
    std::size_t far = points.size();
    double far_d = -1;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (sizes[assignment[i]] < 2) continue;
      const double d = squared_distance(points[i], centroids[assignment[i]]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    assignment[far] = c;
    centroids[c] = points[far];
  }
}

}  // namespace

Clustering kmeans(const std::vector<Vector>& points, const std::vector<std::string>& ids,
                  std::size_t k, std::uint64_t seed, std::size_t max_iterations) {
  if (ids.size() != points.size()) throw Error("kmeans: ids and points differ in length");
  if (k == 0 || points.size() < k) throw TooFewPoints(points.size(), k);

  std::mt19937_64 rng(seed);
  Clustering result;
  result.k = k;
  result.centroids = seed_centers(points, ids, k, rng);

  std::vector<std::size_t> current;
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    auto next = assign(points, result.centroids);
    fill_empty(points, result.centroids, next);
    if (iter > 0 && next == current) break;
    current = std::move(next);

    const std::size_t dim = points[0].size();
    std::vector<Vector> sums(k, Vector(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      ++counts[current[i]];
      for (std::size_t d = 0; d < dim; ++d) sums[current[i]][d] += points[i][d];
    }
    double sse = 0;
    for (std::size_t c = 0; c < k; ++c) {
      for (auto& x : sums[c]) x /= static_cast<double>(counts[c]);
      result.centroids[c] = std::move(sums[c]);
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
      sse += squared_distance(points[i], result.centroids[current[i]]);
    }
    result.sse_history.push_back(sse);
    ++result.iterations;
  }
  result.assignments = current;

  result.exemplar_indices.assign(k, points.size());
  std::vector<double> best(k, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t c = current[i];
    const double d = squared_distance(points[i], result.centroids[c]);
    const std::size_t prev = result.exemplar_indices[c];
    if (d < best[c] || (d == best[c] && ids[i] < ids[prev])) {
      best[c] = d;
      result.exemplar_indices[c] = i;
    }
  }
  for (auto i : result.exemplar_indices) result.exemplar_ids.push_back(ids[i]);
  return result;
}

Clustering kmeans(const KnowledgeStore& store, std::size_t k, std::uint64_t seed,
                  EmbedField field) {
  std::vector<std::string> ids;
  for (const auto& p : store.pairs()) ids.push_back(p.id);
  return kmeans(store.vectors(field), ids, k, seed);
}

}  // namespace stlkit::retrieval
