#include <chrono>
#include <limits>
#include <random>
#include <set>

#include "dkheap/harness.hpp"

namespace dkheap::harness {

namespace {

constexpr Key kUnreached = std::numeric_limits<Key>::max();

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

Graph random_connected_graph(std::uint64_t seed, std::uint32_t vertices, std::size_t edges) {
  if (vertices == 0) throw std::invalid_argument("random_connected_graph: need at least one vertex");
  if (edges + 1 < vertices) throw std::invalid_argument("random_connected_graph: too few edges to connect the graph");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Key> weight(1, 1000);
  Graph g;
  g.vertices = vertices;
  g.adjacency.resize(vertices);
  auto add = [&](std::uint32_t a, std::uint32_t b) {
    const Key w = weight(rng);
    g.adjacency[a].emplace_back(b, w);
    g.adjacency[b].emplace_back(a, w);
    ++g.edges;
  };
  for (std::uint32_t v = 1; v < vertices; ++v) add(v, std::uniform_int_distribution<std::uint32_t>(0, v - 1)(rng));
  if (vertices > 1) {
    std::uniform_int_distribution<std::uint32_t> any(0, vertices - 1);
    while (g.edges < edges) {
      const std::uint32_t a = any(rng);
      const std::uint32_t b = any(rng);
      if (a != b) add(a, b);
    }
  }
  return g;
}

Graph star_graph(std::span<const Key> weights) {
  Graph g;
  g.vertices = static_cast<std::uint32_t>(weights.size() + 1);
  g.adjacency.resize(g.vertices);
  for (std::uint32_t i = 0; i < weights.size(); ++i) {
    g.adjacency[0].emplace_back(i + 1, weights[i]);
    g.adjacency[i + 1].emplace_back(0, weights[i]);
    ++g.edges;
  }
  return g;
}

std::vector<Key> dijkstra_with_heap(const Graph& g, std::uint32_t source, Heap& heap) {
  std::vector<Key> dist(g.vertices, kUnreached);
  std::vector<Handle> handle(g.vertices);
  std::vector<bool> done(g.vertices, false);
  // Handles are looked up by vertex; map node slots back to vertices.
  std::vector<std::uint32_t> vertex_of;

  auto enqueue = [&](std::uint32_t v, Key d) {
    const Handle h = heap.insert(d);
    if (vertex_of.size() <= h.index) vertex_of.resize(h.index + 1);
    vertex_of[h.index] = v;
    handle[v] = h;
  };

  dist[source] = 0;
  enqueue(source, 0);
  while (auto top = heap.delete_min()) {
    const std::uint32_t u = vertex_of[top->handle.index];
    done[u] = true;
    for (const auto& [v, w] : g.adjacency[u]) {
      if (done[v]) continue;
      const Key nd = top->key + w;
      if (dist[v] == kUnreached) {
        dist[v] = nd;
        enqueue(v, nd);
      } else if (nd < dist[v]) {
        dist[v] = nd;
        heap.decrease_key(handle[v], nd);
      }
    }
  }
  return dist;
}

std::vector<Key> dijkstra_reference(const Graph& g, std::uint32_t source) {
  std::vector<Key> dist(g.vertices, kUnreached);
  std::vector<bool> done(g.vertices, false);
  dist[source] = 0;
  for (std::uint32_t round = 0; round < g.vertices; ++round) {
    std::uint32_t u = g.vertices;
    for (std::uint32_t v = 0; v < g.vertices; ++v)
      if (!done[v] && dist[v] != kUnreached && (u == g.vertices || dist[v] < dist[u])) u = v;
    if (u == g.vertices) break;
    done[u] = true;
    for (const auto& [v, w] : g.adjacency[u])
      if (!done[v] && (dist[v] == kUnreached || dist[u] + w < dist[v])) dist[v] = dist[u] + w;
  }
  return dist;
}

BenchVerdict dijkstra_bench(const Graph& g, Strategy strategy) {
  BenchVerdict out;
  Heap heap(HeapOptions{.strategy = strategy});
  auto t0 = std::chrono::steady_clock::now();
  const auto got = dijkstra_with_heap(g, 0, heap);
  out.heap_ms = elapsed_ms(t0);
  out.stats = heap.stats();
  t0 = std::chrono::steady_clock::now();
  const auto want = dijkstra_reference(g, 0);
  out.reference_ms = elapsed_ms(t0);
  for (std::uint32_t v = 0; v < g.vertices; ++v) {
    if (got[v] != want[v]) {
      out.pass = false;
      out.mismatch_vertex = v;
      break;
    }
  }
  return out;
}

BenchVerdict dijkstra_bench(std::uint64_t graph_seed, std::uint32_t vertices, std::size_t edges, Strategy strategy) {
  return dijkstra_bench(random_connected_graph(graph_seed, vertices, edges), strategy);
}

}  // namespace dkheap::harness
