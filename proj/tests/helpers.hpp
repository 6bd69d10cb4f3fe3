#ifndef EXARRAY_TESTS_HELPERS_HPP
#define EXARRAY_TESTS_HELPERS_HPP

// Input generators and independent oracles shared by the test binaries.
// The oracles walk index tuples directly and key patterns by std::vector<int>.

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "exarray/array.hpp"
#include "exarray/rng.hpp"

namespace exarray::testing {

inline FiniteArray random_array(int m, int k, std::uint64_t key, FiniteArray::Flags flags = {}) {
  Stream rng(key);
  std::vector<double> v(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i) {
    for (int j = flags.symmetric ? i : 0; j < m; ++j) {
      double x = static_cast<double>(rng.below(k));
      if (i == j && flags.zero_diagonal) x = 0;
      v[static_cast<std::size_t>(i) * m + j] = x;
      if (flags.symmetric) v[static_cast<std::size_t>(j) * m + i] = x;
    }
  }
  return FiniteArray(m, Alphabet::finite(k), std::move(v), flags);
}

inline FiniteArray binary(std::initializer_list<std::initializer_list<int>> rows, FiniteArray::Flags flags = {}) {
  std::vector<double> v;
  for (const auto& r : rows) {
    for (int x : r) v.push_back(x);
  }
  return FiniteArray(static_cast<int>(rows.size()), Alphabet::finite(2), std::move(v), flags);
}

inline Pattern pattern(std::initializer_list<std::initializer_list<int>> rows) {
  Pattern p{static_cast<int>(rows.size()), {}};
  for (const auto& r : rows) {
    for (int x : r) p.cells.push_back(static_cast<std::uint16_t>(x));
  }
  return p;
}

/// All n-tuples over [m] with distinct entries, by odometer over [m]^n.
inline std::vector<std::vector<int>> injections_by_odometer(int m, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> t(n, 0);
  for (;;) {
    bool distinct = true;
    for (int a = 0; a < n && distinct; ++a) {
      for (int b = a + 1; b < n && distinct; ++b) distinct = t[a] != t[b];
    }
    if (distinct) out.push_back(t);
    int pos = n - 1;
    while (pos >= 0 && ++t[pos] == m) t[pos--] = 0;
    if (pos < 0) break;
  }
  return out;
}

using OracleCounts = std::map<std::vector<int>, std::uint64_t>;

/// Brute-force t^{y,n}_m counts over all injection pairs.
inline OracleCounts oracle_subarray_counts(const FiniteArray& y, int n) {
  OracleCounts out;
  const auto inj = injections_by_odometer(y.side(), n);
  for (const auto& r : inj) {
    for (const auto& c : inj) {
      std::vector<int> key;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) key.push_back(y.symbol(r[i], c[j]));
      }
      ++out[key];
    }
  }
  return out;
}

/// Same measure as a library EmpiricalMeasure built from the oracle counts.
inline EmpiricalMeasure oracle_measure(const FiniteArray& y, int n) {
  EmpiricalMeasure::Counts counts;
  for (const auto& [key, c] : oracle_subarray_counts(y, n)) {
    Pattern p{n, {}};
    for (int x : key) p.cells.push_back(static_cast<std::uint16_t>(x));
    counts[p] = c;
  }
  return EmpiricalMeasure::from_counts(n, Quantizer::for_alphabet(y.alphabet()), std::move(counts));
}

/// Product law of an n x n pattern with i.i.d. Bernoulli(p) cells.
inline EmpiricalMeasure bernoulli_product_law(int n, double p) {
  EmpiricalMeasure::Weights w;
  const int cells = n * n;
  for (int mask = 0; mask < (1 << cells); ++mask) {
    Pattern pat{n, std::vector<std::uint16_t>(cells)};
    int ones = 0;
    for (int c = 0; c < cells; ++c) {
      pat.cells[c] = static_cast<std::uint16_t>((mask >> (cells - 1 - c)) & 1);
      ones += pat.cells[c];
    }
    w[pat] = std::pow(p, ones) * std::pow(1 - p, cells - ones);
  }
  double sum = 0;
  for (const auto& [k, v] : w) sum += v;
  for (auto& [k, v] : w) v /= sum;
  return EmpiricalMeasure::from_weights(n, Quantizer::for_alphabet(Alphabet::finite(2)), std::move(w));
}

/// Two-sample Monte Carlo threshold 4 sqrt(#patterns / R).
inline double mc_threshold(std::size_t patterns, std::uint64_t runs) {
  return 4.0 * std::sqrt(static_cast<double>(patterns) / static_cast<double>(runs));
}

/// P(X12(2) = 1) for the estimate-mode hidden-majority chain started from
/// the complete graph on 6 vertices, by summing over all 2^15 graphs X(1).
inline double complete_start_edge_probability() {
  const int m = 6;
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  }
  double total = 0;
  for (int mask = 0; mask < (1 << 15); ++mask) {
    int degree[6] = {0, 0, 0, 0, 0, 0};
    int edges = 0;
    for (int e = 0; e < 15; ++e) {
      if (mask >> e & 1) {
        ++degree[pairs[e].first];
        ++degree[pairs[e].second];
        ++edges;
      }
    }
    // step 1 from the complete graph: all types 1, every edge Bernoulli(3/4)
    const double prob = std::pow(0.75, edges) * std::pow(0.25, 15 - edges);
    const int a = 2 * degree[0] > m;
    const int b = 2 * degree[1] > m;
    const int x12 = mask & 1;  // pairs[0] = (0, 1)
    double next;
    if (a == 0 && b == 0) {
      next = x12;
    } else {
      next = (a + b == 1) ? 0.5 : 0.75;
    }
    total += prob * next;
  }
  return total;
}

}  // namespace exarray::testing

#endif  // EXARRAY_TESTS_HELPERS_HPP
