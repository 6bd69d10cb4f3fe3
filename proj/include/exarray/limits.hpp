#ifndef EXARRAY_LIMITS_HPP
#define EXARRAY_LIMITS_HPP

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "exarray/array.hpp"
#include "exarray/sampler.hpp"

namespace exarray {

/// Default cap on the number of injection terms an exact enumeration may visit.
inline constexpr double kDefaultEnumerationBudget = 1e8;

struct EstimatorOptions {
  int bins = Quantizer::kDefaultBins;
  double budget = kDefaultEnumerationBudget;
  int threads = 1;
};

/// m (m-1) ... (m-n+1); (m)_0 = 1. Throws on n > m or 64-bit overflow.
std::uint64_t falling_factorial(int m, int n);

/**
 * t^{y,n}_m: the uniform mixture, over all pairs of injections
 * psi1, psi2 : [n] -> [m], of point masses at (y_{psi1(i), psi2(j)}).
 * Exact counts with denominator ((m)_n)^2. Throws BudgetExceeded when
 * ((m)_n)^2 exceeds options.budget.
 */
EmpiricalMeasure empirical_subarray_exact(const FiniteArray& y, int n, const EstimatorOptions& options = {});

/**
 * Monte Carlo version of empirical_subarray_exact: `draws` independent
 * uniform injection pairs, each obtained by a Fisher-Yates prefix. Draw k
 * reads only its own keyed stream, so results do not depend on threads.
 */
EmpiricalMeasure empirical_subarray_mc(const FiniteArray& y, int n, std::uint64_t draws, Seed seed,
                                       const EstimatorOptions& options = {});

/// Exact enumeration or Monte Carlo with the given draw count and seed.
struct SubarrayMode {
  bool exact = true;
  std::uint64_t draws = 0;
  Seed seed{};

  static SubarrayMode exact_mode() { return {}; }
  static SubarrayMode monte_carlo(std::uint64_t draws, Seed seed) { return {false, draws, seed}; }
};

/**
 * Weakly exchangeable variant: one injection psi indexes rows and columns,
 * giving patterns (y_{psi(i), psi(j)}). Requires a symmetric array.
 */
EmpiricalMeasure empirical_subarray_weak(const FiniteArray& y, int n, const SubarrayMode& mode,
                                         const EstimatorOptions& options = {});

/**
 * Pushforward of mu under truncation of patterns to their top-left
 * n_small x n_small corner. Count-based measures stay count-based.
 */
EmpiricalMeasure restrict_measure(const EmpiricalMeasure& mu, int n_small);

/// Simple graph on vertices 0..n-1: symmetric 0/1 adjacency with zero diagonal.
class LabeledGraph {
 public:
  explicit LabeledGraph(FiniteArray adjacency);
  static LabeledGraph from_edges(int n, const std::vector<std::pair<int, int>>& edges);
  static LabeledGraph complete(int n);

  int n() const { return adjacency_.side(); }
  bool adjacent(int i, int j) const { return adjacency_(i, j) != 0.0; }
  const FiniteArray& adjacency() const { return adjacency_; }
  std::vector<std::pair<int, int>> edges() const;
  /// F^pi with (F^pi)_{ij} = F_{pi(i), pi(j)}.
  LabeledGraph relabeled(const Permutation& pi) const;

 private:
  FiniteArray adjacency_;
};

/// ind(F, G): injections psi with G_{psi(i) psi(j)} = F_{ij} for all i, j.
std::uint64_t graph_ind(const LabeledGraph& f, const LabeledGraph& g, double budget = kDefaultEnumerationBudget);

/// ind(F, G) / (G.n)_{F.n}.
double graph_density(const LabeledGraph& f, const LabeledGraph& g, double budget = kDefaultEnumerationBudget);

/// Where limit_profile gets its array from.
struct SamplerSource {
  RepresentingFunction f;
  bool weakly_exchangeable = false;
  bool zero_diagonal = false;
};
using ArraySource = std::variant<SamplerSource, FiniteArray>;

struct LimitProfileOptions {
  EstimatorOptions estimator{};
  /// Successive-entry tv gap below which the profile reports convergence.
  double threshold = 0.05;
  /// Use the single-injection estimator (requires symmetric arrays).
  bool weak = false;
};

struct LimitProfile {
  enum class Status { Converging, Undetermined };
  struct Entry {
    int m;
    bool exact;
    EmpiricalMeasure measure;
  };

  int n = 0;
  std::vector<Entry> entries;
  Status status = Status::Undetermined;
  /// tv distance between the last two entries (0 for a single entry).
  double gap = 0.0;
};

/**
 * Finite-m estimates of t^{y,n} along an increasing schedule. A sampler
 * source is drawn once at the largest m with `seed` and restricted, so all
 * entries are nested truncations of one array. Each entry is exact when
 * the enumeration fits the budget and Monte Carlo with `draws` otherwise.
 */
LimitProfile limit_profile(const ArraySource& source, int n, const std::vector<int>& m_schedule,
                           std::uint64_t draws, Seed seed, const LimitProfileOptions& options = {});

}  // namespace exarray

#endif  // EXARRAY_LIMITS_HPP
