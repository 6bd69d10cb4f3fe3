#ifndef EXARRAY_ANALYSIS_HPP
#define EXARRAY_ANALYSIS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "exarray/array.hpp"
#include "exarray/dynamics.hpp"
#include "exarray/limits.hpp"

namespace exarray {

// ---------------------------------------------------------------------------
// Jump classification

enum class JumpClass { Global, Row, Column, Single, Sparse };

const char* to_string(JumpClass c);

struct JumpEvent {
  double time = 0.0;
  /// Index of the post-jump state in the trajectory.
  std::size_t index = 0;
  std::vector<std::pair<int, int>> changed;
  JumpClass cls = JumpClass::Sparse;
  /// Row for Row, column for Column, (row, col) for Single.
  int i = -1;
  int j = -1;
};

inline constexpr double kDefaultThetaGlobal = 0.05;

/// Entries (row-major) where the two states differ.
std::vector<std::pair<int, int>> state_diff(const FiniteArray& a, const FiniteArray& b);

/**
 * One JumpEvent per consecutive pair of states with a nonempty diff:
 * Single for one changed entry; Row / Column when two or more changes share
 * one row / column; Global when the changed fraction is >= theta_global
 * and spans at least two rows and two columns; Sparse otherwise.
 */
std::vector<JumpEvent> classify_jumps(const Trajectory& traj, double theta_global = kDefaultThetaGlobal);

/// Fraction of entries that differ between states[t_index - 1] and states[t_index].
double jump_proportion(const Trajectory& traj, std::size_t t_index);

struct JumpAgreement {
  std::uint64_t events = 0;
  std::uint64_t agreeing = 0;
  double rate() const { return events == 0 ? 1.0 : static_cast<double>(agreeing) / static_cast<double>(events); }
};

/**
 * Compares classified jumps with the ground-truth event log: Global with
 * Global, Row(i) with Row(i), Column(j) with Column(j), Single(i, j) with
 * Entry(i, j). Events that changed nothing are not counted.
 */
JumpAgreement compare_with_log(const Trajectory& traj, const std::vector<JumpEvent>& jumps);

// ---------------------------------------------------------------------------
// Disintegration kernel

/**
 * Conditional law of the time-t pattern given the time-(t-1) pattern.
 * Rows exist only for patterns with positive mass; row() returns the
 * point mass at y1 for the others.
 */
struct KernelEstimate {
  int n = 0;
  std::map<Pattern, std::map<Pattern, double>> rows;
  /// t^{X(t-1),n}: marginal mass of each conditioning pattern.
  std::map<Pattern, double> marginal;

  std::map<Pattern, double> row(const Pattern& y1) const;
  double probability(const Pattern& y1, const Pattern& y2) const;
};

struct KernelEstimateOptions {
  /// Single-injection estimator (symmetric states).
  bool weak = false;
  EstimatorOptions estimator{};
  /// Monte Carlo draws per trajectory when the enumeration exceeds the budget.
  std::uint64_t draws = 100000;
  Seed seed{};
};

/**
 * Builds the pair array Z_ij = (X_ij(t-1), X_ij(t)) of every trajectory,
 * pools the counts of its n x n sub-array measure over the ensemble and
 * normalizes each conditioning row by its marginal.
 */
KernelEstimate estimate_kernel_qn(const std::vector<Trajectory>& ensemble, std::size_t t, int n,
                                  const KernelEstimateOptions& options = {});

// ---------------------------------------------------------------------------
// Markov test for the hidden-majority process

struct MarkovTestOptions {
  int threads = 1;
  /// Simulate the whole m x m graph rather than only the edge {1, 2} and its endpoint types.
  bool full_simulation = false;
};

struct MarkovTestReport {
  int m = 0;
  int N = 0;
  std::uint64_t runs = 0;
  /// P(X12(2) = 1 | X12(1) = 1).
  double one_step = 0.0;
  /// P(X12(N) = 1 | X12(t) = 1 for t = 1..N-1).
  double history = 0.0;
  /// 4-sigma binomial half-widths.
  double one_step_halfwidth = 0.0;
  double history_halfwidth = 0.0;
  std::uint64_t one_step_conditioning = 0;
  std::uint64_t one_step_hits = 0;
  std::uint64_t history_conditioning = 0;
  std::uint64_t history_hits = 0;
};

/// Closed form of the history probability for the hidden-majority chain in stationarity.
double hidden_majority_history_probability(int N);

/**
 * R independent stationary runs of the hidden-majority chain (exact latent
 * types) over times 0..N. Run r uses seed derive_key(seed, Run, r), both
 * for the initial graph and for the steps. In the default mode only edge
 * {1, 2} and the types of its endpoints are simulated; the counts are
 * bit-identical to the full simulation.
 * Throws InsufficientData when a conditioning event never occurs.
 */
MarkovTestReport markov_test(const kernel::HiddenMajority& kernel, int m, int N, std::uint64_t R, Seed seed,
                             const MarkovTestOptions& options = {});

// ---------------------------------------------------------------------------
// Exchangeability tests

struct ExchangeabilityReport {
  double statistic = 0.0;
  double null_band = 0.0;
};

/**
 * Sub-array-law comparison. With mode.exact the statistic is identically 0
 * (the exact estimator is permutation invariant). In Monte Carlo mode the
 * statistic is the maximum over `permutations` random PermutationPairs of
 * tv(mc(y), mc(y^p)); the null band is the same maximum over pairs of
 * independent estimates of y itself.
 */
ExchangeabilityReport exchangeability_test(const FiniteArray& y, int n, int permutations, const SubarrayMode& mode,
                                           const EstimatorOptions& options = {});

struct DispersionReport {
  /// max(variance of row means, variance of column means).
  double statistic = 0.0;
  /// 99% quantile of the statistic under the i.i.d.-entry bootstrap.
  double band = 0.0;
  std::uint64_t replicates = 0;
};

/**
 * Row/column-mean dispersion against a dissociated bootstrap null: each
 * replicate redraws every entry i.i.d. from the array's empirical entry
 * distribution.
 */
DispersionReport dispersion_test(const FiniteArray& y, std::uint64_t replicates, Seed seed, int threads = 1);

// ---------------------------------------------------------------------------
// Locality

struct LocalityReport {
  double tv = 0.0;
  /// 4 sqrt(#patterns / R) with #patterns the joint support size.
  double noise_band = 0.0;
  std::size_t patterns = 0;
  std::uint64_t runs = 0;
  EmpiricalMeasure law;
  EmpiricalMeasure law_alt;
};

/**
 * tv distance between the laws of X(T)|_[n] started from x and from x_alt
 * (which must agree on [n] x [n]), each estimated from R runs. The kernel
 * must be a function of the state alone, so the hidden-majority kernel is
 * accepted only in estimate mode.
 */
LocalityReport locality_test(const TransitionKernel& kernel, int n, const FiniteArray& x, const FiniteArray& x_alt,
                             double T, std::uint64_t R, Seed seed, int threads = 1);

/// Law of a restriction pattern built from a list of sampled arrays.
EmpiricalMeasure restriction_law(const std::vector<FiniteArray>& samples, int n, int bins = Quantizer::kDefaultBins);

}  // namespace exarray

#endif  // EXARRAY_ANALYSIS_HPP
