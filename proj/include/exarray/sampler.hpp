#ifndef EXARRAY_SAMPLER_HPP
#define EXARRAY_SAMPLER_HPP

#include <array>
#include <cstdint>
#include <variant>
#include <vector>

#include "exarray/array.hpp"
#include "exarray/law.hpp"

namespace exarray {

struct Seed {
  std::uint64_t value = 0;
};

/**
 * Closed family of representing functions f : [0,1]^4 -> S, evaluated as
 * f(u, u_row, u_col, u_entry).
 */
namespace family {

struct Constant {
  double value = 0.0;
};

/// Entry = law^{-1}(u_entry); ignores the latent coordinates.
struct IidEntry {
  EntryLaw law = EntryLaw::bernoulli(0.5);
};

/// Entry = 1{u_entry < grid[cell(u_row)][cell(u_col)]} on equal-width cells.
struct Graphon {
  std::vector<std::vector<double>> grid;
};

/// Entry = 1{u_row * u_col < theta}.
struct ThresholdProduct {
  double theta = 0.5;
};

/**
 * Piecewise-constant f on a product of per-axis partitions of [0, 1].
 * breakpoints[a] are the sorted interior cut points of axis a, so axis a
 * has breakpoints[a].size() + 1 cells; values is indexed
 * [c0][c1][c2][c3] flattened row-major.
 */
struct StepFunction {
  std::array<std::vector<double>, 4> breakpoints;
  std::vector<double> values;
};

/**
 * Latent types with per-type-pair entry laws. Without the global
 * coordinate, row i has type F^{-1}(u_row) and column j type F^{-1}(u_col);
 * with it, one global type F^{-1}(u) is shared by every row and column,
 * which makes the law a non-trivial mixture of dissociated laws.
 */
struct HiddenTypeMixture {
  std::vector<double> type_probs;
  std::vector<std::vector<EntryLaw>> laws;
};

}  // namespace family

class RepresentingFunction {
 public:
  using Family = std::variant<family::Constant, family::IidEntry, family::Graphon,
                              family::ThresholdProduct, family::StepFunction,
                              family::HiddenTypeMixture>;

  /**
   * Validates parameters. `alphabet` is the output alphabet; it must agree
   * with the family (binary for Graphon/ThresholdProduct, the law's
   * alphabet for IidEntry). A set `symmetric` flag is checked by
   * evaluating f on swapped middle coordinates of every grid cell.
   */
  RepresentingFunction(Family family, Alphabet alphabet, bool symmetric, bool uses_global);

  const Family& family() const { return family_; }
  const Alphabet& alphabet() const { return alphabet_; }
  bool symmetric() const { return symmetric_; }
  bool uses_global() const { return uses_global_; }

  double operator()(double u, double u_row, double u_col, double u_entry) const;

  /// Whether f(., x, y, .) = f(., y, x, .) holds on the family's grid.
  bool check_symmetry() const;

 private:
  Family family_;
  Alphabet alphabet_;
  bool symmetric_;
  bool uses_global_;
};

/**
 * Y_ij = f(U, U_i, U'_j, U_ij) with every uniform read from its own keyed
 * stream. The entry at (i, j) depends only on (seed, i, j), so sampling at
 * side m equals the top-left corner of the sample at any larger side.
 */
FiniteArray sample_exchangeable(const RepresentingFunction& f, int m, Seed seed);

/**
 * Y_ij = Y_ji = f(U, U_i, U_j, U_{ij}) for i <= j with symmetric noise.
 * With zero_diagonal the diagonal is set to symbol 0.
 */
FiniteArray sample_weakly_exchangeable(const RepresentingFunction& f, int m, Seed seed,
                                       bool zero_diagonal = false);

struct CounterexampleSample {
  FiniteArray graph;
  std::vector<std::uint8_t> hidden_types;
};

/// Edge probability of the hidden-majority construction for types (a, b).
double counterexample_edge_probability(int a, int b);

/**
 * Initial graph of the hidden-majority process: i.i.d. Bernoulli(1/2)
 * vertex types, and independent edges with probability 1/4, 1/2 or 3/4
 * according to whether zero, one or two endpoints have type 1.
 */
CounterexampleSample sample_counterexample_initial(int m, Seed seed);

/// Type of vertex i in sample_counterexample_initial(., seed).
int counterexample_type(Seed seed, int i);
/// Edge {i, j} (i < j) of sample_counterexample_initial(., seed) given the two types.
int counterexample_edge(Seed seed, int i, int j, int type_i, int type_j);

}  // namespace exarray

#endif  // EXARRAY_SAMPLER_HPP
