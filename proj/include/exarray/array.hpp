#ifndef EXARRAY_ARRAY_HPP
#define EXARRAY_ARRAY_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace exarray {

/**
 * Entry space of an array: a finite set of symbols {0, ..., k-1} (k >= 2)
 * or the unit interval [0, 1].
 */
class Alphabet {
 public:
  static Alphabet finite(int k);
  static Alphabet unit_interval();

  bool is_finite() const { return k_ > 0; }
  bool is_unit() const { return k_ == 0; }
  /// Number of symbols; 0 for the unit interval.
  int size() const { return k_; }
  bool contains(double v) const;
  std::string describe() const;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  explicit Alphabet(int k) : k_(k) {}
  int k_ = 2;
};

/// Structural constraints an array is declared to satisfy.
struct ArrayFlags {
  bool symmetric = false;
  bool zero_diagonal = false;
  friend bool operator==(const ArrayFlags&, const ArrayFlags&) = default;
};

/**
 * Finite m x m truncation of an array. Entries are stored row-major as
 * doubles; finite-alphabet entries hold integral symbol ids.
 */
class FiniteArray {
 public:
  using Flags = ArrayFlags;

  /// Validates every entry against the alphabet and the flags.
  FiniteArray(int side, Alphabet alphabet, std::vector<double> values, Flags flags = {});
  /// Constant array.
  static FiniteArray filled(int side, Alphabet alphabet, double value, Flags flags = {});

  int side() const { return side_; }
  const Alphabet& alphabet() const { return alphabet_; }
  Flags flags() const { return flags_; }
  bool symmetric() const { return flags_.symmetric; }
  bool zero_diagonal() const { return flags_.zero_diagonal; }

  /// 0-based access.
  double operator()(int i, int j) const { return values_[static_cast<std::size_t>(i) * side_ + j]; }
  std::span<const double> values() const { return values_; }
  /// Symbol id of entry (i, j); finite alphabets only.
  int symbol(int i, int j) const { return static_cast<int>((*this)(i, j)); }

  /// True when the stored values are actually symmetric (ignores the flag).
  bool is_symmetric() const;

  friend bool operator==(const FiniteArray&, const FiniteArray&) = default;

 private:
  int side_;
  Alphabet alphabet_;
  Flags flags_;
  std::vector<double> values_;
};

/// A permutation of {0, ..., m-1}, stored as its image vector.
class Permutation {
 public:
  explicit Permutation(std::vector<int> image);
  static Permutation identity(int m);
  /// Uniform random permutation drawn by Fisher-Yates from `key`.
  static Permutation random(int m, std::uint64_t key);

  int size() const { return static_cast<int>(image_.size()); }
  int operator()(int i) const { return image_[i]; }
  Permutation inverse() const;
  /// True if the permutation maps {0, ..., n-1} onto itself.
  bool fixes_prefix(int n) const;
  /// The restriction to {0, ..., n-1}; requires fixes_prefix(n).
  Permutation restricted(int n) const;
  const std::vector<int>& image() const { return image_; }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> image_;
};

/// Row and column permutations acting by (y^p)_{ij} = y_{pi1(i), pi2(j)}.
struct PermutationPair {
  Permutation rows;
  Permutation cols;

  static PermutationPair joint(const Permutation& p) { return {p, p}; }
  PermutationPair inverse() const { return {rows.inverse(), cols.inverse()}; }
  bool is_joint() const { return rows == cols; }
};

FiniteArray apply_permutation(const FiniteArray& y, const PermutationPair& p);

/// Top-left n x n corner, 1 <= n <= side.
FiniteArray restrict(const FiniteArray& y, int n);

/**
 * sum_{i,j} 2^{-i-j} d(y_ij, z_ij) with 1-based i, j, where d is the
 * discrete metric on finite alphabets and |a - b| on [0, 1].
 */
double array_distance(const FiniteArray& y, const FiniteArray& z);

/**
 * Discretization of array entries into cell symbols. Finite alphabets map
 * symbol to itself; the unit interval is cut into `bins` equal cells.
 */
struct Quantizer {
  Alphabet alphabet = Alphabet::finite(2);
  int bins = 16;

  static constexpr int kDefaultBins = 16;

  static Quantizer for_alphabet(const Alphabet& a, int bins = kDefaultBins);
  /// Number of distinct cell symbols.
  int levels() const { return alphabet.is_finite() ? alphabet.size() : bins; }
  std::uint16_t cell(double v) const;
  /// Cells of the whole array, row-major.
  std::vector<std::uint16_t> cells(const FiniteArray& y) const;

  friend bool operator==(const Quantizer&, const Quantizer&) = default;
};

/// An n x n pattern of cell symbols, row-major.
struct Pattern {
  int n = 0;
  std::vector<std::uint16_t> cells;

  std::uint16_t operator()(int i, int j) const { return cells[static_cast<std::size_t>(i) * n + j]; }
  Pattern truncated(int n_small) const;

  friend auto operator<=>(const Pattern&, const Pattern&) = default;
};

/**
 * Probability measure on n x n patterns. Measures produced by counting
 * (exact enumeration or Monte Carlo draws) also keep their integer counts
 * and common denominator, which allows exact rational comparison.
 */
class EmpiricalMeasure {
 public:
  using Weights = std::map<Pattern, double>;
  using Counts = std::map<Pattern, std::uint64_t>;

  static EmpiricalMeasure from_counts(int n, Quantizer space, Counts counts);
  /// Weights must be nonnegative and sum to 1 within 1e-12.
  static EmpiricalMeasure from_weights(int n, Quantizer space, Weights weights);
  static EmpiricalMeasure point_mass(Quantizer space, Pattern p);

  int n() const { return n_; }
  const Quantizer& space() const { return space_; }
  const Weights& weights() const { return weights_; }
  double weight(const Pattern& p) const;
  std::size_t support_size() const { return weights_.size(); }

  bool is_exact() const { return counts_.has_value(); }
  const Counts& counts() const;
  std::uint64_t denominator() const { return denominator_; }

  /// Exact rational equality; both measures must be count-based.
  bool exactly_equals(const EmpiricalMeasure& other) const;

 private:
  EmpiricalMeasure(int n, Quantizer space) : n_(n), space_(space) {}

  int n_;
  Quantizer space_;
  Weights weights_;
  std::optional<Counts> counts_;
  std::uint64_t denominator_ = 0;
};

/// (1/2) sum_p |mu(p) - nu(p)|.
double tv_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

/// Number of distinct patterns in the union of both supports.
std::size_t joint_support_size(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

}  // namespace exarray

#endif  // EXARRAY_ARRAY_HPP
