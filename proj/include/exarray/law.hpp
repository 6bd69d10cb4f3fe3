#ifndef EXARRAY_LAW_HPP
#define EXARRAY_LAW_HPP

#include <vector>

#include "exarray/array.hpp"

namespace exarray {

/**
 * Distribution of a single array entry: a categorical law on a finite
 * alphabet, or the uniform law on [0, 1].
 */
class EntryLaw {
 public:
  /// probs[s] = P(entry = s); must sum to 1 within 1e-12.
  static EntryLaw categorical(std::vector<double> probs);
  static EntryLaw bernoulli(double p);
  static EntryLaw uniform();

  bool is_uniform() const { return probs_.empty(); }
  const std::vector<double>& probs() const { return probs_; }
  Alphabet alphabet() const;

  /// Inverse-CDF transform of a uniform u in [0, 1).
  double draw(double u) const;
  /// P(entry = v) for finite laws; throws for the uniform law.
  double mass(int symbol) const;

 private:
  std::vector<double> probs_;
  std::vector<double> cdf_;
};

/// Throws unless the entries are probabilities summing to 1 within 1e-12.
void validate_probabilities(const std::vector<double>& probs, const char* what);

}  // namespace exarray

#endif  // EXARRAY_LAW_HPP
