#include "exarray/law.hpp"

#include <cmath>
#include <string>

#include "exarray/error.hpp"

namespace exarray {

void validate_probabilities(const std::vector<double>& probs, const char* what) {
  if (probs.empty()) throw InvalidArgument(std::string(what) + ": empty probability table");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument(std::string(what) + ": probability outside [0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw InvalidArgument(std::string(what) + ": probabilities sum to " + std::to_string(sum));
  }
}

EntryLaw EntryLaw::categorical(std::vector<double> probs) {
  validate_probabilities(probs, "categorical law");
  if (probs.size() < 2) throw InvalidArgument("categorical law needs at least 2 symbols");
  EntryLaw law;
  law.probs_ = std::move(probs);
  double acc = 0.0;
  for (double p : law.probs_) {
    acc += p;
    law.cdf_.push_back(acc);
  }
  return law;
}

EntryLaw EntryLaw::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("Bernoulli parameter outside [0, 1]");
  return categorical({1.0 - p, p});
}

EntryLaw EntryLaw::uniform() { return EntryLaw(); }

Alphabet EntryLaw::alphabet() const {
  return is_uniform() ? Alphabet::unit_interval() : Alphabet::finite(static_cast<int>(probs_.size()));
}

double EntryLaw::draw(double u) const {
  if (is_uniform()) return u;
  // Bernoulli(p) is 1{u < p}; in general the first symbol whose cdf exceeds u.
  const std::size_t last = probs_.size() - 1;
  for (std::size_t s = 0; s < last; ++s) {
    if (u < cdf_[s]) return static_cast<double>(s);
  }
  return static_cast<double>(last);
}

double EntryLaw::mass(int symbol) const {
  if (is_uniform()) throw InvalidArgument("uniform law has no point masses");
  if (symbol < 0 || symbol >= static_cast<int>(probs_.size())) return 0.0;
  return probs_[symbol];
}

}  // namespace exarray
