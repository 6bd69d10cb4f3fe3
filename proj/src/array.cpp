#include "exarray/array.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "exarray/error.hpp"
#include "exarray/rng.hpp"

namespace exarray {

Alphabet Alphabet::finite(int k) {
  if (k < 2) throw InvalidArgument("finite alphabet needs at least 2 symbols, got " + std::to_string(k));
  return Alphabet(k);
}

Alphabet Alphabet::unit_interval() { return Alphabet(0); }

bool Alphabet::contains(double v) const {
  if (is_unit()) return v >= 0.0 && v <= 1.0;
  return v >= 0.0 && v < k_ && std::floor(v) == v;
}

std::string Alphabet::describe() const {
  return is_unit() ? std::string("unit interval") : "finite(" + std::to_string(k_) + ")";
}

FiniteArray::FiniteArray(int side, Alphabet alphabet, std::vector<double> values, Flags flags)
    : side_(side), alphabet_(alphabet), flags_(flags), values_(std::move(values)) {
  if (side < 1) throw InvalidArgument("array side must be >= 1");
  if (values_.size() != static_cast<std::size_t>(side) * side) {
    throw InvalidArgument("array of side " + std::to_string(side) + " needs " +
                          std::to_string(side * side) + " values, got " +
                          std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!alphabet_.contains(v)) {
      throw InvalidArgument("value " + std::to_string(v) + " outside alphabet " + alphabet_.describe());
    }
  }
  if (flags_.symmetric && !is_symmetric()) throw InvalidArgument("array flagged symmetric is not symmetric");
  if (flags_.zero_diagonal) {
    for (int i = 0; i < side_; ++i) {
      if ((*this)(i, i) != 0.0) throw InvalidArgument("array flagged zero-diagonal has a nonzero diagonal");
    }
  }
}

FiniteArray FiniteArray::filled(int side, Alphabet alphabet, double value, Flags flags) {
  if (side < 1) throw InvalidArgument("array side must be >= 1");
  std::vector<double> values(static_cast<std::size_t>(side) * side, value);
  if (flags.zero_diagonal) {
    for (int i = 0; i < side; ++i) values[static_cast<std::size_t>(i) * side + i] = 0.0;
  }
  return FiniteArray(side, alphabet, std::move(values), flags);
}

bool FiniteArray::is_symmetric() const {
  for (int i = 0; i < side_; ++i) {
    for (int j = i + 1; j < side_; ++j) {
      if ((*this)(i, j) != (*this)(j, i)) return false;
    }
  }
  return true;
}

Permutation::Permutation(std::vector<int> image) : image_(std::move(image)) {
  std::vector<bool> seen(image_.size(), false);
  for (int v : image_) {
    if (v < 0 || v >= static_cast<int>(image_.size()) || seen[v]) {
      throw InvalidArgument("permutation image is not a bijection");
    }
    seen[v] = true;
  }
}

Permutation Permutation::identity(int m) {
  std::vector<int> image(m);
  std::iota(image.begin(), image.end(), 0);
  return Permutation(std::move(image));
}

Permutation Permutation::random(int m, std::uint64_t key) {
  std::vector<int> image(m);
  std::iota(image.begin(), image.end(), 0);
  Stream rng(key);
  for (int i = m - 1; i > 0; --i) {
    std::swap(image[i], image[rng.below(static_cast<std::uint64_t>(i) + 1)]);
  }
  return Permutation(std::move(image));
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(image_.size());
  for (std::size_t i = 0; i < image_.size(); ++i) inv[image_[i]] = static_cast<int>(i);
  return Permutation(std::move(inv));
}

bool Permutation::fixes_prefix(int n) const {
  for (int i = 0; i < n; ++i) {
    if (image_[i] >= n) return false;
  }
  return true;
}

Permutation Permutation::restricted(int n) const {
  if (n > size() || !fixes_prefix(n)) throw InvalidArgument("permutation does not fix the prefix");
  return Permutation(std::vector<int>(image_.begin(), image_.begin() + n));
}

FiniteArray apply_permutation(const FiniteArray& y, const PermutationPair& p) {
  const int m = y.side();
  if (p.rows.size() != m || p.cols.size() != m) {
    throw InvalidArgument("permutation size does not match array side " + std::to_string(m));
  }
  std::vector<double> out(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) out[static_cast<std::size_t>(i) * m + j] = y(p.rows(i), p.cols(j));
  }
  FiniteArray::Flags flags = y.flags();
  if (!p.is_joint()) {
    flags.symmetric = false;
    flags.zero_diagonal = false;
  }
  return FiniteArray(m, y.alphabet(), std::move(out), flags);
}

FiniteArray restrict(const FiniteArray& y, int n) {
  if (n < 1 || n > y.side()) {
    throw InvalidArgument("restriction size " + std::to_string(n) + " outside [1, " +
                          std::to_string(y.side()) + "]");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out.push_back(y(i, j));
  }
  return FiniteArray(n, y.alphabet(), std::move(out), y.flags());
}

double array_distance(const FiniteArray& y, const FiniteArray& z) {
  if (y.side() != z.side() || y.alphabet() != z.alphabet()) {
    throw InvalidArgument("array_distance needs arrays of equal side and alphabet");
  }
  const bool discrete = y.alphabet().is_finite();
  double total = 0.0;
  // 1-based weights: entry (i, j) contributes 2^{-(i+1)-(j+1)}.
  for (int i = 0; i < y.side(); ++i) {
    for (int j = 0; j < y.side(); ++j) {
      const double d = discrete ? (y(i, j) != z(i, j) ? 1.0 : 0.0) : std::abs(y(i, j) - z(i, j));
      if (d != 0.0) total += std::ldexp(d, -(i + j + 2));
    }
  }
  return total;
}

Quantizer Quantizer::for_alphabet(const Alphabet& a, int bins) {
  if (a.is_finite()) return Quantizer{a, 0};
  if (bins < 1 || bins > 65535) throw InvalidArgument("bin count must lie in [1, 65535]");
  return Quantizer{a, bins};
}

std::uint16_t Quantizer::cell(double v) const {
  if (alphabet.is_finite()) return static_cast<std::uint16_t>(v);
  const int b = static_cast<int>(v * bins);
  return static_cast<std::uint16_t>(std::clamp(b, 0, bins - 1));
}

std::vector<std::uint16_t> Quantizer::cells(const FiniteArray& y) const {
  if (y.alphabet() != alphabet) throw InvalidArgument("quantizer alphabet does not match array");
  std::vector<std::uint16_t> out;
  out.reserve(y.values().size());
  for (double v : y.values()) out.push_back(cell(v));
  return out;
}

Pattern Pattern::truncated(int n_small) const {
  Pattern out{n_small, {}};
  out.cells.reserve(static_cast<std::size_t>(n_small) * n_small);
  for (int i = 0; i < n_small; ++i) {
    for (int j = 0; j < n_small; ++j) out.cells.push_back((*this)(i, j));
  }
  return out;
}

namespace {

void check_pattern(int n, const Quantizer& space, const Pattern& p) {
  if (p.n != n || p.cells.size() != static_cast<std::size_t>(n) * n) {
    throw InvalidArgument("pattern side does not match measure side " + std::to_string(n));
  }
  for (auto c : p.cells) {
    if (c >= space.levels()) throw InvalidArgument("pattern cell outside the alphabet");
  }
}

}  // namespace

EmpiricalMeasure EmpiricalMeasure::from_counts(int n, Quantizer space, Counts counts) {
  if (n < 1) throw InvalidArgument("pattern side must be >= 1");
  EmpiricalMeasure mu(n, space);
  std::uint64_t total = 0;
  for (auto it = counts.begin(); it != counts.end();) {
    check_pattern(n, space, it->first);
    if (it->second == 0) {
      it = counts.erase(it);
      continue;
    }
    total += it->second;
    ++it;
  }
  if (total == 0) throw InvalidArgument("empirical measure needs a positive total count");
  for (const auto& [p, c] : counts) {
    mu.weights_.emplace(p, static_cast<double>(c) / static_cast<double>(total));
  }
  mu.counts_ = std::move(counts);
  mu.denominator_ = total;
  return mu;
}

EmpiricalMeasure EmpiricalMeasure::from_weights(int n, Quantizer space, Weights weights) {
  if (n < 1) throw InvalidArgument("pattern side must be >= 1");
  EmpiricalMeasure mu(n, space);
  double sum = 0.0;
  for (auto it = weights.begin(); it != weights.end();) {
    check_pattern(n, space, it->first);
    if (!(it->second >= 0.0)) throw InvalidArgument("negative pattern weight");
    if (it->second == 0.0) {
      it = weights.erase(it);
      continue;
    }
    sum += it->second;
    ++it;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw InvalidArgument("pattern weights sum to " + std::to_string(sum) + ", not 1");
  }
  mu.weights_ = std::move(weights);
  return mu;
}

EmpiricalMeasure EmpiricalMeasure::point_mass(Quantizer space, Pattern p) {
  const int n = p.n;
  return from_counts(n, space, Counts{{std::move(p), 1}});
}

double EmpiricalMeasure::weight(const Pattern& p) const {
  auto it = weights_.find(p);
  return it == weights_.end() ? 0.0 : it->second;
}

const EmpiricalMeasure::Counts& EmpiricalMeasure::counts() const {
  if (!counts_) throw InvalidArgument("measure is not count-based");
  return *counts_;
}

bool EmpiricalMeasure::exactly_equals(const EmpiricalMeasure& other) const {
  if (!is_exact() || !other.is_exact()) throw InvalidArgument("exact comparison needs count-based measures");
  if (n_ != other.n_ || !(space_ == other.space_)) return false;
  const auto& a = *counts_;
  const auto& b = *other.counts_;
  if (a.size() != b.size()) return false;
  using Wide = unsigned __int128;
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
    if (!(ia->first == ib->first)) return false;
    if (static_cast<Wide>(ia->second) * other.denominator_ != static_cast<Wide>(ib->second) * denominator_) {
      return false;
    }
  }
  return true;
}

namespace {

void check_compatible(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.n() != nu.n() || !(mu.space() == nu.space())) {
    throw InvalidArgument("measures differ in pattern side or alphabet");
  }
}

}  // namespace

double tv_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  check_compatible(mu, nu);
  double sum = 0.0;
  auto a = mu.weights().begin();
  auto b = nu.weights().begin();
  const auto a_end = mu.weights().end();
  const auto b_end = nu.weights().end();
  while (a != a_end || b != b_end) {
    if (b == b_end || (a != a_end && a->first < b->first)) {
      sum += a->second;
      ++a;
    } else if (a == a_end || b->first < a->first) {
      sum += b->second;
      ++b;
    } else {
      sum += std::abs(a->second - b->second);
      ++a;
      ++b;
    }
  }
  return std::min(1.0, 0.5 * sum);
}

std::size_t joint_support_size(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  check_compatible(mu, nu);
  std::size_t count = mu.support_size();
  for (const auto& [p, w] : nu.weights()) {
    if (!mu.weights().contains(p)) ++count;
  }
  return count;
}

}  // namespace exarray
