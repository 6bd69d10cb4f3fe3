#include "exarray/limits.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "exarray/error.hpp"
#include "exarray/parallel.hpp"
#include "exarray/rng.hpp"

namespace exarray {

namespace {

constexpr std::uint64_t kDenseLimit = 1u << 16;

/**
 * Pattern counts keyed by the base-L code of the row-major cells when that
 * fits in 63 bits; by the cell vector otherwise. Codes compare like the
 * patterns they encode.
 */
class PatternAccumulator {
 public:
  PatternAccumulator(int n, int levels) : n_(n), levels_(levels) {
    const int cells = n * n;
    double log_size = cells * std::log2(static_cast<double>(levels));
    coded_ = log_size < 63.0;
    if (coded_) {
      space_ = 1;
      for (int c = 0; c < cells; ++c) space_ *= static_cast<std::uint64_t>(levels);
      if (space_ <= kDenseLimit) dense_.assign(space_, 0);
    }
  }

  bool coded() const { return coded_; }
  int levels() const { return levels_; }

  void add_code(std::uint64_t code) {
    if (!dense_.empty()) {
      ++dense_[code];
    } else {
      ++sparse_[code];
    }
  }

  void add_cells(const std::vector<std::uint16_t>& cells) { ++wide_[cells]; }

  void merge(const PatternAccumulator& other) {
    for (std::size_t i = 0; i < other.dense_.size(); ++i) dense_[i] += other.dense_[i];
    for (const auto& [code, c] : other.sparse_) sparse_[code] += c;
    for (const auto& [cells, c] : other.wide_) wide_[cells] += c;
  }

  EmpiricalMeasure::Counts counts() const {
    EmpiricalMeasure::Counts out;
    for (std::size_t code = 0; code < dense_.size(); ++code) {
      if (dense_[code] != 0) out.emplace(decode(code), dense_[code]);
    }
    for (const auto& [code, c] : sparse_) out.emplace(decode(code), c);
    for (const auto& [cells, c] : wide_) out.emplace(Pattern{n_, cells}, c);
    return out;
  }

 private:
  Pattern decode(std::uint64_t code) const {
    Pattern p{n_, std::vector<std::uint16_t>(static_cast<std::size_t>(n_) * n_)};
    for (std::size_t k = p.cells.size(); k-- > 0;) {
      p.cells[k] = static_cast<std::uint16_t>(code % levels_);
      code /= levels_;
    }
    return p;
  }

  int n_;
  int levels_;
  bool coded_ = false;
  std::uint64_t space_ = 0;
  std::vector<std::uint64_t> dense_;
  std::unordered_map<std::uint64_t, std::uint64_t> sparse_;
  std::map<std::vector<std::uint16_t>, std::uint64_t> wide_;
};

/// Records the pattern (cell(i, j))_{i,j<n}.
template <class CellFn>
void record(PatternAccumulator& acc, int n, CellFn&& cell) {
  if (acc.coded()) {
    std::uint64_t code = 0;
    const auto levels = static_cast<std::uint64_t>(acc.levels());
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) code = code * levels + cell(i, j);
    }
    acc.add_code(code);
  } else {
    std::vector<std::uint16_t> cells(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) cells[static_cast<std::size_t>(i) * n + j] = cell(i, j);
    }
    acc.add_cells(cells);
  }
}

/// All injections [n] -> [m] in lexicographic order, flattened.
std::vector<int> all_injections(int m, int n) {
  std::vector<int> out;
  std::vector<int> current(n);
  std::vector<bool> used(m, false);
  // Depth-first over positions; depth == n emits.
  auto recurse = [&](auto&& self, int depth) -> void {
    if (depth == n) {
      out.insert(out.end(), current.begin(), current.end());
      return;
    }
    for (int v = 0; v < m; ++v) {
      if (used[v]) continue;
      used[v] = true;
      current[depth] = v;
      self(self, depth + 1);
      used[v] = false;
    }
  };
  recurse(recurse, 0);
  return out;
}

/// Injections with a fixed first value, visited in lexicographic order.
template <class Visit>
void for_each_injection_from(int m, int n, int first, Visit&& visit) {
  std::vector<int> current(n);
  std::vector<bool> used(m, false);
  current[0] = first;
  used[first] = true;
  auto recurse = [&](auto&& self, int depth) -> void {
    if (depth == n) {
      visit(current);
      return;
    }
    for (int v = 0; v < m; ++v) {
      if (used[v]) continue;
      used[v] = true;
      current[depth] = v;
      self(self, depth + 1);
      used[v] = false;
    }
  };
  recurse(recurse, 1);
}

/// Uniform injection [n] -> [m]: first n slots of a lazily-stored Fisher-Yates shuffle.
void random_injection(int m, int n, Stream& rng, std::vector<int>& out,
                      std::vector<std::pair<int, int>>& swaps) {
  swaps.clear();
  auto value_at = [&](int pos) {
    for (const auto& [p, v] : swaps) {
      if (p == pos) return v;
    }
    return pos;
  };
  auto set_at = [&](int pos, int v) {
    for (auto& [p, w] : swaps) {
      if (p == pos) {
        w = v;
        return;
      }
    }
    swaps.emplace_back(pos, v);
  };
  for (int i = 0; i < n; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(m - i)));
    const int vj = value_at(j);
    const int vi = value_at(i);
    out[i] = vj;
    set_at(j, vi);
    set_at(i, vj);
  }
}

void check_side(const FiniteArray& y, int n) {
  if (n < 1 || n > y.side()) {
    throw InvalidArgument("pattern side " + std::to_string(n) + " outside [1, " + std::to_string(y.side()) + "]");
  }
}

std::string budget_message(double terms, double budget) {
  return "exact enumeration needs " + std::to_string(terms) + " terms, budget is " + std::to_string(budget) +
         "; use the Monte Carlo estimator";
}

}  // namespace

std::uint64_t falling_factorial(int m, int n) {
  if (n < 0 || m < 0 || n > m) {
    throw InvalidArgument("falling factorial needs 0 <= n <= m, got m=" + std::to_string(m) +
                          ", n=" + std::to_string(n));
  }
  std::uint64_t out = 1;
  for (int i = 0; i < n; ++i) {
    const auto factor = static_cast<std::uint64_t>(m - i);
    if (out > UINT64_MAX / factor) throw InvalidArgument("falling factorial overflows 64 bits");
    out *= factor;
  }
  return out;
}

EmpiricalMeasure empirical_subarray_exact(const FiniteArray& y, int n, const EstimatorOptions& options) {
  check_side(y, n);
  const int m = y.side();
  const double per_side = std::exp(std::lgamma(m + 1.0) - std::lgamma(m - n + 1.0));
  if (per_side * per_side > options.budget * (1 + 1e-9)) {
    throw BudgetExceeded(budget_message(per_side * per_side, options.budget), per_side * per_side, options.budget);
  }
  const Quantizer space = Quantizer::for_alphabet(y.alphabet(), options.bins);
  const auto cells = space.cells(y);
  const auto injections = all_injections(m, n);
  const std::uint64_t count = injections.size() / static_cast<std::size_t>(n);

  std::vector<PatternAccumulator> partial(chunk_count(count, options.threads),
                                          PatternAccumulator(n, space.levels()));
  parallel_chunks(count, options.threads, [&](int chunk, std::uint64_t begin, std::uint64_t end) {
    auto& acc = partial[chunk];
    std::vector<const std::uint16_t*> rows(n);
    for (std::uint64_t a = begin; a < end; ++a) {
      for (int i = 0; i < n; ++i) rows[i] = cells.data() + static_cast<std::size_t>(injections[a * n + i]) * m;
      for (std::uint64_t b = 0; b < count; ++b) {
        const int* cols = injections.data() + b * n;
        record(acc, n, [&](int i, int j) { return rows[i][cols[j]]; });
      }
    }
  });
  for (std::size_t c = 1; c < partial.size(); ++c) partial[0].merge(partial[c]);
  return EmpiricalMeasure::from_counts(n, space, partial[0].counts());
}

EmpiricalMeasure empirical_subarray_mc(const FiniteArray& y, int n, std::uint64_t draws, Seed seed,
                                       const EstimatorOptions& options) {
  check_side(y, n);
  if (draws < 1) throw InvalidArgument("Monte Carlo estimator needs at least one draw");
  const int m = y.side();
  const Quantizer space = Quantizer::for_alphabet(y.alphabet(), options.bins);
  const auto cells = space.cells(y);
  const std::uint64_t key = derive_key(seed.value, Role::Draw);

  std::vector<PatternAccumulator> partial(chunk_count(draws, options.threads),
                                          PatternAccumulator(n, space.levels()));
  parallel_chunks(draws, options.threads, [&](int chunk, std::uint64_t begin, std::uint64_t end) {
    auto& acc = partial[chunk];
    std::vector<int> rows(n);
    std::vector<int> cols(n);
    std::vector<std::pair<int, int>> swaps;
    for (std::uint64_t k = begin; k < end; ++k) {
      Stream rng(derive_key(key, Role::Draw, k));
      random_injection(m, n, rng, rows, swaps);
      random_injection(m, n, rng, cols, swaps);
      record(acc, n, [&](int i, int j) { return cells[static_cast<std::size_t>(rows[i]) * m + cols[j]]; });
    }
  });
  for (std::size_t c = 1; c < partial.size(); ++c) partial[0].merge(partial[c]);
  return EmpiricalMeasure::from_counts(n, space, partial[0].counts());
}

EmpiricalMeasure empirical_subarray_weak(const FiniteArray& y, int n, const SubarrayMode& mode,
                                         const EstimatorOptions& options) {
  check_side(y, n);
  if (!y.is_symmetric()) throw InvalidArgument("weakly exchangeable estimator needs a symmetric array");
  const int m = y.side();
  const Quantizer space = Quantizer::for_alphabet(y.alphabet(), options.bins);
  const auto cells = space.cells(y);
  auto cell = [&](const std::vector<int>& psi) {
    return [&](int i, int j) { return cells[static_cast<std::size_t>(psi[i]) * m + psi[j]]; };
  };

  if (mode.exact) {
    const double terms = std::exp(std::lgamma(m + 1.0) - std::lgamma(m - n + 1.0));
    if (terms > options.budget * (1 + 1e-9)) {
      throw BudgetExceeded(budget_message(terms, options.budget), terms, options.budget);
    }
    std::vector<PatternAccumulator> partial(chunk_count(m, options.threads), PatternAccumulator(n, space.levels()));
    parallel_chunks(m, options.threads, [&](int chunk, std::uint64_t begin, std::uint64_t end) {
      for (auto first = begin; first < end; ++first) {
        for_each_injection_from(m, n, static_cast<int>(first),
                                [&](const std::vector<int>& psi) { record(partial[chunk], n, cell(psi)); });
      }
    });
    for (std::size_t c = 1; c < partial.size(); ++c) partial[0].merge(partial[c]);
    return EmpiricalMeasure::from_counts(n, space, partial[0].counts());
  }

  if (mode.draws < 1) throw InvalidArgument("Monte Carlo estimator needs at least one draw");
  const std::uint64_t key = derive_key(mode.seed.value, Role::Draw);
  std::vector<PatternAccumulator> partial(chunk_count(mode.draws, options.threads),
                                          PatternAccumulator(n, space.levels()));
  parallel_chunks(mode.draws, options.threads, [&](int chunk, std::uint64_t begin, std::uint64_t end) {
    std::vector<int> psi(n);
    std::vector<std::pair<int, int>> swaps;
    for (std::uint64_t k = begin; k < end; ++k) {
      Stream rng(derive_key(key, Role::Draw, k));
      random_injection(m, n, rng, psi, swaps);
      record(partial[chunk], n, cell(psi));
    }
  });
  for (std::size_t c = 1; c < partial.size(); ++c) partial[0].merge(partial[c]);
  return EmpiricalMeasure::from_counts(n, space, partial[0].counts());
}

EmpiricalMeasure restrict_measure(const EmpiricalMeasure& mu, int n_small) {
  if (n_small < 1 || n_small >= mu.n()) {
    throw InvalidArgument("restriction size " + std::to_string(n_small) + " outside [1, " +
                          std::to_string(mu.n() - 1) + "]");
  }
  if (mu.is_exact()) {
    EmpiricalMeasure::Counts counts;
    for (const auto& [p, c] : mu.counts()) counts[p.truncated(n_small)] += c;
    return EmpiricalMeasure::from_counts(n_small, mu.space(), std::move(counts));
  }
  EmpiricalMeasure::Weights weights;
  for (const auto& [p, w] : mu.weights()) weights[p.truncated(n_small)] += w;
  return EmpiricalMeasure::from_weights(n_small, mu.space(), std::move(weights));
}

LabeledGraph::LabeledGraph(FiniteArray adjacency) : adjacency_(std::move(adjacency)) {
  if (adjacency_.alphabet() != Alphabet::finite(2)) throw InvalidArgument("graph adjacency must be binary");
  if (!adjacency_.is_symmetric()) throw InvalidArgument("graph adjacency must be symmetric");
  for (int i = 0; i < adjacency_.side(); ++i) {
    if (adjacency_(i, i) != 0.0) throw InvalidArgument("graph adjacency must have a zero diagonal");
  }
  if (!adjacency_.symmetric() || !adjacency_.zero_diagonal()) {
    adjacency_ = FiniteArray(adjacency_.side(), adjacency_.alphabet(),
                             std::vector<double>(adjacency_.values().begin(), adjacency_.values().end()),
                             {.symmetric = true, .zero_diagonal = true});
  }
}

LabeledGraph LabeledGraph::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n < 1) throw InvalidArgument("graph needs at least one vertex");
  std::vector<double> adj(static_cast<std::size_t>(n) * n, 0.0);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) throw InvalidArgument("edge endpoint outside the vertex set");
    if (u == v) throw InvalidArgument("self-loops are not allowed");
    adj[static_cast<std::size_t>(u) * n + v] = 1.0;
    adj[static_cast<std::size_t>(v) * n + u] = 1.0;
  }
  return LabeledGraph(FiniteArray(n, Alphabet::finite(2), std::move(adj), {.symmetric = true, .zero_diagonal = true}));
}

LabeledGraph LabeledGraph::complete(int n) {
  return LabeledGraph(FiniteArray::filled(n, Alphabet::finite(2), 1.0, {.symmetric = true, .zero_diagonal = true}));
}

std::vector<std::pair<int, int>> LabeledGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n(); ++i) {
    for (int j = i + 1; j < n(); ++j) {
      if (adjacent(i, j)) out.emplace_back(i, j);
    }
  }
  return out;
}

LabeledGraph LabeledGraph::relabeled(const Permutation& pi) const {
  return LabeledGraph(apply_permutation(adjacency_, PermutationPair::joint(pi)));
}

std::uint64_t graph_ind(const LabeledGraph& f, const LabeledGraph& g, double budget) {
  const int n = f.n();
  const int m = g.n();
  if (n > m) throw InvalidArgument("pattern graph has more vertices than the host graph");
  const double terms = std::exp(std::lgamma(m + 1.0) - std::lgamma(m - n + 1.0));
  if (terms > budget * (1 + 1e-9)) throw BudgetExceeded(budget_message(terms, budget), terms, budget);

  std::vector<int> psi(n);
  std::vector<bool> used(m, false);
  std::uint64_t count = 0;
  // Backtracking: a partial injection survives only if it already matches F on its domain.
  auto extend = [&](auto&& self, int depth) -> void {
    if (depth == n) {
      ++count;
      return;
    }
    for (int v = 0; v < m; ++v) {
      if (used[v]) continue;
      bool ok = true;
      for (int l = 0; l < depth && ok; ++l) ok = g.adjacent(v, psi[l]) == f.adjacent(depth, l);
      if (!ok) continue;
      used[v] = true;
      psi[depth] = v;
      self(self, depth + 1);
      used[v] = false;
    }
  };
  extend(extend, 0);
  return count;
}

double graph_density(const LabeledGraph& f, const LabeledGraph& g, double budget) {
  const std::uint64_t ind = graph_ind(f, g, budget);
  return static_cast<double>(ind) / static_cast<double>(falling_factorial(g.n(), f.n()));
}

namespace {

FiniteArray materialize(const ArraySource& source, int m_max, Seed seed) {
  if (const auto* array = std::get_if<FiniteArray>(&source)) {
    if (array->side() < m_max) {
      throw InvalidArgument("stored array of side " + std::to_string(array->side()) +
                            " is smaller than the schedule maximum " + std::to_string(m_max));
    }
    return *array;
  }
  const auto& s = std::get<SamplerSource>(source);
  return s.weakly_exchangeable ? sample_weakly_exchangeable(s.f, m_max, seed, s.zero_diagonal)
                               : sample_exchangeable(s.f, m_max, seed);
}

}  // namespace

LimitProfile limit_profile(const ArraySource& source, int n, const std::vector<int>& m_schedule,
                           std::uint64_t draws, Seed seed, const LimitProfileOptions& options) {
  if (m_schedule.empty()) throw InvalidArgument("limit profile needs a nonempty m schedule");
  for (std::size_t i = 0; i < m_schedule.size(); ++i) {
    if (m_schedule[i] < n) throw InvalidArgument("every scheduled m must be >= n");
    if (i > 0 && m_schedule[i] <= m_schedule[i - 1]) throw InvalidArgument("m schedule must be strictly increasing");
  }
  const FiniteArray full = materialize(source, m_schedule.back(), seed);

  LimitProfile profile;
  profile.n = n;
  for (int m : m_schedule) {
    const FiniteArray y = restrict(full, m);
    const double per_side = std::exp(std::lgamma(m + 1.0) - std::lgamma(m - n + 1.0));
    const double terms = options.weak ? per_side : per_side * per_side;
    const bool exact = terms <= options.estimator.budget;
    const Seed mc_seed{derive_key(seed.value, Role::Draw, static_cast<std::uint64_t>(m))};
    EmpiricalMeasure mu =
        options.weak
            ? empirical_subarray_weak(y, n, exact ? SubarrayMode::exact_mode() : SubarrayMode::monte_carlo(draws, mc_seed),
                                      options.estimator)
            : (exact ? empirical_subarray_exact(y, n, options.estimator)
                     : empirical_subarray_mc(y, n, draws, mc_seed, options.estimator));
    profile.entries.push_back({m, exact, std::move(mu)});
  }
  if (profile.entries.size() >= 2) {
    const auto& last = profile.entries.back().measure;
    const auto& prev = profile.entries[profile.entries.size() - 2].measure;
    profile.gap = tv_distance(prev, last);
  }
  profile.status = profile.gap < options.threshold ? LimitProfile::Status::Converging
                                                   : LimitProfile::Status::Undetermined;
  return profile;
}

}  // namespace exarray
