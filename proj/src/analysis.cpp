#include "exarray/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "exarray/error.hpp"
#include "exarray/parallel.hpp"
#include "exarray/rng.hpp"

namespace exarray {

const char* to_string(JumpClass c) {
  switch (c) {
    case JumpClass::Global:
      return "global";
    case JumpClass::Row:
      return "row";
    case JumpClass::Column:
      return "column";
    case JumpClass::Single:
      return "single";
    case JumpClass::Sparse:
      return "sparse";
  }
  return "unknown";
}

std::vector<std::pair<int, int>> state_diff(const FiniteArray& a, const FiniteArray& b) {
  if (a.side() != b.side()) throw InvalidArgument("states differ in side");
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < a.side(); ++i) {
    for (int j = 0; j < a.side(); ++j) {
      if (a(i, j) != b(i, j)) out.emplace_back(i, j);
    }
  }
  return out;
}

std::vector<JumpEvent> classify_jumps(const Trajectory& traj, double theta_global) {
  if (traj.states.size() < 2) throw InvalidArgument("jump classification needs at least two states");
  if (!(theta_global > 0.0 && theta_global < 1.0)) throw InvalidArgument("theta_global must lie in (0, 1)");
  traj.validate();
  const double cells = static_cast<double>(traj.states[0].side()) * traj.states[0].side();
  std::vector<JumpEvent> out;
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    auto changed = state_diff(traj.states[k - 1], traj.states[k]);
    if (changed.empty()) continue;
    JumpEvent ev;
    ev.time = traj.times[k];
    ev.index = k;
    std::set<int> rows;
    std::set<int> cols;
    for (auto [i, j] : changed) {
      rows.insert(i);
      cols.insert(j);
    }
    if (changed.size() == 1) {
      ev.cls = JumpClass::Single;
      ev.i = changed[0].first;
      ev.j = changed[0].second;
    } else if (rows.size() == 1) {
      ev.cls = JumpClass::Row;
      ev.i = *rows.begin();
    } else if (cols.size() == 1) {
      ev.cls = JumpClass::Column;
      ev.j = *cols.begin();
    } else if (static_cast<double>(changed.size()) / cells >= theta_global) {
      ev.cls = JumpClass::Global;
    } else {
      ev.cls = JumpClass::Sparse;
    }
    ev.changed = std::move(changed);
    out.push_back(std::move(ev));
  }
  return out;
}

double jump_proportion(const Trajectory& traj, std::size_t t_index) {
  if (t_index < 1 || t_index >= traj.states.size()) {
    throw InvalidArgument("jump index " + std::to_string(t_index) + " outside [1, " +
                          std::to_string(traj.states.size() - 1) + "]");
  }
  const auto& a = traj.states[t_index - 1];
  const auto& b = traj.states[t_index];
  return static_cast<double>(state_diff(a, b).size()) / (static_cast<double>(a.side()) * a.side());
}

JumpAgreement compare_with_log(const Trajectory& traj, const std::vector<JumpEvent>& jumps) {
  if (!traj.event_log) throw InvalidArgument("trajectory has no event log");
  JumpAgreement out;
  for (const auto& jump : jumps) {
    const auto& truth = (*traj.event_log)[jump.index - 1];
    ++out.events;
    bool agree = false;
    switch (truth.kind) {
      case EventKind::Global:
        agree = jump.cls == JumpClass::Global;
        break;
      case EventKind::Row:
        agree = jump.cls == JumpClass::Row && jump.i == truth.i;
        break;
      case EventKind::Column:
        agree = jump.cls == JumpClass::Column && jump.j == truth.j;
        break;
      case EventKind::Entry:
        agree = jump.cls == JumpClass::Single && jump.i == truth.i && jump.j == truth.j;
        break;
    }
    if (agree) ++out.agreeing;
  }
  return out;
}

std::map<Pattern, double> KernelEstimate::row(const Pattern& y1) const {
  auto it = rows.find(y1);
  if (it != rows.end()) return it->second;
  return {{y1, 1.0}};
}

double KernelEstimate::probability(const Pattern& y1, const Pattern& y2) const {
  const auto r = row(y1);
  auto it = r.find(y2);
  return it == r.end() ? 0.0 : it->second;
}

KernelEstimate estimate_kernel_qn(const std::vector<Trajectory>& ensemble, std::size_t t, int n,
                                  const KernelEstimateOptions& options) {
  if (ensemble.empty()) throw InvalidArgument("kernel estimate needs a nonempty ensemble");
  if (t < 1) throw InvalidArgument("kernel estimate needs t >= 1");
  const FiniteArray& ref = ensemble.front().states.at(0);
  if (!ref.alphabet().is_finite()) throw InvalidArgument("kernel estimate needs a finite alphabet");
  const int k = ref.alphabet().size();
  const int m = ref.side();
  const Alphabet pair_alphabet = Alphabet::finite(k * k);

  EmpiricalMeasure::Counts pooled;
  for (std::size_t r = 0; r < ensemble.size(); ++r) {
    const auto& traj = ensemble[r];
    if (t >= traj.states.size()) throw InvalidArgument("trajectory too short for the requested time");
    const auto& before = traj.states[t - 1];
    const auto& after = traj.states[t];
    if (before.side() != m || before.alphabet() != ref.alphabet()) {
      throw InvalidArgument("ensemble trajectories differ in shape or alphabet");
    }
    std::vector<double> z(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) z[static_cast<std::size_t>(i) * m + j] = before.symbol(i, j) * k + after.symbol(i, j);
    }
    const FiniteArray pairs(m, pair_alphabet, std::move(z));
    const Seed mc_seed{derive_key(options.seed.value, Role::Draw, r)};
    EmpiricalMeasure mu = [&] {
      try {
        return options.weak ? empirical_subarray_weak(pairs, n, SubarrayMode::exact_mode(), options.estimator)
                            : empirical_subarray_exact(pairs, n, options.estimator);
      } catch (const BudgetExceeded&) {
        return options.weak
                   ? empirical_subarray_weak(pairs, n, SubarrayMode::monte_carlo(options.draws, mc_seed),
                                             options.estimator)
                   : empirical_subarray_mc(pairs, n, options.draws, mc_seed, options.estimator);
      }
    }();
    for (const auto& [p, c] : mu.counts()) pooled[p] += c;
  }

  std::map<Pattern, std::map<Pattern, std::uint64_t>> joint;
  std::map<Pattern, std::uint64_t> marginal;
  std::uint64_t total = 0;
  for (const auto& [z, c] : pooled) {
    Pattern y1{n, std::vector<std::uint16_t>(z.cells.size())};
    Pattern y2 = y1;
    for (std::size_t q = 0; q < z.cells.size(); ++q) {
      y1.cells[q] = static_cast<std::uint16_t>(z.cells[q] / k);
      y2.cells[q] = static_cast<std::uint16_t>(z.cells[q] % k);
    }
    joint[y1][y2] += c;
    marginal[y1] += c;
    total += c;
  }

  KernelEstimate est;
  est.n = n;
  for (const auto& [y1, row] : joint) {
    const double mass = static_cast<double>(marginal[y1]);
    auto& out = est.rows[y1];
    for (const auto& [y2, c] : row) out[y2] = static_cast<double>(c) / mass;
    est.marginal[y1] = mass / static_cast<double>(total);
  }
  return est;
}

double hidden_majority_history_probability(int N) {
  if (N < 2) throw InvalidArgument("history horizon N must be >= 2");
  const double num = 1.0 / 16.0 + 0.5 * std::pow(0.5, N) + 0.25 * std::pow(0.75, N);
  const double den = 1.0 / 16.0 + 0.5 * std::pow(0.5, N - 1) + 0.25 * std::pow(0.75, N - 1);
  return num / den;
}

namespace {

struct MarkovCounts {
  std::uint64_t one_cond = 0;
  std::uint64_t one_hit = 0;
  std::uint64_t hist_cond = 0;
  std::uint64_t hist_hit = 0;
};

/// X12(0..N) of one run, from edge {1, 2} and its endpoint types only.
void edge_path(Seed run, int N, std::vector<int>& path) {
  const int a = counterexample_type(run, 0);
  const int b = counterexample_type(run, 1);
  path[0] = counterexample_edge(run, 0, 1, a, b);
  for (int t = 1; t <= N; ++t) path[t] = hidden_majority_update(step_key(run, t), 0, 1, a, b, path[t - 1]);
}

double halfwidth(std::uint64_t hits, std::uint64_t trials) {
  const double p = static_cast<double>(hits) / static_cast<double>(trials);
  return 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

}  // namespace

MarkovTestReport markov_test(const kernel::HiddenMajority& kernel, int m, int N, std::uint64_t R, Seed seed,
                             const MarkovTestOptions& options) {
  if (m < 2) throw InvalidArgument("markov test needs m >= 2");
  if (N < 2) throw InvalidArgument("markov test needs N >= 2");
  if (R < 1) throw InvalidArgument("markov test needs at least one run");
  const bool full = options.full_simulation || kernel.mode == HiddenMode::Estimate;
  const TransitionKernel step_kernel(kernel, TimeMode::Discrete);

  std::vector<MarkovCounts> partial(chunk_count(R, options.threads));
  parallel_chunks(R, options.threads, [&](int chunk, std::uint64_t begin, std::uint64_t end) {
    auto& acc = partial[chunk];
    std::vector<int> path(static_cast<std::size_t>(N) + 1);
    for (std::uint64_t r = begin; r < end; ++r) {
      const Seed run{derive_key(seed.value, Role::Run, r)};
      if (full) {
        const auto init = sample_counterexample_initial(m, run);
        const HiddenState latent{init.hidden_types};
        FiniteArray x = init.graph;
        path[0] = x.symbol(0, 1);
        for (int t = 1; t <= N; ++t) {
          x = step_discrete(step_kernel, x, &latent, step_key(run, t));
          path[t] = x.symbol(0, 1);
        }
      } else {
        edge_path(run, N, path);
      }
      if (path[1] == 1) {
        ++acc.one_cond;
        acc.one_hit += static_cast<std::uint64_t>(path[2]);
      }
      bool all_ones = true;
      for (int t = 1; t < N && all_ones; ++t) all_ones = path[t] == 1;
      if (all_ones) {
        ++acc.hist_cond;
        acc.hist_hit += static_cast<std::uint64_t>(path[N]);
      }
    }
  });

  MarkovTestReport rep;
  rep.m = m;
  rep.N = N;
  rep.runs = R;
  for (const auto& c : partial) {
    rep.one_step_conditioning += c.one_cond;
    rep.one_step_hits += c.one_hit;
    rep.history_conditioning += c.hist_cond;
    rep.history_hits += c.hist_hit;
  }
  if (rep.one_step_conditioning == 0 || rep.history_conditioning == 0) {
    throw InsufficientData("no run satisfied the conditioning event (one_step: " +
                               std::to_string(rep.one_step_conditioning) +
                               ", history: " + std::to_string(rep.history_conditioning) + ")",
                           std::min(rep.one_step_conditioning, rep.history_conditioning), R);
  }
  rep.one_step = static_cast<double>(rep.one_step_hits) / static_cast<double>(rep.one_step_conditioning);
  rep.history = static_cast<double>(rep.history_hits) / static_cast<double>(rep.history_conditioning);
  rep.one_step_halfwidth = halfwidth(rep.one_step_hits, rep.one_step_conditioning);
  rep.history_halfwidth = halfwidth(rep.history_hits, rep.history_conditioning);
  return rep;
}

ExchangeabilityReport exchangeability_test(const FiniteArray& y, int n, int permutations, const SubarrayMode& mode,
                                           const EstimatorOptions& options) {
  if (n < 1 || n > y.side()) throw InvalidArgument("pattern side outside [1, side]");
  if (permutations < 1) throw InvalidArgument("exchangeability test needs at least one permutation");
  const int m = y.side();
  const std::uint64_t perm_key = derive_key(mode.seed.value, Role::Permutation);
  auto draw_pair = [&](int p) {
    return PermutationPair{Permutation::random(m, derive_key(perm_key, Role::RowLatent, p)),
                           Permutation::random(m, derive_key(perm_key, Role::ColumnLatent, p))};
  };

  ExchangeabilityReport rep;
  if (mode.exact) {
    const auto base = empirical_subarray_exact(y, n, options);
    for (int p = 0; p < permutations; ++p) {
      rep.statistic = std::max(rep.statistic, tv_distance(base, empirical_subarray_exact(apply_permutation(y, draw_pair(p)), n, options)));
    }
    return rep;
  }
  const std::uint64_t draw_key = derive_key(mode.seed.value, Role::Draw);
  const std::uint64_t null_key = derive_key(mode.seed.value, Role::Alternate);
  auto mc = [&](const FiniteArray& a, std::uint64_t key, std::uint64_t index) {
    return empirical_subarray_mc(a, n, mode.draws, Seed{derive_key(key, Role::Draw, index)}, options);
  };
  for (int p = 0; p < permutations; ++p) {
    const auto q = static_cast<std::uint64_t>(p);
    const FiniteArray permuted = apply_permutation(y, draw_pair(p));
    rep.statistic = std::max(rep.statistic, tv_distance(mc(y, draw_key, 2 * q), mc(permuted, draw_key, 2 * q + 1)));
    rep.null_band = std::max(rep.null_band, tv_distance(mc(y, null_key, 2 * q), mc(y, null_key, 2 * q + 1)));
  }
  return rep;
}

namespace {

double mean_dispersion(const std::vector<double>& v, int m) {
  double worst = 0.0;
  for (int axis = 0; axis < 2; ++axis) {
    std::vector<double> means(m, 0.0);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) means[i] += axis == 0 ? v[static_cast<std::size_t>(i) * m + j] : v[static_cast<std::size_t>(j) * m + i];
      means[i] /= m;
    }
    double mu = 0.0;
    for (double x : means) mu += x;
    mu /= m;
    double var = 0.0;
    for (double x : means) var += (x - mu) * (x - mu);
    worst = std::max(worst, var / m);
  }
  return worst;
}

}  // namespace

DispersionReport dispersion_test(const FiniteArray& y, std::uint64_t replicates, Seed seed, int threads) {
  if (replicates < 1) throw InvalidArgument("dispersion test needs at least one bootstrap replicate");
  const int m = y.side();
  const std::vector<double> values(y.values().begin(), y.values().end());
  std::vector<double> pool = values;
  std::sort(pool.begin(), pool.end());
  DispersionReport rep;
  rep.statistic = mean_dispersion(values, m);
  rep.replicates = replicates;

  std::vector<double> stats(replicates);
  const std::uint64_t key = derive_key(seed.value, Role::Bootstrap);
  parallel_chunks(replicates, threads, [&](int, std::uint64_t begin, std::uint64_t end) {
    std::vector<double> sample(pool.size());
    for (std::uint64_t b = begin; b < end; ++b) {
      const std::uint64_t rk = derive_key(key, Role::Bootstrap, b);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          const auto idx = static_cast<std::size_t>(uniform_at(rk, i, j) * static_cast<double>(pool.size()));
          sample[static_cast<std::size_t>(i) * m + j] = pool[std::min(idx, pool.size() - 1)];
        }
      }
      stats[b] = mean_dispersion(sample, m);
    }
  });
  std::sort(stats.begin(), stats.end());
  const auto q = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(replicates)));
  rep.band = stats[std::max<std::size_t>(q, 1) - 1];
  return rep;
}

EmpiricalMeasure restriction_law(const std::vector<FiniteArray>& samples, int n, int bins) {
  if (samples.empty()) throw InvalidArgument("restriction law needs samples");
  const Quantizer space = Quantizer::for_alphabet(samples.front().alphabet(), bins);
  EmpiricalMeasure::Counts counts;
  for (const auto& s : samples) {
    const auto cells = space.cells(restrict(s, n));
    ++counts[Pattern{n, cells}];
  }
  return EmpiricalMeasure::from_counts(n, space, std::move(counts));
}

LocalityReport locality_test(const TransitionKernel& kernel, int n, const FiniteArray& x, const FiniteArray& x_alt,
                             double T, std::uint64_t R, Seed seed, int threads) {
  if (x.side() != x_alt.side() || x.alphabet() != x_alt.alphabet()) {
    throw InvalidArgument("locality test needs starting states of equal side and alphabet");
  }
  if (n < 1 || n > x.side()) throw InvalidArgument("restriction size outside [1, side]");
  const FiniteArray head = restrict(x, n);
  const FiniteArray head_alt = restrict(x_alt, n);
  if (!std::equal(head.values().begin(), head.values().end(), head_alt.values().begin())) {
    throw InvalidArgument("starting states must agree on their [n] x [n] restriction");
  }
  if (const auto* hm = std::get_if<kernel::HiddenMajority>(&kernel.family()); hm && hm->mode == HiddenMode::Exact) {
    throw InvalidArgument("locality test needs a state-determined kernel; use the hidden-majority estimate mode");
  }
  if (R < 1) throw InvalidArgument("locality test needs at least one run");

  const Quantizer space = Quantizer::for_alphabet(x.alphabet());
  using Counts = EmpiricalMeasure::Counts;
  std::vector<std::pair<Counts, Counts>> partial(chunk_count(R, threads));
  parallel_chunks(R, threads, [&](int chunk, std::uint64_t begin, std::uint64_t end) {
    auto& [a, b] = partial[chunk];
    for (std::uint64_t r = begin; r < end; ++r) {
      const auto end_x = run_to(kernel, x, nullptr, T, Seed{derive_key(seed.value, Role::Run, r)});
      const auto end_alt = run_to(kernel, x_alt, nullptr, T, Seed{derive_key(seed.value, Role::Alternate, r)});
      ++a[Pattern{n, space.cells(restrict(end_x, n))}];
      ++b[Pattern{n, space.cells(restrict(end_alt, n))}];
    }
  });
  Counts a;
  Counts b;
  for (const auto& [pa, pb] : partial) {
    for (const auto& [p, c] : pa) a[p] += c;
    for (const auto& [p, c] : pb) b[p] += c;
  }
  auto law = EmpiricalMeasure::from_counts(n, space, std::move(a));
  auto law_alt = EmpiricalMeasure::from_counts(n, space, std::move(b));
  const double tv = tv_distance(law, law_alt);
  const std::size_t patterns = joint_support_size(law, law_alt);
  const double band = 4.0 * std::sqrt(static_cast<double>(patterns) / static_cast<double>(R));
  return LocalityReport{tv, band, patterns, R, std::move(law), std::move(law_alt)};
}

}  // namespace exarray
