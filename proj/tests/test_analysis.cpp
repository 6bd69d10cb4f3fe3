#include <cmath>

#include "doctest.h"
#include "exarray/analysis.hpp"
#include "exarray/error.hpp"
#include "exarray/sampler.hpp"
#include "helpers.hpp"

using namespace exarray;
using exarray::testing::binary;
using exarray::testing::mc_threshold;
using exarray::testing::pattern;
using exarray::testing::random_array;

namespace {

const FiniteArray::Flags kGraph{.symmetric = true, .zero_diagonal = true};

/// Two-state trajectory whose second state flips the listed entries of a zero array.
Trajectory flip(int m, const std::vector<std::pair<int, int>>& cells) {
  std::vector<double> v(static_cast<std::size_t>(m) * m, 0.0);
  for (const auto& [i, j] : cells) v[static_cast<std::size_t>(i) * m + j] = 1.0;
  Trajectory t;
  t.times = {0.0, 1.0};
  t.states = {FiniteArray::filled(m, Alphabet::finite(2), 0.0), FiniteArray(m, Alphabet::finite(2), v)};
  return t;
}

JumpEvent only_jump(const Trajectory& t, double theta = kDefaultThetaGlobal) {
  const auto jumps = classify_jumps(t, theta);
  REQUIRE(jumps.size() == 1);
  return jumps[0];
}

}  // namespace

TEST_CASE("jump classes") {
  auto single = only_jump(flip(10, {{3, 7}}));
  CHECK(single.cls == JumpClass::Single);
  CHECK(single.i == 3);
  CHECK(single.j == 7);

  auto row = only_jump(flip(10, {{2, 1}, {2, 5}, {2, 9}}));
  CHECK(row.cls == JumpClass::Row);
  CHECK(row.i == 2);

  auto col = only_jump(flip(10, {{0, 4}, {8, 4}}));
  CHECK(col.cls == JumpClass::Column);
  CHECK(col.j == 4);

  CHECK(only_jump(flip(10, {{0, 0}, {1, 1}})).cls == JumpClass::Sparse);
  std::vector<std::pair<int, int>> block;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) block.emplace_back(i, j);
  }
  CHECK(only_jump(flip(10, block)).cls == JumpClass::Global);
  CHECK(only_jump(flip(10, block), 0.5).cls == JumpClass::Sparse);

  Trajectory still = flip(4, {});
  CHECK(classify_jumps(still).empty());
  CHECK(jump_proportion(still, 1) == 0.0);
  Trajectory one;
  one.times = {0};
  one.states = {random_array(3, 2, 1)};
  CHECK_THROWS_AS(classify_jumps(one), InvalidArgument);
  CHECK_THROWS_AS(jump_proportion(still, 2), InvalidArgument);
  CHECK_THROWS_AS(jump_proportion(still, 0), InvalidArgument);
}

TEST_CASE("every nonempty diff gets exactly one class") {
  const kernel::RowColumnEntryClocks c{.lambda_global = 0.1, .lambda_row = 0.2, .lambda_col = 0.2, .lambda_entry = 0.2,
                                       .law = EntryLaw::bernoulli(0.5)};
  const auto traj = simulate_ctmc(c, random_array(6, 2, 1), 40, Seed{1});
  const auto jumps = classify_jumps(traj);
  std::size_t nonempty = 0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    if (!state_diff(traj.states[k - 1], traj.states[k]).empty()) ++nonempty;
  }
  CHECK(jumps.size() == nonempty);
  for (const auto& j : jumps) {
    CHECK_FALSE(j.changed.empty());
    CHECK((j.cls == JumpClass::Single) == (j.changed.size() == 1));
    CHECK(jump_proportion(traj, j.index) == doctest::Approx(j.changed.size() / 36.0));
  }
}

TEST_CASE("classifier recovers the ground-truth clocks") {
  const int m = 30;
  const kernel::RowColumnEntryClocks c{.lambda_global = 0.2, .lambda_row = 0.1, .lambda_col = 0.1,
                                       .lambda_entry = 0.5 / (m * m), .law = EntryLaw::bernoulli(0.5)};
  const auto traj = simulate_ctmc(c, random_array(m, 2, 2), 100, Seed{2});
  const auto agreement = compare_with_log(traj, classify_jumps(traj));
  CHECK(agreement.events > 100);
  CHECK(agreement.rate() >= 0.99);
}

TEST_CASE("jump proportion extremes") {
  std::vector<std::pair<int, int>> all;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) all.emplace_back(i, j);
  }
  CHECK(jump_proportion(flip(4, all), 1) == 1.0);
}

TEST_CASE("kernel estimate for the iid refresh") {
  const double p = 0.3;
  const TransitionKernel k(kernel::IidRefresh{EntryLaw::bernoulli(p)}, TimeMode::Discrete);
  std::vector<Trajectory> ensemble;
  for (std::uint64_t r = 0; r < 10000; ++r) {
    ensemble.push_back(simulate_discrete(k, random_array(2, 2, r), nullptr, 1, Seed{r}));
  }
  const auto q = estimate_kernel_qn(ensemble, 1, 1);
  for (int y1 = 0; y1 < 2; ++y1) {
    const auto row = q.row(pattern({{y1}}));
    double sum = 0;
    for (const auto& [y2, w] : row) sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(q.probability(pattern({{y1}}), pattern({{1}})) - p) < 0.02);
  }
}

TEST_CASE("kernel estimate for frozen dynamics is the identity") {
  const TransitionKernel k(kernel::GlobalRefresh{.probability = 0.0}, TimeMode::Discrete);
  std::vector<Trajectory> ensemble;
  for (std::uint64_t r = 0; r < 5; ++r) {
    ensemble.push_back(simulate_discrete(k, random_array(5, 2, r), nullptr, 2, Seed{r}));
  }
  const auto q = estimate_kernel_qn(ensemble, 2, 2);
  CHECK_FALSE(q.rows.empty());
  for (const auto& [y1, row] : q.rows) {
    REQUIRE(row.size() == 1);
    CHECK(row.begin()->first == y1);
    CHECK(row.begin()->second == 1.0);
  }
  // null row: point mass on itself
  const auto absent = pattern({{1, 1}, {1, 1}});
  if (!q.rows.count(absent)) CHECK(q.probability(absent, absent) == 1.0);
  CHECK_THROWS_AS(estimate_kernel_qn({}, 1, 1), InvalidArgument);
}

TEST_CASE("kernel estimate for the hidden-majority chain differs from the history law") {
  // The one-edge disintegration at stationarity: q(1 -> 1) is the one-step
  // probability, far from the conditional law given a long all-ones history.
  const TransitionKernel k(kernel::HiddenMajority{}, TimeMode::Discrete);
  std::vector<Trajectory> ensemble;
  for (std::uint64_t r = 0; r < 20; ++r) {
    const auto init = sample_counterexample_initial(60, Seed{r});
    const HiddenState xi{init.hidden_types};
    ensemble.push_back(simulate_discrete(k, init.graph, &xi, 2, Seed{r}));
  }
  KernelEstimateOptions opts;
  opts.weak = true;
  const auto q = estimate_kernel_qn(ensemble, 2, 2, opts);
  const auto edge = pattern({{0, 1}, {1, 0}});
  const double stay = q.probability(edge, edge);
  CHECK(std::abs(stay - 21.0 / 32) < 0.03);
  CHECK(hidden_majority_history_probability(20) - stay > 0.3);
}

TEST_CASE("closed-form history probability") {
  CHECK(hidden_majority_history_probability(2) == doctest::Approx(21.0 / 32));
  CHECK(hidden_majority_history_probability(20) == doctest::Approx(0.995834601506798).epsilon(1e-12));
  CHECK_THROWS_AS(hidden_majority_history_probability(1), InvalidArgument);
}

TEST_CASE("markov test: N = 2 gives identical estimators") {
  const auto r = markov_test({}, 50, 2, 20000, Seed{3});
  CHECK(r.one_step == r.history);
  CHECK(r.one_step_conditioning == r.history_conditioning);
  CHECK(std::abs(r.one_step - 21.0 / 32) < r.one_step_halfwidth);
}

TEST_CASE("markov test: edge-only and full simulation agree, thread count is irrelevant") {
  MarkovTestOptions full;
  full.full_simulation = true;
  const auto a = markov_test({}, 8, 5, 300, Seed{4});
  const auto b = markov_test({}, 8, 5, 300, Seed{4}, full);
  CHECK(a.one_step_hits == b.one_step_hits);
  CHECK(a.one_step_conditioning == b.one_step_conditioning);
  CHECK(a.history_hits == b.history_hits);
  CHECK(a.history_conditioning == b.history_conditioning);

  MarkovTestOptions four;
  four.threads = 4;
  const auto c = markov_test({}, 50, 10, 50000, Seed{5});
  const auto d = markov_test({}, 50, 10, 50000, Seed{5}, four);
  CHECK(c.history_hits == d.history_hits);
  CHECK(c.one_step == d.one_step);
}

TEST_CASE("markov test reports missing conditioning events") {
  // one run can easily miss a 40-step all-ones history
  bool thrown = false;
  for (std::uint64_t s = 0; s < 10 && !thrown; ++s) {
    try {
      markov_test({}, 10, 40, 1, Seed{s});
    } catch (const InsufficientData&) {
      thrown = true;
    }
  }
  CHECK(thrown);
  CHECK_THROWS_AS(markov_test({}, 1, 20, 10, Seed{0}), InvalidArgument);
}

TEST_CASE("exchangeability test modes") {
  const auto y = random_array(8, 2, 7);
  CHECK(exchangeability_test(y, 2, 10, SubarrayMode::exact_mode()).statistic == 0.0);

  const RepresentingFunction f(family::IidEntry{EntryLaw::bernoulli(0.5)}, Alphabet::finite(2), false, false);
  int within = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const auto a = sample_exchangeable(f, 12, Seed{trial});
    const auto r = exchangeability_test(a, 2, 5, SubarrayMode::monte_carlo(2000, Seed{trial + 1000}));
    if (r.statistic <= 2 * r.null_band) ++within;
  }
  CHECK(within >= 95);
}

TEST_CASE("dispersion test flags non-exchangeable rows") {
  const int m = 30;
  std::vector<double> v(m * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) v[i * m + j] = (i + 1 <= m / 2) ? 1.0 : 0.0;
  }
  const FiniteArray half(m, Alphabet::finite(2), v);
  const auto r = dispersion_test(half, 500, Seed{1});
  CHECK(r.statistic > r.band);
  CHECK(r.replicates == 500);
  CHECK(dispersion_test(half, 500, Seed{1}, 3).band == r.band);

  const RepresentingFunction f(family::IidEntry{EntryLaw::bernoulli(0.5)}, Alphabet::finite(2), false, false);
  const auto iid = dispersion_test(sample_exchangeable(f, m, Seed{2}), 500, Seed{3});
  CHECK(iid.statistic < 2 * iid.band);
}

TEST_CASE("locality holds for state-independent refreshes") {
  const std::uint64_t R = 4000;
  const std::vector<TransitionKernel> kernels{
      TransitionKernel(kernel::IidRefresh{EntryLaw::bernoulli(0.4)}, TimeMode::Discrete),
      TransitionKernel(kernel::GlobalRefresh{.probability = 0.5}, TimeMode::Discrete),
  };
  for (const auto& k : kernels) {
    for (std::uint64_t pair = 0; pair < 20; ++pair) {
      auto x = random_array(5, 2, derive_key(80, Role::Draw, pair));
      auto alt = random_array(5, 2, derive_key(81, Role::Draw, pair));
      std::vector<double> v(alt.values().begin(), alt.values().end());
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) v[i * 5 + j] = x(i, j);
      }
      alt = FiniteArray(5, Alphabet::finite(2), v);
      const auto r = locality_test(k, 2, x, alt, 2, R, Seed{pair});
      CHECK(r.tv <= r.noise_band);
    }
  }
}

TEST_CASE("hidden-majority estimate mode is not local") {
  const int m = 6;
  std::vector<double> lonely(m * m, 0.0), complete(m * m, 1.0);
  lonely[1] = lonely[m] = 1.0;
  for (int i = 0; i < m; ++i) complete[i * m + i] = 0.0;
  const FiniteArray x(m, Alphabet::finite(2), lonely, kGraph);
  const FiniteArray x_alt(m, Alphabet::finite(2), complete, kGraph);
  const TransitionKernel k(kernel::HiddenMajority{HiddenMode::Estimate}, TimeMode::Discrete);
  const std::uint64_t R = 20000;
  const auto r = locality_test(k, 2, x, x_alt, 2, R, Seed{9});
  // From x every type is 0 and nothing moves, so the tv is P_alt(X12(2) = 0).
  const double oracle = 1.0 - exarray::testing::complete_start_edge_probability();
  CHECK(std::abs(r.tv - oracle) < 4 * std::sqrt(oracle * (1 - oracle) / R));
  CHECK(r.tv > 3 * r.noise_band);

  CHECK_THROWS_AS(locality_test(TransitionKernel(kernel::HiddenMajority{}, TimeMode::Discrete), 2, x, x_alt, 2, 10,
                                Seed{1}),
                  InvalidArgument);
  CHECK_THROWS_AS(locality_test(k, 3, x, x_alt, 2, 10, Seed{1}), InvalidArgument);
}

TEST_CASE("restriction law of samples") {
  const auto a = binary({{1, 0}, {0, 1}});
  const auto b = binary({{0, 0}, {0, 1}});
  const auto law = restriction_law({a, a, b}, 1);
  CHECK(law.weight(pattern({{1}})) == doctest::Approx(2.0 / 3));
}
