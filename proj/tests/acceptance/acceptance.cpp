// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "exarray/analysis.hpp"
#include "exarray/dynamics.hpp"
#include "exarray/limits.hpp"
#include "exarray/sampler.hpp"
#include "helpers.hpp"

using namespace exarray;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// 1 and 2 share one run.
const MarkovTestReport& markov_run() {
  static const MarkovTestReport r = markov_test({}, 50, 20, 1000000, Seed{20260101});
  return r;
}

Outcome criterion1() {
  const auto& r = markov_run();
  return {std::abs(r.one_step - 0.65625) <= 0.005,
          fmt("one_step=%.5f (4sigma %.5f) target 0.65625 +- 0.005", r.one_step, r.one_step_halfwidth)};
}

Outcome criterion2() {
  const auto& r = markov_run();
  const double mass = static_cast<double>(r.history_conditioning) / static_cast<double>(r.runs);
  const bool ok = r.history >= 0.97 && r.one_step + r.one_step_halfwidth < r.history - r.history_halfwidth &&
                  mass > 0.05;
  return {ok, fmt("history=%.5f (4sigma %.5f, closed form %.5f), conditioning mass %.4f", r.history,
                  r.history_halfwidth, hidden_majority_history_probability(20), mass)};
}

Outcome criterion3() {
  int checked = 0;
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    Stream rng(derive_key(3, Role::Draw, trial));
    const int m = 3 + static_cast<int>(rng.below(6));
    const auto y = testing::random_array(m, 2, derive_key(30, Role::Draw, trial));
    for (int n = 2; n <= 3; ++n) {
      const auto down = restrict_measure(empirical_subarray_exact(y, n), n - 1);
      const auto direct = empirical_subarray_exact(y, n - 1);
      if (!down.exactly_equals(direct) || !direct.exactly_equals(testing::oracle_measure(y, n - 1))) {
        return {false, fmt("mismatch at trial %g, m=%g, n=%g", double(trial), m, n)};
      }
      ++checked;
    }
  }
  return {true, fmt("%g (array, n) cases exactly consistent", checked)};
}

Outcome criterion4() {
  const double p = 0.3;
  const SamplerSource src{
      RepresentingFunction(family::IidEntry{EntryLaw::bernoulli(p)}, Alphabet::finite(2), false, false)};
  const auto prof = limit_profile(src, 2, {50, 100, 200, 400}, 100000, Seed{4});
  const double tv = tv_distance(prof.entries.back().measure, testing::bernoulli_product_law(2, p));
  return {tv <= 0.05, fmt("tv(final, product law)=%.4f, profile gap %.4f", tv, prof.gap)};
}

Outcome criterion5() {
  const auto edge = LabeledGraph::from_edges(2, {{0, 1}});
  const auto k3 = LabeledGraph::complete(3);
  const auto path = LabeledGraph::from_edges(3, {{0, 1}, {1, 2}});
  const bool exact_ok = graph_ind(edge, k3) == falling_factorial(3, 2) &&
                        3 * graph_ind(edge, path) == 2 * falling_factorial(3, 2);

  const RepresentingFunction er(family::Graphon{{{0.4}}}, Alphabet::finite(2), true, false);
  const LabeledGraph g(sample_weakly_exchangeable(er, 200, Seed{5}, true));
  const double tri = graph_density(k3, g);

  bool invariant = true;
  for (std::uint64_t k = 0; k < 20; ++k) {
    Stream rng(derive_key(50, Role::Draw, k));
    const int fn = 2 + static_cast<int>(rng.below(3));
    const LabeledGraph f(testing::random_array(fn, 2, derive_key(51, Role::Draw, k), {true, true}));
    const LabeledGraph host(testing::random_array(9, 2, derive_key(52, Role::Draw, k), {true, true}));
    const auto pi = Permutation::random(fn, derive_key(53, Role::Draw, k));
    invariant = invariant && graph_ind(f.relabeled(pi), host) == graph_ind(f, host);
  }
  return {exact_ok && std::abs(tri - 0.064) <= 0.01 && invariant,
          fmt("t(edge,K3)=%g t(edge,P3)=%.6f triangle density %.4f, label invariance ", graph_density(edge, k3),
              graph_density(edge, path), tri) +
              (invariant ? "ok" : "violated")};
}

Outcome criterion6() {
  const int m = 40;
  const kernel::RowColumnEntryClocks c{.lambda_global = 0.2, .lambda_row = 0.1, .lambda_col = 0.1,
                                       .lambda_entry = 0.5 / (m * m), .law = EntryLaw::bernoulli(0.5)};
  const auto traj = simulate_ctmc(c, testing::random_array(m, 2, 6), 200, Seed{6});
  const auto a = compare_with_log(traj, classify_jumps(traj));
  return {a.rate() >= 0.99, fmt("%g of %g events agree (%.4f)", double(a.agreeing), double(a.events), a.rate())};
}

Outcome criterion7() {
  const std::uint64_t R = 100000;
  const int m = 6;
  const auto x = testing::random_array(m, 2, 71);
  auto alt_values = testing::random_array(m, 2, 72);
  std::vector<double> v(alt_values.values().begin(), alt_values.values().end());
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) v[i * m + j] = x(i, j);
  }
  const FiniteArray x_alt(m, Alphabet::finite(2), v);
  const auto iid = locality_test(TransitionKernel(kernel::IidRefresh{EntryLaw::bernoulli(0.5)}, TimeMode::Discrete),
                                 2, x, x_alt, 2, R, Seed{7});
  const auto global = locality_test(TransitionKernel(kernel::GlobalRefresh{.probability = 0.5}, TimeMode::Discrete),
                                    2, x, x_alt, 2, R, Seed{8});

  const FiniteArray::Flags graph{true, true};
  std::vector<double> lonely(m * m, 0.0), complete(m * m, 1.0);
  lonely[1] = lonely[m] = 1.0;
  for (int i = 0; i < m; ++i) complete[i * m + i] = 0.0;
  const auto hm = locality_test(TransitionKernel(kernel::HiddenMajority{HiddenMode::Estimate}, TimeMode::Discrete), 2,
                                FiniteArray(m, Alphabet::finite(2), lonely, graph),
                                FiniteArray(m, Alphabet::finite(2), complete, graph), 2, R, Seed{9});
  const double oracle = 1.0 - testing::complete_start_edge_probability();
  const bool oracle_ok = std::abs(hm.tv - oracle) <= 4 * std::sqrt(oracle * (1 - oracle) / R);
  const bool ok = iid.tv <= iid.noise_band && global.tv <= global.noise_band && hm.tv > 3 * hm.noise_band && oracle_ok;
  return {ok, fmt("iid tv %.4f, global tv %.4f (bands %.4f, %.4f); ", iid.tv, global.tv, iid.noise_band,
                  global.noise_band) +
                  fmt("hidden-majority tv %.4f vs band %.4f, brute-force oracle %.4f", hm.tv, hm.noise_band, oracle)};
}

Outcome criterion8() {
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    Stream rng(derive_key(8, Role::Draw, trial));
    const int m = 2 + static_cast<int>(rng.below(6));
    const int n = 1 + static_cast<int>(rng.below(std::min(m, 3)));
    const auto y = testing::random_array(m, 2 + static_cast<int>(rng.below(2)), derive_key(80, Role::Draw, trial));
    const PermutationPair p{Permutation::random(m, derive_key(81, Role::Draw, trial)),
                            Permutation::random(m, derive_key(82, Role::Draw, trial))};
    if (!empirical_subarray_exact(apply_permutation(y, p), n).exactly_equals(empirical_subarray_exact(y, n))) {
      return {false, fmt("invariance fails at trial %g", double(trial))};
    }
  }
  return {true, "100 random (y, p, n) exactly invariant"};
}

// ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

struct CliCase {
  std::string name;
  std::string args;
  std::vector<std::string> outputs;
};

/// Runs the installed binary and returns stdout followed by every output file.
std::string run_cli(const fs::path& dir, const std::string& threads, const CliCase& c) {
  for (const auto& o : c.outputs) fs::remove(dir / o);
  const std::string cmd = "cd \"" + dir.string() + "\" && \"" + EXARRAY_CLI_PATH + "\" --threads " + threads + " " +
                          c.args + " > stdout.txt 2> stderr.txt";
  const int status = std::system(cmd.c_str());
  std::string bytes = "exit " + std::to_string(status) + "\n" + slurp(dir / "stdout.txt");
  for (const auto& o : c.outputs) bytes += "\n--" + o + "--\n" + slurp(dir / o);
  return bytes;
}

Outcome criterion9() {
  const fs::path dir = fs::current_path() / "acceptance_work";
  fs::create_directories(dir);
  write(dir / "iid.json", R"({"family":"iid","law":{"bernoulli":0.3}})");
  write(dir / "ce.json", R"({"family":"counterexample"})");
  write(dir / "hm.json", R"({"family":"hidden_majority"})");
  write(dir / "hm_est.json", R"({"family":"hidden_majority","hidden_mode":"estimate"})");
  write(dir / "clocks.json",
        R"({"family":"clocks","lambda_global":0.2,"lambda_row":0.1,"lambda_col":0.1,"lambda_entry":0.0003})");
  write(dir / "iid_kernel.json", R"({"family":"iid_refresh","law":{"bernoulli":0.5}})");
  write(dir / "edge.edges", "0 1\n");
  write(dir / "path.edges", "0 1\n1 2\n");

  // Inputs for the later commands come from the first ones.
  const std::vector<CliCase> cases{
      {"sample", "sample --config iid.json --m 40 --seed 1 --out y.txt", {"y.txt"}},
      {"sample-ce", "sample --config ce.json --m 30 --seed 2 --out g.txt --types-out xi.txt", {"g.txt", "xi.txt"}},
      {"limit-exact", "limit --in y.txt --n 2 --mode exact --out exact.json", {"exact.json"}},
      {"limit-mc", "limit --in y.txt --n 3 --mode mc --K 20000 --seed 3 --out mc.json", {"mc.json"}},
      {"limit-weak", "limit --in g.txt --n 2 --mode exact --weak --out weak.json", {"weak.json"}},
      {"limit-profile", "limit --config iid.json --n 2 --schedule 20,40,80 --K 20000 --seed 4 --out profile.json",
       {"profile.json"}},
      {"graph-density", "graph-density --F edge.edges --G path.edges", {}},
      {"simulate-discrete", "simulate --kernel hm.json --init ce.json --m 20 --T 10 --seed 5 --out hm.jsonl",
       {"hm.jsonl"}},
      {"simulate-types", "simulate --kernel hm.json --init g.txt --types xi.txt --T 10 --seed 5 --out hm2.jsonl",
       {"hm2.jsonl"}},
      {"simulate-ctmc", "simulate --kernel clocks.json --init y.txt --tmax 20 --seed 6 --out ct.jsonl", {"ct.jsonl"}},
      {"jumps", "jumps --traj ct.jsonl --out jumps.json", {"jumps.json"}},
      {"markov-test", "markov-test --m 50 --N 20 --R 200000 --seed 7", {}},
      {"locality-test", "locality-test --kernel iid_kernel.json --x y.txt --x-alt y.txt --n 2 --T 2 --R 5000 --seed 8",
       {}},
      {"exch-test-mc", "exch-test --in y.txt --mode mc --n 2 --P 5 --K 5000 --seed 9", {}},
      {"exch-test-dispersion", "exch-test --in y.txt --mode dispersion --B 200 --seed 10", {}},
  };
  std::string failures;
  for (const auto& c : cases) {
    const auto a = run_cli(dir, "1", c);
    const auto b = run_cli(dir, "1", c);
    const auto t4 = run_cli(dir, "4", c);
    if (a.rfind("exit 0\n", 0) != 0) {
      failures += " " + c.name + "(exit)";
    } else if (a != b) {
      failures += " " + c.name + "(rerun)";
    } else if (a != t4) {
      failures += " " + c.name + "(threads)";
    }
  }
  if (!failures.empty()) return {false, "differences:" + failures};
  return {true, fmt("%g commands byte-identical across reruns and --threads 1/4", double(cases.size()))};
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9},
  };
  int failed = 0;
  for (const auto& [id, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
