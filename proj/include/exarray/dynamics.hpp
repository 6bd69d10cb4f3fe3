#ifndef EXARRAY_DYNAMICS_HPP
#define EXARRAY_DYNAMICS_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "exarray/array.hpp"
#include "exarray/law.hpp"
#include "exarray/sampler.hpp"

namespace exarray {

enum class TimeMode { Discrete, Continuous };

/// How the hidden-majority kernel obtains vertex types.
enum class HiddenMode {
  /// Carry the latent types as simulator state.
  Exact,
  /// Recompute 1{row mean > 1/2} from the current state each step.
  Estimate,
};

namespace kernel {

/// Every entry is redrawn independently from `law` at each step.
struct IidRefresh {
  EntryLaw law = EntryLaw::bernoulli(0.5);
};

/**
 * All entries are redrawn simultaneously: with probability `probability`
 * per step in discrete time, at the jumps of a Poisson clock of intensity
 * `rate` in continuous time.
 */
struct GlobalRefresh {
  double probability = 0.0;
  double rate = 0.0;
  EntryLaw law = EntryLaw::bernoulli(0.5);
};

/**
 * Edges with both endpoints of type 0 are frozen; every other edge {i, j}
 * is redrawn as Bernoulli(1/4, 1/2, 3/4) by the number of type-1 endpoints.
 */
struct HiddenMajority {
  HiddenMode mode = HiddenMode::Exact;
};

/**
 * Independent exponential clocks: one global clock refreshing all entries,
 * one per row, one per column and one per entry.
 */
struct RowColumnEntryClocks {
  double lambda_global = 0.0;
  double lambda_row = 0.0;
  double lambda_col = 0.0;
  double lambda_entry = 0.0;
  EntryLaw law = EntryLaw::bernoulli(0.5);
};

}  // namespace kernel

class TransitionKernel {
 public:
  using Family = std::variant<kernel::IidRefresh, kernel::GlobalRefresh, kernel::HiddenMajority,
                              kernel::RowColumnEntryClocks>;

  TransitionKernel(Family family, TimeMode mode);

  const Family& family() const { return family_; }
  TimeMode time_mode() const { return mode_; }
  const char* name() const;

  /// Continuous-time kernels as an equivalent clock system.
  kernel::RowColumnEntryClocks as_clocks(int side) const;

 private:
  Family family_;
  TimeMode mode_;
};

struct HiddenState {
  std::vector<std::uint8_t> xi;
};

enum class EventKind { Global, Row, Column, Entry };

struct GroundTruthEvent {
  double time = 0.0;
  EventKind kind = EventKind::Global;
  /// Row index for Row, column index for Column, (row, col) for Entry.
  int i = -1;
  int j = -1;
  /// Entries whose value changed, in row-major order.
  std::vector<std::pair<int, int>> changed;
};

/**
 * Piecewise-constant sample path. states[k] is the state on
 * [times[k], times[k+1]) (post-jump convention). In continuous time
 * event_log[k] is the event at times[k + 1].
 */
struct Trajectory {
  TimeMode mode = TimeMode::Discrete;
  std::vector<double> times;
  std::vector<FiniteArray> states;
  std::optional<std::vector<GroundTruthEvent>> event_log;

  std::size_t size() const { return states.size(); }
  /// Throws unless times increase strictly and states share side and alphabet.
  void validate() const;
};

/// Types 1{(1/m) sum_j x_ij > 1/2}; a row mean of exactly 1/2 gives type 0.
HiddenState estimate_hidden_types(const FiniteArray& x);

/**
 * Latent types (mode Exact, requires `latent`) or the row-mean estimate
 * (mode Estimate, requires a binary array).
 */
HiddenState hidden_types(const FiniteArray& x, HiddenMode mode, const HiddenState* latent = nullptr);

/**
 * One hidden-majority update of edge {i, j}, i < j, at the step whose
 * randomness is `step_key`. The value depends only on
 * (step_key, i, j, types, current), so any subset of edges can be advanced
 * on its own and agrees with a full-array step.
 */
int hidden_majority_update(std::uint64_t step_key, int i, int j, int type_i, int type_j, int current);

/// One step of a discrete-time kernel, all randomness drawn from `step_key`.
FiniteArray step_discrete(const TransitionKernel& kernel, const FiniteArray& state, const HiddenState* aux,
                          std::uint64_t step_key);

/// Key used by simulate_discrete for step t (t >= 1).
std::uint64_t step_key(Seed seed, int t);

/// T steps of a discrete-time kernel; T + 1 states at times 0..T.
Trajectory simulate_discrete(const TransitionKernel& kernel, const FiniteArray& init, const HiddenState* aux, int T,
                             Seed seed);

/**
 * Event-driven simulation of the clock system on [0, t_max]. Event k draws
 * its waiting time, kind and index from its own keyed stream; every event
 * is logged and followed by a snapshot, also when the redraw reproduced
 * the old values. Output states carry no symmetric/zero-diagonal flags.
 */
Trajectory simulate_ctmc(const kernel::RowColumnEntryClocks& clocks, const FiniteArray& init, double t_max,
                         Seed seed);

/// simulate_discrete or simulate_ctmc according to the kernel's time mode.
Trajectory simulate(const TransitionKernel& kernel, const FiniteArray& init, const HiddenState* aux,
                    double horizon, Seed seed);

/// Final state after `horizon` steps (discrete) or time (continuous).
FiniteArray run_to(const TransitionKernel& kernel, const FiniteArray& init, const HiddenState* aux, double horizon,
                   Seed seed);

}  // namespace exarray

#endif  // EXARRAY_DYNAMICS_HPP
