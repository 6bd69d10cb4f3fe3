#include "exarray/dynamics.hpp"

#include <cmath>
#include <string>

#include "exarray/error.hpp"
#include "exarray/rng.hpp"

namespace exarray {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_rate(double r, const char* what) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidArgument(std::string(what) + " must be a finite rate >= 0");
}

/// Redraws every entry from `law`, respecting the symmetric/zero-diagonal flags.
FiniteArray refresh_all(const FiniteArray& x, const EntryLaw& law, std::uint64_t key) {
  if (law.alphabet() != x.alphabet()) throw InvalidArgument("refresh law alphabet differs from the state alphabet");
  const int m = x.side();
  std::vector<double> out(x.values().begin(), x.values().end());
  for (int i = 0; i < m; ++i) {
    for (int j = x.symmetric() ? i : 0; j < m; ++j) {
      if (i == j && x.zero_diagonal()) continue;
      const double v = law.draw(uniform_at(key, i, j));
      out[static_cast<std::size_t>(i) * m + j] = v;
      if (x.symmetric()) out[static_cast<std::size_t>(j) * m + i] = v;
    }
  }
  return FiniteArray(m, x.alphabet(), std::move(out), x.flags());
}

void check_counterexample_state(const FiniteArray& x) {
  if (x.alphabet() != Alphabet::finite(2) || !x.is_symmetric()) {
    throw InvalidArgument("hidden-majority kernel needs a symmetric binary state");
  }
  for (int i = 0; i < x.side(); ++i) {
    if (x(i, i) != 0.0) throw InvalidArgument("hidden-majority kernel needs a zero diagonal");
  }
}

}  // namespace

TransitionKernel::TransitionKernel(Family family, TimeMode mode) : family_(std::move(family)), mode_(mode) {
  std::visit(overloaded{
                 [&](const kernel::IidRefresh&) {
                   if (mode_ != TimeMode::Discrete) throw InvalidArgument("iid refresh is a discrete-time kernel");
                 },
                 [&](const kernel::GlobalRefresh& g) {
                   if (mode_ == TimeMode::Discrete) {
                     if (!(g.probability >= 0.0 && g.probability <= 1.0)) {
                       throw InvalidArgument("global refresh probability outside [0, 1]");
                     }
                   } else {
                     check_rate(g.rate, "global refresh rate");
                     if (g.rate == 0.0) throw InvalidArgument("continuous-time kernel needs a positive rate");
                   }
                 },
                 [&](const kernel::HiddenMajority&) {
                   if (mode_ != TimeMode::Discrete) throw InvalidArgument("hidden-majority is a discrete-time kernel");
                 },
                 [&](const kernel::RowColumnEntryClocks& c) {
                   if (mode_ != TimeMode::Continuous) throw InvalidArgument("clock kernels are continuous-time");
                   check_rate(c.lambda_global, "lambda_global");
                   check_rate(c.lambda_row, "lambda_row");
                   check_rate(c.lambda_col, "lambda_col");
                   check_rate(c.lambda_entry, "lambda_entry");
                   if (c.lambda_global + c.lambda_row + c.lambda_col + c.lambda_entry == 0.0) {
                     throw InvalidArgument("continuous-time kernel needs a positive rate");
                   }
                 },
             },
             family_);
}

const char* TransitionKernel::name() const {
  return std::visit(overloaded{
                        [](const kernel::IidRefresh&) { return "iid_refresh"; },
                        [](const kernel::GlobalRefresh&) { return "global_refresh"; },
                        [](const kernel::HiddenMajority&) { return "hidden_majority"; },
                        [](const kernel::RowColumnEntryClocks&) { return "clocks"; },
                    },
                    family_);
}

kernel::RowColumnEntryClocks TransitionKernel::as_clocks(int) const {
  if (mode_ != TimeMode::Continuous) throw InvalidArgument("kernel is not continuous-time");
  if (const auto* c = std::get_if<kernel::RowColumnEntryClocks>(&family_)) return *c;
  const auto& g = std::get<kernel::GlobalRefresh>(family_);
  return {.lambda_global = g.rate, .law = g.law};
}

void Trajectory::validate() const {
  if (states.empty()) throw InvalidArgument("trajectory has no states");
  if (times.size() != states.size()) throw InvalidArgument("trajectory times and states differ in length");
  for (std::size_t k = 1; k < states.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw InvalidArgument("trajectory times must increase strictly");
    if (states[k].side() != states[0].side() || states[k].alphabet() != states[0].alphabet()) {
      throw InvalidArgument("trajectory states differ in side or alphabet");
    }
  }
  if (event_log && event_log->size() + 1 != states.size()) {
    throw InvalidArgument("event log must have one event per transition");
  }
}

HiddenState estimate_hidden_types(const FiniteArray& x) {
  if (x.alphabet() != Alphabet::finite(2)) throw InvalidArgument("type estimate needs a binary array");
  const int m = x.side();
  HiddenState h{std::vector<std::uint8_t>(m)};
  for (int i = 0; i < m; ++i) {
    int ones = 0;
    for (int j = 0; j < m; ++j) ones += x.symbol(i, j);
    h.xi[i] = 2 * ones > m ? 1 : 0;
  }
  return h;
}

HiddenState hidden_types(const FiniteArray& x, HiddenMode mode, const HiddenState* latent) {
  if (mode == HiddenMode::Estimate) return estimate_hidden_types(x);
  if (latent == nullptr) throw InvalidArgument("exact hidden mode needs the latent types");
  if (latent->xi.size() != static_cast<std::size_t>(x.side())) {
    throw InvalidArgument("latent type vector length differs from the array side");
  }
  return *latent;
}

int hidden_majority_update(std::uint64_t step_key, int i, int j, int type_i, int type_j, int current) {
  if (type_i == 0 && type_j == 0) return current;
  return uniform_at(step_key, i, j) < counterexample_edge_probability(type_i, type_j) ? 1 : 0;
}

FiniteArray step_discrete(const TransitionKernel& kernel, const FiniteArray& state, const HiddenState* aux,
                          std::uint64_t key) {
  if (kernel.time_mode() != TimeMode::Discrete) throw InvalidArgument("step_discrete needs a discrete-time kernel");
  return std::visit(
      overloaded{
          [&](const kernel::IidRefresh& k) { return refresh_all(state, k.law, derive_key(key, Role::EntryNoise)); },
          [&](const kernel::GlobalRefresh& k) {
            if (k.law.alphabet() != state.alphabet()) {
              throw InvalidArgument("refresh law alphabet differs from the state alphabet");
            }
            if (uniform_at(derive_key(key, Role::Event), 0) < k.probability) {
              return refresh_all(state, k.law, derive_key(key, Role::EntryNoise));
            }
            return state;
          },
          [&](const kernel::HiddenMajority& k) {
            check_counterexample_state(state);
            const HiddenState types = hidden_types(state, k.mode, aux);
            const int m = state.side();
            std::vector<double> out(state.values().begin(), state.values().end());
            for (int i = 0; i < m; ++i) {
              for (int j = i + 1; j < m; ++j) {
                const double v = hidden_majority_update(key, i, j, types.xi[i], types.xi[j], state.symbol(i, j));
                out[static_cast<std::size_t>(i) * m + j] = v;
                out[static_cast<std::size_t>(j) * m + i] = v;
              }
            }
            return FiniteArray(m, state.alphabet(), std::move(out), state.flags());
          },
          [&](const kernel::RowColumnEntryClocks&) -> FiniteArray {
            throw InvalidArgument("clock kernels are continuous-time");
          },
      },
      kernel.family());
}

std::uint64_t step_key(Seed seed, int t) {
  return derive_key(seed.value, Role::Step, static_cast<std::uint64_t>(t));
}

Trajectory simulate_discrete(const TransitionKernel& kernel, const FiniteArray& init, const HiddenState* aux, int T,
                             Seed seed) {
  if (T < 0) throw InvalidArgument("number of steps must be >= 0");
  if (kernel.time_mode() != TimeMode::Discrete) throw InvalidArgument("simulate_discrete needs a discrete-time kernel");
  Trajectory traj;
  traj.mode = TimeMode::Discrete;
  traj.times.reserve(static_cast<std::size_t>(T) + 1);
  traj.states.reserve(static_cast<std::size_t>(T) + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(init);
  for (int t = 1; t <= T; ++t) {
    traj.states.push_back(step_discrete(kernel, traj.states.back(), aux, step_key(seed, t)));
    traj.times.push_back(static_cast<double>(t));
  }
  return traj;
}

Trajectory simulate_ctmc(const kernel::RowColumnEntryClocks& clocks, const FiniteArray& init, double t_max,
                         Seed seed) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InvalidArgument("t_max must be positive and finite");
  const int m = init.side();
  if (m < 2) throw InvalidArgument("clock simulation needs side >= 2");
  if (clocks.law.alphabet() != init.alphabet()) {
    throw InvalidArgument("refresh law alphabet differs from the state alphabet");
  }
  check_rate(clocks.lambda_global, "lambda_global");
  check_rate(clocks.lambda_row, "lambda_row");
  check_rate(clocks.lambda_col, "lambda_col");
  check_rate(clocks.lambda_entry, "lambda_entry");
  const double md = m;
  const double rate_global = clocks.lambda_global;
  const double rate_rows = md * clocks.lambda_row;
  const double rate_cols = md * clocks.lambda_col;
  const double rate_entries = md * md * clocks.lambda_entry;
  const double total = rate_global + rate_rows + rate_cols + rate_entries;
  if (!(total > 0.0)) throw InvalidArgument("all clock rates are zero");

  Trajectory traj;
  traj.mode = TimeMode::Continuous;
  traj.event_log.emplace();
  std::vector<double> values(init.values().begin(), init.values().end());
  traj.times.push_back(0.0);
  traj.states.emplace_back(m, init.alphabet(), values);

  double t = 0.0;
  for (std::uint64_t k = 0;; ++k) {
    Stream rng(derive_key(seed.value, Role::Event, k));
    t += rng.exponential(total);
    if (t > t_max) break;

    GroundTruthEvent ev;
    ev.time = t;
    double pick = rng.uniform() * total;
    if (pick < rate_global) {
      ev.kind = EventKind::Global;
    } else if ((pick -= rate_global) < rate_rows) {
      ev.kind = EventKind::Row;
      ev.i = static_cast<int>(rng.below(m));
    } else if ((pick -= rate_rows) < rate_cols) {
      ev.kind = EventKind::Column;
      ev.j = static_cast<int>(rng.below(m));
    } else {
      ev.kind = EventKind::Entry;
      const auto cell = rng.below(static_cast<std::uint64_t>(m) * m);
      ev.i = static_cast<int>(cell / m);
      ev.j = static_cast<int>(cell % m);
    }

    const std::uint64_t noise = derive_key(seed.value, Role::EntryNoise, k);
    auto redraw = [&](int i, int j) {
      const double v = clocks.law.draw(uniform_at(noise, i, j));
      double& slot = values[static_cast<std::size_t>(i) * m + j];
      if (v != slot) {
        slot = v;
        ev.changed.emplace_back(i, j);
      }
    };
    switch (ev.kind) {
      case EventKind::Global:
        for (int i = 0; i < m; ++i) {
          for (int j = 0; j < m; ++j) redraw(i, j);
        }
        break;
      case EventKind::Row:
        for (int j = 0; j < m; ++j) redraw(ev.i, j);
        break;
      case EventKind::Column:
        for (int i = 0; i < m; ++i) redraw(i, ev.j);
        break;
      case EventKind::Entry:
        redraw(ev.i, ev.j);
        break;
    }
    traj.times.push_back(t);
    traj.states.emplace_back(m, init.alphabet(), values);
    traj.event_log->push_back(std::move(ev));
  }
  return traj;
}

Trajectory simulate(const TransitionKernel& kernel, const FiniteArray& init, const HiddenState* aux, double horizon,
                    Seed seed) {
  if (kernel.time_mode() == TimeMode::Discrete) {
    if (horizon < 0 || std::floor(horizon) != horizon) throw InvalidArgument("discrete horizon must be an integer >= 0");
    return simulate_discrete(kernel, init, aux, static_cast<int>(horizon), seed);
  }
  return simulate_ctmc(kernel.as_clocks(init.side()), init, horizon, seed);
}

FiniteArray run_to(const TransitionKernel& kernel, const FiniteArray& init, const HiddenState* aux, double horizon,
                   Seed seed) {
  if (kernel.time_mode() == TimeMode::Discrete) {
    if (horizon < 0 || std::floor(horizon) != horizon) throw InvalidArgument("discrete horizon must be an integer >= 0");
    FiniteArray x = init;
    for (int t = 1; t <= static_cast<int>(horizon); ++t) x = step_discrete(kernel, x, aux, step_key(seed, t));
    return x;
  }
  return simulate_ctmc(kernel.as_clocks(init.side()), init, horizon, seed).states.back();
}

}  // namespace exarray
