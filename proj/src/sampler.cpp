#include "exarray/sampler.hpp"

#include <algorithm>
#include <cmath>

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

int equal_cell(double u, std::size_t cells) {
  return std::min(static_cast<int>(u * static_cast<double>(cells)), static_cast<int>(cells) - 1);
}

int breakpoint_cell(double u, const std::vector<double>& cuts) {
  return static_cast<int>(std::upper_bound(cuts.begin(), cuts.end(), u) - cuts.begin());
}

int categorical_index(double u, const std::vector<double>& probs) {
  double acc = 0.0;
  for (std::size_t s = 0; s + 1 < probs.size(); ++s) {
    acc += probs[s];
    if (u < acc) return static_cast<int>(s);
  }
  return static_cast<int>(probs.size()) - 1;
}

std::size_t step_index(const family::StepFunction& s, const std::array<int, 4>& c) {
  std::size_t idx = 0;
  for (int a = 0; a < 4; ++a) idx = idx * (s.breakpoints[a].size() + 1) + c[a];
  return idx;
}

void require_binary(const Alphabet& a, const char* family) {
  if (a != Alphabet::finite(2)) throw InvalidArgument(std::string(family) + " requires the binary alphabet");
}

void validate(const family::Constant& f, const Alphabet& a) {
  if (!a.contains(f.value)) throw InvalidArgument("constant value outside the alphabet");
}

void validate(const family::IidEntry& f, const Alphabet& a) {
  if (f.law.alphabet() != a) throw InvalidArgument("entry law alphabet differs from the output alphabet");
}

void validate(const family::Graphon& f, const Alphabet& a) {
  require_binary(a, "graphon");
  if (f.grid.empty()) throw InvalidArgument("graphon grid is empty");
  for (const auto& row : f.grid) {
    if (row.size() != f.grid.size()) throw InvalidArgument("graphon grid must be square");
    for (double p : row) {
      if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("graphon probability outside [0, 1]");
    }
  }
}

void validate(const family::ThresholdProduct& f, const Alphabet& a) {
  require_binary(a, "threshold product");
  if (!(f.theta >= 0.0 && f.theta <= 1.0)) throw InvalidArgument("threshold outside [0, 1]");
}

void validate(const family::StepFunction& f, const Alphabet& a) {
  std::size_t cells = 1;
  for (const auto& cuts : f.breakpoints) {
    for (std::size_t i = 0; i < cuts.size(); ++i) {
      if (!(cuts[i] > 0.0 && cuts[i] < 1.0) || (i > 0 && !(cuts[i] > cuts[i - 1]))) {
        throw InvalidArgument("step function breakpoints must be strictly increasing in (0, 1)");
      }
    }
    cells *= cuts.size() + 1;
  }
  if (f.values.size() != cells) {
    throw InvalidArgument("step function needs " + std::to_string(cells) + " values, got " +
                          std::to_string(f.values.size()));
  }
  for (double v : f.values) {
    if (!a.contains(v)) throw InvalidArgument("step function value outside the alphabet");
  }
}

void validate(const family::HiddenTypeMixture& f, const Alphabet& a) {
  validate_probabilities(f.type_probs, "type probabilities");
  const std::size_t t = f.type_probs.size();
  if (f.laws.size() != t) throw InvalidArgument("mixture needs one law row per type");
  for (const auto& row : f.laws) {
    if (row.size() != t) throw InvalidArgument("mixture needs one law per type pair");
    for (const auto& law : row) {
      if (law.alphabet() != a) throw InvalidArgument("mixture law alphabet differs from the output alphabet");
    }
  }
}

bool same_law(const EntryLaw& x, const EntryLaw& y) {
  return x.is_uniform() == y.is_uniform() && x.probs() == y.probs();
}

}  // namespace

RepresentingFunction::RepresentingFunction(Family family, Alphabet alphabet, bool symmetric,
                                           bool uses_global)
    : family_(std::move(family)), alphabet_(alphabet), symmetric_(symmetric), uses_global_(uses_global) {
  std::visit([&](const auto& f) { validate(f, alphabet_); }, family_);
  if (symmetric_ && !check_symmetry()) {
    throw InvalidArgument("representing function flagged symmetric is not symmetric in its middle arguments");
  }
}

bool RepresentingFunction::check_symmetry() const {
  return std::visit(
      overloaded{
          [](const family::Constant&) { return true; },
          [](const family::IidEntry&) { return true; },
          [](const family::ThresholdProduct&) { return true; },
          [](const family::Graphon& g) {
            for (std::size_t a = 0; a < g.grid.size(); ++a) {
              for (std::size_t b = 0; b < a; ++b) {
                if (g.grid[a][b] != g.grid[b][a]) return false;
              }
            }
            return true;
          },
          [](const family::StepFunction& s) {
            if (s.breakpoints[1] != s.breakpoints[2]) return false;
            const int n0 = static_cast<int>(s.breakpoints[0].size()) + 1;
            const int n1 = static_cast<int>(s.breakpoints[1].size()) + 1;
            const int n3 = static_cast<int>(s.breakpoints[3].size()) + 1;
            for (int c0 = 0; c0 < n0; ++c0) {
              for (int c1 = 0; c1 < n1; ++c1) {
                for (int c2 = 0; c2 < n1; ++c2) {
                  for (int c3 = 0; c3 < n3; ++c3) {
                    if (s.values[step_index(s, {c0, c1, c2, c3})] != s.values[step_index(s, {c0, c2, c1, c3})]) {
                      return false;
                    }
                  }
                }
              }
            }
            return true;
          },
          [](const family::HiddenTypeMixture& h) {
            for (std::size_t a = 0; a < h.laws.size(); ++a) {
              for (std::size_t b = 0; b < a; ++b) {
                if (!same_law(h.laws[a][b], h.laws[b][a])) return false;
              }
            }
            return true;
          },
      },
      family_);
}

double RepresentingFunction::operator()(double u, double u_row, double u_col, double u_entry) const {
  return std::visit(
      overloaded{
          [](const family::Constant& c) { return c.value; },
          [&](const family::IidEntry& f) { return f.law.draw(u_entry); },
          [&](const family::Graphon& g) {
            const double p = g.grid[equal_cell(u_row, g.grid.size())][equal_cell(u_col, g.grid.size())];
            return u_entry < p ? 1.0 : 0.0;
          },
          [&](const family::ThresholdProduct& t) { return u_row * u_col < t.theta ? 1.0 : 0.0; },
          [&](const family::StepFunction& s) {
            const std::array<int, 4> c{breakpoint_cell(u, s.breakpoints[0]),
                                       breakpoint_cell(u_row, s.breakpoints[1]),
                                       breakpoint_cell(u_col, s.breakpoints[2]),
                                       breakpoint_cell(u_entry, s.breakpoints[3])};
            return s.values[step_index(s, c)];
          },
          [&](const family::HiddenTypeMixture& h) {
            int a = 0;
            int b = 0;
            if (uses_global_) {
              a = b = categorical_index(u, h.type_probs);
            } else {
              a = categorical_index(u_row, h.type_probs);
              b = categorical_index(u_col, h.type_probs);
            }
            return h.laws[a][b].draw(u_entry);
          },
      },
      family_);
}

namespace {

struct LatentKeys {
  std::uint64_t global;
  std::uint64_t rows;
  std::uint64_t cols;
  std::uint64_t noise;

  explicit LatentKeys(Seed seed)
      : global(derive_key(seed.value, Role::Global)),
        rows(derive_key(seed.value, Role::RowLatent)),
        cols(derive_key(seed.value, Role::ColumnLatent)),
        noise(derive_key(seed.value, Role::EntryNoise)) {}
};

}  // namespace

FiniteArray sample_exchangeable(const RepresentingFunction& f, int m, Seed seed) {
  if (m < 1) throw InvalidArgument("sample side must be >= 1");
  const LatentKeys keys(seed);
  const double u = f.uses_global() ? uniform_at(keys.global, 0) : 0.0;
  std::vector<double> u_row(m);
  std::vector<double> u_col(m);
  for (int i = 0; i < m; ++i) {
    u_row[i] = uniform_at(keys.rows, i);
    u_col[i] = uniform_at(keys.cols, i);
  }
  std::vector<double> values(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      values[static_cast<std::size_t>(i) * m + j] = f(u, u_row[i], u_col[j], uniform_at(keys.noise, i, j));
    }
  }
  return FiniteArray(m, f.alphabet(), std::move(values));
}

FiniteArray sample_weakly_exchangeable(const RepresentingFunction& f, int m, Seed seed, bool zero_diagonal) {
  if (m < 1) throw InvalidArgument("sample side must be >= 1");
  if (!f.symmetric()) throw InvalidArgument("weakly exchangeable sampling needs a symmetric representing function");
  if (zero_diagonal && !f.alphabet().contains(0.0)) throw InvalidArgument("zero diagonal needs 0 in the alphabet");
  const LatentKeys keys(seed);
  const double u = f.uses_global() ? uniform_at(keys.global, 0) : 0.0;
  std::vector<double> u_row(m);
  for (int i = 0; i < m; ++i) u_row[i] = uniform_at(keys.rows, i);
  std::vector<double> values(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      double v = f(u, u_row[i], u_row[j], uniform_at(keys.noise, i, j));
      if (i == j && zero_diagonal) v = 0.0;
      values[static_cast<std::size_t>(i) * m + j] = v;
      values[static_cast<std::size_t>(j) * m + i] = v;
    }
  }
  return FiniteArray(m, f.alphabet(), std::move(values), {.symmetric = true, .zero_diagonal = zero_diagonal});
}

double counterexample_edge_probability(int a, int b) {
  static constexpr double kTable[3] = {0.25, 0.5, 0.75};
  return kTable[a + b];
}

int counterexample_type(Seed seed, int i) {
  return uniform_at(derive_key(seed.value, Role::Type), static_cast<std::uint64_t>(i)) < 0.5 ? 1 : 0;
}

int counterexample_edge(Seed seed, int i, int j, int type_i, int type_j) {
  const double u = uniform_at(derive_key(seed.value, Role::EntryNoise), i, j);
  return u < counterexample_edge_probability(type_i, type_j) ? 1 : 0;
}

CounterexampleSample sample_counterexample_initial(int m, Seed seed) {
  if (m < 2) throw InvalidArgument("counterexample graph needs at least 2 vertices");
  std::vector<std::uint8_t> types(m);
  for (int i = 0; i < m; ++i) types[i] = static_cast<std::uint8_t>(counterexample_type(seed, i));
  std::vector<double> values(static_cast<std::size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const double e = counterexample_edge(seed, i, j, types[i], types[j]);
      values[static_cast<std::size_t>(i) * m + j] = e;
      values[static_cast<std::size_t>(j) * m + i] = e;
    }
  }
  return {FiniteArray(m, Alphabet::finite(2), std::move(values), {.symmetric = true, .zero_diagonal = true}),
          std::move(types)};
}

}  // namespace exarray
