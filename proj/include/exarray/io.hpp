#ifndef EXARRAY_IO_HPP
#define EXARRAY_IO_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "exarray/analysis.hpp"
#include "exarray/array.hpp"
#include "exarray/dynamics.hpp"
#include "exarray/limits.hpp"
#include "exarray/sampler.hpp"

namespace exarray::io {

using Json = nlohmann::ordered_json;

// Array text format:
//   m k flags
//   <m rows of m whitespace-separated values>
// k = 0 means the unit interval; flags is a comma-separated subset of
// {sym, zdiag}, written as "-" when empty. Indices are 0-based.
FiniteArray parse_array(std::istream& in);
void write_array(std::ostream& out, const FiniteArray& y);
FiniteArray read_array_file(const std::string& path);
void write_array_file(const std::string& path, const FiniteArray& y);

Json alphabet_to_json(const Quantizer& space);
Quantizer quantizer_from_json(const Json& j);

/// {"n": ..., "alphabet": ..., "atoms": [{"pattern": [[...]], "weight": ...}]}
Json measure_to_json(const EmpiricalMeasure& mu);
EmpiricalMeasure measure_from_json(const Json& j);

EntryLaw law_from_json(const Json& j);
Json law_to_json(const EntryLaw& law);

/// A parsed sampler config: a representing function or the hidden-majority initial law.
struct SamplerConfig {
  std::optional<RepresentingFunction> f;
  bool counterexample = false;
  bool weakly_exchangeable = false;
  bool zero_diagonal = false;
};

SamplerConfig sampler_config_from_json(const Json& j);
TransitionKernel kernel_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

/// Snapshot and event lines; the first snapshot also records alphabet and flags.
std::string trajectory_to_jsonl(const Trajectory& traj);
Trajectory trajectory_from_jsonl(std::istream& in);
Trajectory read_trajectory_file(const std::string& path);

/// Hidden vertex types, one 0/1 per line.
void write_types_file(const std::string& path, const HiddenState& types);
HiddenState read_types_file(const std::string& path);

/// One "u v" pair per line, 0-based; '#' starts a comment, "# vertices N" fixes the vertex count.
LabeledGraph parse_edge_list(std::istream& in);
LabeledGraph read_edge_list_file(const std::string& path);

Json jumps_to_json(const std::vector<JumpEvent>& jumps, double theta);

}  // namespace exarray::io

#endif  // EXARRAY_IO_HPP
