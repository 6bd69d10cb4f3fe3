#include "exarray/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "exarray/error.hpp"

namespace exarray::io {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string format_value(double v, const Alphabet& a) {
  if (a.is_finite()) return std::to_string(static_cast<long long>(v));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_keys(const Json& j, const std::set<std::string>& allowed, const std::string& what) {
  if (!j.is_object()) throw InvalidArgument(what + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.contains(it.key())) throw InvalidArgument(what + ": unknown key \"" + it.key() + "\"");
  }
}

template <class T>
T get(const Json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) throw InvalidArgument(what + ": missing key \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InvalidArgument(what + ": bad value for \"" + key + "\": " + e.what());
  }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback, const std::string& what) {
  return j.contains(key) ? get<T>(j, key, what) : fallback;
}

Json array_values_json(const FiniteArray& y) {
  Json rows = Json::array();
  for (int i = 0; i < y.side(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < y.side(); ++j) {
      if (y.alphabet().is_finite()) {
        row.push_back(y.symbol(i, j));
      } else {
        row.push_back(y(i, j));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Alphabet alphabet_from_json(const Json& j) {
  const std::string kind = get<std::string>(j, "kind", "alphabet");
  if (kind == "finite") return Alphabet::finite(get<int>(j, "k", "alphabet"));
  if (kind == "unit") return Alphabet::unit_interval();
  throw InvalidArgument("alphabet kind must be \"finite\" or \"unit\"");
}

Json plain_alphabet_json(const Alphabet& a) {
  Json j;
  if (a.is_finite()) {
    j["kind"] = "finite";
    j["k"] = a.size();
  } else {
    j["kind"] = "unit";
  }
  return j;
}

std::vector<std::string> flag_names(const FiniteArray::Flags& f) {
  std::vector<std::string> out;
  if (f.symmetric) out.emplace_back("sym");
  if (f.zero_diagonal) out.emplace_back("zdiag");
  return out;
}

FiniteArray::Flags flags_from_names(const std::vector<std::string>& names) {
  FiniteArray::Flags f;
  for (const auto& n : names) {
    if (n == "sym") {
      f.symmetric = true;
    } else if (n == "zdiag") {
      f.zero_diagonal = true;
    } else {
      throw InvalidArgument("unknown array flag \"" + n + "\"");
    }
  }
  return f;
}

}  // namespace

FiniteArray parse_array(std::istream& in) {
  std::string header;
  while (std::getline(in, header)) {
    if (header.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  std::istringstream hs(header);
  int m = 0;
  int k = -1;
  std::string flags_text;
  if (!(hs >> m >> k)) throw InvalidArgument("array header must read \"m k flags\"");
  hs >> flags_text;
  if (m < 1) throw InvalidArgument("array side must be >= 1");
  if (k < 0 || k == 1) throw InvalidArgument("array alphabet size must be 0 (unit interval) or >= 2");
  std::vector<std::string> names;
  if (!flags_text.empty() && flags_text != "-") {
    std::stringstream fs(flags_text);
    std::string item;
    while (std::getline(fs, item, ',')) names.push_back(item);
  }
  const Alphabet alphabet = k == 0 ? Alphabet::unit_interval() : Alphabet::finite(k);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(m) * m);
  std::string token;
  while (values.size() < static_cast<std::size_t>(m) * m && in >> token) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw InvalidArgument("array entry \"" + token + "\" is not a number");
    }
  }
  if (values.size() != static_cast<std::size_t>(m) * m) throw InvalidArgument("array file has too few entries");
  if (in >> token) throw InvalidArgument("array file has trailing entries");
  return FiniteArray(m, alphabet, std::move(values), flags_from_names(names));
}

void write_array(std::ostream& out, const FiniteArray& y) {
  const auto names = flag_names(y.flags());
  std::string flags;
  for (const auto& n : names) flags += (flags.empty() ? "" : ",") + n;
  out << y.side() << ' ' << y.alphabet().size() << ' ' << (flags.empty() ? "-" : flags) << '\n';
  for (int i = 0; i < y.side(); ++i) {
    for (int j = 0; j < y.side(); ++j) out << (j ? " " : "") << format_value(y(i, j), y.alphabet());
    out << '\n';
  }
}

FiniteArray read_array_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open array file " + path);
  return parse_array(in);
}

void write_array_file(const std::string& path, const FiniteArray& y) {
  std::ostringstream out;
  write_array(out, y);
  write_text_file(path, out.str());
}

Json alphabet_to_json(const Quantizer& space) {
  Json j = plain_alphabet_json(space.alphabet);
  if (space.alphabet.is_unit()) j["bins"] = space.bins;
  return j;
}

Quantizer quantizer_from_json(const Json& j) {
  const Alphabet a = alphabet_from_json(j);
  return Quantizer::for_alphabet(a, a.is_unit() ? get<int>(j, "bins", "alphabet") : 0);
}

Json measure_to_json(const EmpiricalMeasure& mu) {
  Json j;
  j["n"] = mu.n();
  j["alphabet"] = alphabet_to_json(mu.space());
  Json atoms = Json::array();
  for (const auto& [p, w] : mu.weights()) {
    Json pattern = Json::array();
    for (int i = 0; i < p.n; ++i) {
      Json row = Json::array();
      for (int c = 0; c < p.n; ++c) row.push_back(p(i, c));
      pattern.push_back(std::move(row));
    }
    Json atom;
    atom["pattern"] = std::move(pattern);
    atom["weight"] = w;
    if (mu.is_exact()) atom["count"] = mu.counts().at(p);
    atoms.push_back(std::move(atom));
  }
  j["atoms"] = std::move(atoms);
  if (mu.is_exact()) j["denominator"] = mu.denominator();
  return j;
}

EmpiricalMeasure measure_from_json(const Json& j) {
  require_keys(j, {"n", "alphabet", "atoms", "denominator"}, "measure");
  const int n = get<int>(j, "n", "measure");
  const Quantizer space = quantizer_from_json(j.at("alphabet"));
  const bool exact = j.contains("denominator");
  EmpiricalMeasure::Counts counts;
  EmpiricalMeasure::Weights weights;
  for (const auto& atom : j.at("atoms")) {
    const auto rows = get<std::vector<std::vector<int>>>(atom, "pattern", "measure atom");
    Pattern p{n, {}};
    if (rows.size() != static_cast<std::size_t>(n)) throw InvalidArgument("measure atom has the wrong side");
    for (const auto& row : rows) {
      if (row.size() != static_cast<std::size_t>(n)) throw InvalidArgument("measure atom has the wrong side");
      for (int c : row) {
        if (c < 0 || c > 65535) throw InvalidArgument("measure atom cell out of range");
        p.cells.push_back(static_cast<std::uint16_t>(c));
      }
    }
    if (exact) {
      counts[p] += get<std::uint64_t>(atom, "count", "measure atom");
    } else {
      weights[p] += get<double>(atom, "weight", "measure atom");
    }
  }
  if (exact) {
    auto mu = EmpiricalMeasure::from_counts(n, space, std::move(counts));
    if (mu.denominator() != get<std::uint64_t>(j, "denominator", "measure")) {
      throw InvalidArgument("measure counts do not add up to the denominator");
    }
    return mu;
  }
  return EmpiricalMeasure::from_weights(n, space, std::move(weights));
}

EntryLaw law_from_json(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "uniform") return EntryLaw::uniform();
    throw InvalidArgument("entry law string must be \"uniform\"");
  }
  require_keys(j, {"bernoulli", "probs", "uniform"}, "entry law");
  if (j.contains("bernoulli")) return EntryLaw::bernoulli(get<double>(j, "bernoulli", "entry law"));
  if (j.contains("probs")) return EntryLaw::categorical(get<std::vector<double>>(j, "probs", "entry law"));
  if (j.contains("uniform")) return EntryLaw::uniform();
  throw InvalidArgument("entry law needs one of \"bernoulli\", \"probs\", \"uniform\"");
}

Json law_to_json(const EntryLaw& law) {
  if (law.is_uniform()) return "uniform";
  Json j;
  j["probs"] = law.probs();
  return j;
}

SamplerConfig sampler_config_from_json(const Json& j) {
  const std::string what = "sampler config";
  if (!j.is_object()) throw InvalidArgument(what + " must be a JSON object");
  const std::string fam = get<std::string>(j, "family", what);
  const std::set<std::string> common = {"family", "alphabet", "symmetric", "uses_global", "weakly_exchangeable",
                                        "zero_diagonal"};
  auto allowed = [&](std::initializer_list<const char*> extra) {
    std::set<std::string> keys = common;
    for (const char* k : extra) keys.insert(k);
    require_keys(j, keys, what + " (" + fam + ")");
  };

  SamplerConfig cfg;
  cfg.weakly_exchangeable = get_or<bool>(j, "weakly_exchangeable", false, what);
  cfg.zero_diagonal = get_or<bool>(j, "zero_diagonal", false, what);
  if (fam == "counterexample") {
    require_keys(j, {"family"}, what + " (counterexample)");
    cfg.counterexample = true;
    cfg.weakly_exchangeable = true;
    cfg.zero_diagonal = true;
    return cfg;
  }
  const bool symmetric = get_or<bool>(j, "symmetric", cfg.weakly_exchangeable, what);
  const bool uses_global = get_or<bool>(j, "uses_global", false, what);
  std::optional<Alphabet> alphabet;
  if (j.contains("alphabet")) alphabet = alphabet_from_json(j.at("alphabet"));
  const Alphabet binary = Alphabet::finite(2);

  RepresentingFunction::Family family;
  Alphabet out = alphabet.value_or(binary);
  if (fam == "constant") {
    allowed({"value"});
    family = family::Constant{get<double>(j, "value", what)};
  } else if (fam == "iid") {
    allowed({"law"});
    family::IidEntry f{law_from_json(j.at("law"))};
    out = alphabet.value_or(f.law.alphabet());
    family = std::move(f);
  } else if (fam == "graphon") {
    allowed({"grid"});
    family = family::Graphon{get<std::vector<std::vector<double>>>(j, "grid", what)};
  } else if (fam == "threshold_product") {
    allowed({"theta"});
    family = family::ThresholdProduct{get<double>(j, "theta", what)};
  } else if (fam == "step") {
    allowed({"breakpoints", "values"});
    const auto cuts = get<std::vector<std::vector<double>>>(j, "breakpoints", what);
    if (cuts.size() != 4) throw InvalidArgument(what + ": step function needs 4 breakpoint lists");
    family::StepFunction s;
    for (int a = 0; a < 4; ++a) s.breakpoints[a] = cuts[a];
    s.values = get<std::vector<double>>(j, "values", what);
    family = std::move(s);
  } else if (fam == "hidden_type_mixture") {
    allowed({"type_probs", "laws"});
    family::HiddenTypeMixture h;
    h.type_probs = get<std::vector<double>>(j, "type_probs", what);
    if (!j.contains("laws") || !j.at("laws").is_array()) throw InvalidArgument(what + ": missing \"laws\" table");
    for (const auto& row : j.at("laws")) {
      if (!row.is_array()) throw InvalidArgument(what + ": \"laws\" must be a table of laws");
      std::vector<EntryLaw> laws;
      for (const auto& l : row) laws.push_back(law_from_json(l));
      h.laws.push_back(std::move(laws));
    }
    if (!alphabet && !h.laws.empty() && !h.laws[0].empty()) out = h.laws[0][0].alphabet();
    family = std::move(h);
  } else {
    throw InvalidArgument(what + ": unknown family \"" + fam + "\"");
  }
  cfg.f.emplace(std::move(family), out, symmetric, uses_global);
  return cfg;
}

TransitionKernel kernel_from_json(const Json& j) {
  const std::string what = "kernel config";
  if (!j.is_object()) throw InvalidArgument(what + " must be a JSON object");
  const std::string fam = get<std::string>(j, "family", what);
  std::optional<TimeMode> mode;
  if (j.contains("time_mode")) {
    const auto tm = get<std::string>(j, "time_mode", what);
    if (tm == "discrete") {
      mode = TimeMode::Discrete;
    } else if (tm == "continuous") {
      mode = TimeMode::Continuous;
    } else {
      throw InvalidArgument(what + ": time_mode must be \"discrete\" or \"continuous\"");
    }
  }
  if (fam == "iid_refresh") {
    require_keys(j, {"family", "law", "time_mode"}, what);
    return TransitionKernel(kernel::IidRefresh{law_from_json(j.at("law"))}, mode.value_or(TimeMode::Discrete));
  }
  if (fam == "global_refresh") {
    require_keys(j, {"family", "law", "probability", "rate", "time_mode"}, what);
    if (j.contains("probability") == j.contains("rate")) {
      throw InvalidArgument(what + ": global_refresh needs exactly one of \"probability\" and \"rate\"");
    }
    kernel::GlobalRefresh g;
    g.law = j.contains("law") ? law_from_json(j.at("law")) : EntryLaw::bernoulli(0.5);
    if (j.contains("probability")) {
      g.probability = get<double>(j, "probability", what);
      return TransitionKernel(g, mode.value_or(TimeMode::Discrete));
    }
    g.rate = get<double>(j, "rate", what);
    return TransitionKernel(g, mode.value_or(TimeMode::Continuous));
  }
  if (fam == "hidden_majority") {
    require_keys(j, {"family", "hidden_mode", "time_mode"}, what);
    const auto hm = get_or<std::string>(j, "hidden_mode", "exact", what);
    if (hm != "exact" && hm != "estimate") throw InvalidArgument(what + ": hidden_mode must be \"exact\" or \"estimate\"");
    return TransitionKernel(kernel::HiddenMajority{hm == "exact" ? HiddenMode::Exact : HiddenMode::Estimate},
                            mode.value_or(TimeMode::Discrete));
  }
  if (fam == "clocks") {
    require_keys(j, {"family", "law", "lambda_global", "lambda_row", "lambda_col", "lambda_entry", "time_mode"}, what);
    kernel::RowColumnEntryClocks c;
    c.lambda_global = get_or<double>(j, "lambda_global", 0.0, what);
    c.lambda_row = get_or<double>(j, "lambda_row", 0.0, what);
    c.lambda_col = get_or<double>(j, "lambda_col", 0.0, what);
    c.lambda_entry = get_or<double>(j, "lambda_entry", 0.0, what);
    c.law = j.contains("law") ? law_from_json(j.at("law")) : EntryLaw::bernoulli(0.5);
    return TransitionKernel(c, mode.value_or(TimeMode::Continuous));
  }
  throw InvalidArgument(what + ": unknown family \"" + fam + "\"");
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument("invalid JSON in " + path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << contents;
  if (!out) throw IoError("failed writing " + path);
}

namespace {

const char* kind_name(EventKind k) {
  switch (k) {
    case EventKind::Global:
      return "global";
    case EventKind::Row:
      return "row";
    case EventKind::Column:
      return "column";
    case EventKind::Entry:
      return "entry";
  }
  return "global";
}

EventKind kind_from_name(const std::string& s) {
  if (s == "global") return EventKind::Global;
  if (s == "row") return EventKind::Row;
  if (s == "column") return EventKind::Column;
  if (s == "entry") return EventKind::Entry;
  throw InvalidArgument("unknown event kind \"" + s + "\"");
}

Json pairs_json(const std::vector<std::pair<int, int>>& pairs) {
  Json out = Json::array();
  for (auto [i, j] : pairs) out.push_back(Json::array({i, j}));
  return out;
}

}  // namespace

std::string trajectory_to_jsonl(const Trajectory& traj) {
  traj.validate();
  std::string out;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    if (k > 0 && traj.event_log) {
      const auto& ev = (*traj.event_log)[k - 1];
      Json e;
      e["t"] = ev.time;
      e["kind"] = kind_name(ev.kind);
      switch (ev.kind) {
        case EventKind::Global:
          e["index"] = Json::array();
          break;
        case EventKind::Row:
          e["index"] = Json::array({ev.i});
          break;
        case EventKind::Column:
          e["index"] = Json::array({ev.j});
          break;
        case EventKind::Entry:
          e["index"] = Json::array({ev.i, ev.j});
          break;
      }
      e["changed"] = pairs_json(ev.changed);
      out += e.dump();
      out += '\n';
    }
    Json s;
    s["t"] = traj.times[k];
    s["state"] = array_values_json(traj.states[k]);
    if (k == 0) {
      s["alphabet"] = plain_alphabet_json(traj.states[0].alphabet());
      s["flags"] = flag_names(traj.states[0].flags());
      s["mode"] = traj.mode == TimeMode::Discrete ? "discrete" : "continuous";
    }
    out += s.dump();
    out += '\n';
  }
  return out;
}

Trajectory trajectory_from_jsonl(std::istream& in) {
  Trajectory traj;
  std::optional<Alphabet> alphabet;
  FiniteArray::Flags flags;
  std::vector<GroundTruthEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw InvalidArgument("trajectory line " + std::to_string(line_no) + ": " + e.what());
    }
    const std::string what = "trajectory line " + std::to_string(line_no);
    if (j.contains("state")) {
      if (!alphabet) {
        alphabet = j.contains("alphabet") ? alphabet_from_json(j.at("alphabet")) : Alphabet::finite(2);
        if (j.contains("flags")) flags = flags_from_names(j.at("flags").get<std::vector<std::string>>());
        if (j.contains("mode")) {
          traj.mode = get<std::string>(j, "mode", what) == "continuous" ? TimeMode::Continuous : TimeMode::Discrete;
        }
      }
      const auto rows = get<std::vector<std::vector<double>>>(j, "state", what);
      std::vector<double> values;
      for (const auto& r : rows) {
        if (r.size() != rows.size()) throw InvalidArgument(what + ": state is not square");
        values.insert(values.end(), r.begin(), r.end());
      }
      traj.states.emplace_back(static_cast<int>(rows.size()), *alphabet, std::move(values), flags);
      traj.times.push_back(get<double>(j, "t", what));
    } else if (j.contains("kind")) {
      GroundTruthEvent ev;
      ev.time = get<double>(j, "t", what);
      ev.kind = kind_from_name(get<std::string>(j, "kind", what));
      const auto index = get_or<std::vector<int>>(j, "index", {}, what);
      if (ev.kind == EventKind::Row && index.size() == 1) ev.i = index[0];
      if (ev.kind == EventKind::Column && index.size() == 1) ev.j = index[0];
      if (ev.kind == EventKind::Entry && index.size() == 2) {
        ev.i = index[0];
        ev.j = index[1];
      }
      for (const auto& p : get_or<std::vector<std::vector<int>>>(j, "changed", {}, what)) {
        if (p.size() != 2) throw InvalidArgument(what + ": changed entries must be [i, j] pairs");
        ev.changed.emplace_back(p[0], p[1]);
      }
      events.push_back(std::move(ev));
    } else {
      throw InvalidArgument(what + ": neither a snapshot nor an event");
    }
  }
  if (!events.empty()) {
    traj.mode = TimeMode::Continuous;
    traj.event_log = std::move(events);
  }
  traj.validate();
  return traj;
}

Trajectory read_trajectory_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trajectory file " + path);
  return trajectory_from_jsonl(in);
}

LabeledGraph parse_edge_list(std::istream& in) {
  std::vector<std::pair<int, int>> edges;
  int declared = -1;
  int max_vertex = -1;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      std::istringstream cs(line.substr(hash + 1));
      std::string word;
      int n = 0;
      if (cs >> word && word == "vertices" && cs >> n) declared = n;
      line.resize(hash);
    }
    std::istringstream ls(line);
    int u = 0;
    int v = 0;
    if (!(ls >> u)) continue;
    if (!(ls >> v)) throw InvalidArgument("edge list line needs two vertex ids: \"" + line + "\"");
    std::string rest;
    if (ls >> rest) throw InvalidArgument("edge list line has extra tokens: \"" + line + "\"");
    edges.emplace_back(u, v);
    max_vertex = std::max({max_vertex, u, v});
  }
  const int n = declared >= 0 ? declared : max_vertex + 1;
  if (n < 1) throw InvalidArgument("edge list defines no vertices");
  return LabeledGraph::from_edges(n, edges);
}

LabeledGraph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open edge list " + path);
  return parse_edge_list(in);
}

void write_types_file(const std::string& path, const HiddenState& types) {
  std::string text;
  for (auto t : types.xi) text += t ? "1\n" : "0\n";
  write_text_file(path, text);
}

HiddenState read_types_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open types file " + path);
  HiddenState h;
  std::string token;
  while (in >> token) {
    if (token != "0" && token != "1") throw InvalidArgument("types file entries must be 0 or 1, got \"" + token + "\"");
    h.xi.push_back(token == "1" ? 1 : 0);
  }
  return h;
}

Json jumps_to_json(const std::vector<JumpEvent>& jumps, double theta) {
  Json j;
  j["theta"] = theta;
  std::map<std::string, std::uint64_t> counts{{"global", 0}, {"row", 0}, {"column", 0}, {"single", 0}, {"sparse", 0}};
  Json events = Json::array();
  for (const auto& ev : jumps) {
    Json e;
    e["t"] = ev.time;
    e["index"] = ev.index;
    e["class"] = to_string(ev.cls);
    if (ev.cls == JumpClass::Row) e["row"] = ev.i;
    if (ev.cls == JumpClass::Column) e["column"] = ev.j;
    if (ev.cls == JumpClass::Single) e["entry"] = Json::array({ev.i, ev.j});
    e["changed"] = pairs_json(ev.changed);
    events.push_back(std::move(e));
    ++counts[to_string(ev.cls)];
  }
  j["counts"] = counts;
  j["events"] = std::move(events);
  return j;
}

}  // namespace exarray::io
