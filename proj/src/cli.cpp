#include "exarray/cli.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "exarray/analysis.hpp"
#include "exarray/error.hpp"
#include "exarray/io.hpp"
#include "exarray/rng.hpp"
#include "exarray/limits.hpp"
#include "exarray/sampler.hpp"

namespace exarray::cli {

namespace {

using io::Json;

struct GlobalOptions {
  int threads = 1;
  int bins = Quantizer::kDefaultBins;
  std::string format = "json";
};

/// Prints a report as one JSON line, or as a header/value CSV pair of its scalar fields.
void emit(std::ostream& out, const Json& report, const GlobalOptions& g) {
  if (g.format == "csv") {
    std::string header;
    std::string row;
    for (auto it = report.begin(); it != report.end(); ++it) {
      if (it->is_structured()) continue;
      header += (header.empty() ? "" : ",") + it.key();
      row += (row.empty() ? "" : ",") + (it->is_string() ? it->get<std::string>() : it->dump());
    }
    out << header << '\n' << row << '\n';
    return;
  }
  out << report.dump() << '\n';
}

bool is_json_path(const std::string& path) { return std::filesystem::path(path).extension() == ".json"; }

FiniteArray sample_from_config(const io::SamplerConfig& cfg, int m, Seed seed, HiddenState* latent) {
  if (cfg.counterexample) {
    auto s = sample_counterexample_initial(m, seed);
    if (latent != nullptr) latent->xi = s.hidden_types;
    return s.graph;
  }
  return cfg.weakly_exchangeable ? sample_weakly_exchangeable(*cfg.f, m, seed, cfg.zero_diagonal)
                                 : sample_exchangeable(*cfg.f, m, seed);
}

void require_output_dir(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) {
    throw IoError("output directory " + parent.string() + " does not exist");
  }
}

const char* status_name(LimitProfile::Status s) {
  return s == LimitProfile::Status::Converging ? "converging" : "undetermined";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sampling, simulation and analysis of exchangeable random arrays", "exarray"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--threads", g.threads, "Worker threads; results do not depend on this")->check(CLI::Range(1, 1024));
  app.add_option("--bins", g.bins, "Quantization bins for unit-interval entries")->check(CLI::Range(1, 65535));
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  // sample
  auto* sample = app.add_subcommand("sample", "Sample an array from a representing-function config");
  std::string sample_config;
  std::string sample_out = "sample.txt";
  std::string sample_types_out;
  int sample_m = 0;
  std::uint64_t seed = 0;
  sample->add_option("--config", sample_config, "Sampler config (JSON)")->required();
  sample->add_option("--m", sample_m, "Array side")->required()->check(CLI::PositiveNumber);
  sample->add_option("--seed", seed, "Seed");
  sample->add_option("--out", sample_out, "Output array file");
  sample->add_option("--types-out", sample_types_out, "Write hidden vertex types (counterexample family)");

  // limit
  auto* limit = app.add_subcommand("limit", "Empirical sub-array distribution or limit profile");
  std::string limit_in;
  std::string limit_config;
  std::string limit_out = "measure.json";
  std::string limit_mode = "exact";
  std::vector<int> limit_schedule;
  int limit_n = 0;
  std::uint64_t limit_draws = 100000;
  double limit_budget = kDefaultEnumerationBudget;
  double limit_threshold = 0.05;
  bool limit_weak = false;
  auto* limit_in_opt = limit->add_option("--in", limit_in, "Array file");
  limit->add_option("--config", limit_config, "Sampler config (JSON), sampled at the largest scheduled m")
      ->excludes(limit_in_opt);
  limit->add_option("--n", limit_n, "Pattern side")->required()->check(CLI::PositiveNumber);
  limit->add_option("--mode", limit_mode, "Estimator")->check(CLI::IsMember({"exact", "mc"}));
  limit->add_option("--K", limit_draws, "Monte Carlo draws")->check(CLI::PositiveNumber);
  limit->add_option("--seed", seed, "Seed");
  limit->add_option("--schedule", limit_schedule, "Increasing list of m values; produces a limit profile")
      ->delimiter(',');
  limit->add_option("--budget", limit_budget, "Exact enumeration term budget")->check(CLI::PositiveNumber);
  limit->add_option("--threshold", limit_threshold, "Profile convergence threshold")->check(CLI::PositiveNumber);
  limit->add_flag("--weak", limit_weak, "Single-injection estimator for symmetric arrays");
  limit->add_option("--out", limit_out, "Output JSON");

  // graph-density
  auto* density = app.add_subcommand("graph-density", "ind(F, G) and t(F, G) for edge-list graphs");
  std::string density_f;
  std::string density_g;
  density->add_option("--F", density_f, "Pattern graph edge list")->required();
  density->add_option("--G", density_g, "Host graph edge list")->required();

  // simulate
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a trajectory");
  std::string sim_kernel;
  std::string sim_init;
  std::string sim_out = "traj.jsonl";
  std::string sim_types;
  int sim_m = 0;
  int sim_T = -1;
  double sim_tmax = -1.0;
  simulate_cmd->add_option("--kernel", sim_kernel, "Kernel config (JSON)")->required();
  simulate_cmd->add_option("--init", sim_init, "Initial array file, or sampler config (*.json)")->required();
  simulate_cmd->add_option("--types", sim_types, "Hidden vertex types for an array --init (one 0/1 per line)");
  simulate_cmd->add_option("--m", sim_m, "Side when --init is a sampler config")->check(CLI::PositiveNumber);
  auto* t_opt = simulate_cmd->add_option("--T", sim_T, "Steps (discrete time)")->check(CLI::NonNegativeNumber);
  simulate_cmd->add_option("--tmax", sim_tmax, "Horizon (continuous time)")->excludes(t_opt);
  simulate_cmd->add_option("--seed", seed, "Seed");
  simulate_cmd->add_option("--out", sim_out, "Output trajectory (JSON lines)");

  // jumps
  auto* jumps = app.add_subcommand("jumps", "Classify the jumps of a trajectory");
  std::string jumps_traj;
  std::string jumps_out = "events.json";
  double theta = kDefaultThetaGlobal;
  jumps->add_option("--traj", jumps_traj, "Trajectory (JSON lines)")->required();
  jumps->add_option("--theta", theta, "Global-jump fraction threshold");
  jumps->add_option("--out", jumps_out, "Output JSON");

  // markov-test
  auto* markov = app.add_subcommand("markov-test", "Non-Markov test for the hidden-majority restriction");
  int mt_m = 50;
  int mt_N = 20;
  std::uint64_t mt_R = 1000000;
  std::string mt_hidden = "exact";
  bool mt_full = false;
  markov->add_option("--m", mt_m, "Graph size")->check(CLI::Range(2, 1 << 20));
  markov->add_option("--N", mt_N, "History length")->check(CLI::Range(2, 1 << 20));
  markov->add_option("--R", mt_R, "Runs")->check(CLI::PositiveNumber);
  markov->add_option("--seed", seed, "Seed");
  markov->add_option("--hidden-mode", mt_hidden, "Type mode")->check(CLI::IsMember({"exact", "estimate"}));
  markov->add_flag("--full", mt_full, "Simulate the whole graph instead of edge {1,2}");

  // locality-test
  auto* locality = app.add_subcommand("locality-test", "Does the restricted law depend only on the restriction?");
  std::string loc_kernel;
  std::string loc_x;
  std::string loc_alt;
  int loc_n = 2;
  double loc_T = 1;
  std::uint64_t loc_R = 100000;
  locality->add_option("--kernel", loc_kernel, "Kernel config (JSON)")->required();
  locality->add_option("--x", loc_x, "First starting array")->required();
  locality->add_option("--x-alt", loc_alt, "Second starting array")->required();
  locality->add_option("--n", loc_n, "Restriction size")->check(CLI::PositiveNumber);
  locality->add_option("--T", loc_T, "Horizon (steps or time)")->check(CLI::NonNegativeNumber);
  locality->add_option("--R", loc_R, "Runs per starting state")->check(CLI::PositiveNumber);
  locality->add_option("--seed", seed, "Seed");

  // exch-test
  auto* exch = app.add_subcommand("exch-test", "Exchangeability diagnostics for one array");
  std::string exch_in;
  std::string exch_mode = "dispersion";
  int exch_n = 2;
  int exch_P = 5;
  std::uint64_t exch_K = 100000;
  std::uint64_t exch_B = 999;
  exch->add_option("--in", exch_in, "Array file")->required();
  exch->add_option("--mode", exch_mode, "Test variant")->check(CLI::IsMember({"exact", "mc", "dispersion"}));
  exch->add_option("--n", exch_n, "Pattern side")->check(CLI::PositiveNumber);
  exch->add_option("--P", exch_P, "Random permutation pairs")->check(CLI::PositiveNumber);
  exch->add_option("--K", exch_K, "Monte Carlo draws")->check(CLI::PositiveNumber);
  exch->add_option("--B", exch_B, "Bootstrap replicates")->check(CLI::PositiveNumber);
  exch->add_option("--seed", seed, "Seed");

  auto fail = [&](const char* kind, const std::string& message, int code, Json extra = Json::object()) {
    Json report;
    report["status"] = "error";
    report["error"] = kind;
    report["message"] = message;
    for (auto it = extra.begin(); it != extra.end(); ++it) report[it.key()] = it.value();
    err << "exarray: " << message << '\n';
    out << report.dump() << '\n';
    return code;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    return fail("schema", e.what(), kSchema);
  }

  const EstimatorOptions est{.bins = g.bins, .threads = g.threads};
  try {
    Json report;
    if (*sample) {
      const auto cfg = io::sampler_config_from_json(io::read_json_file(sample_config));
      require_output_dir(sample_out);
      HiddenState latent;
      const FiniteArray y = sample_from_config(cfg, sample_m, Seed{seed}, &latent);
      io::write_array_file(sample_out, y);
      report["command"] = "sample";
      report["m"] = sample_m;
      report["seed"] = seed;
      report["out"] = sample_out;
      if (cfg.counterexample && !sample_types_out.empty()) {
        io::write_types_file(sample_types_out, latent);
        report["types_out"] = sample_types_out;
      }
    } else if (*limit) {
      if (limit_in.empty() == limit_config.empty()) throw InvalidArgument("limit needs exactly one of --in and --config");
      require_output_dir(limit_out);
      EstimatorOptions opts = est;
      opts.budget = limit_budget;
      std::optional<io::SamplerConfig> cfg;
      if (!limit_config.empty()) {
        cfg = io::sampler_config_from_json(io::read_json_file(limit_config));
        if (cfg->counterexample) throw InvalidArgument("limit --config does not accept the counterexample family");
      }
      Json doc;
      report["command"] = "limit";
      report["n"] = limit_n;
      if (!limit_schedule.empty()) {
        ArraySource source = cfg ? ArraySource{SamplerSource{*cfg->f, cfg->weakly_exchangeable, cfg->zero_diagonal}}
                                 : ArraySource{io::read_array_file(limit_in)};
        const auto profile = limit_profile(source, limit_n, limit_schedule, limit_draws, Seed{seed},
                                           {.estimator = opts, .threshold = limit_threshold, .weak = limit_weak});
        doc["n"] = profile.n;
        doc["status"] = status_name(profile.status);
        doc["gap"] = profile.gap;
        Json entries = Json::array();
        for (const auto& e : profile.entries) {
          Json entry;
          entry["m"] = e.m;
          entry["exact"] = e.exact;
          entry["measure"] = io::measure_to_json(e.measure);
          entries.push_back(std::move(entry));
        }
        doc["entries"] = std::move(entries);
        report["profile_status"] = doc["status"];
        report["gap"] = profile.gap;
        report["entries"] = profile.entries.size();
      } else {
        if (cfg) throw InvalidArgument("limit --config needs --schedule");
        const FiniteArray y = io::read_array_file(limit_in);
        const SubarrayMode mode =
            limit_mode == "exact" ? SubarrayMode::exact_mode() : SubarrayMode::monte_carlo(limit_draws, Seed{seed});
        const EmpiricalMeasure mu = limit_weak       ? empirical_subarray_weak(y, limit_n, mode, opts)
                                    : mode.exact     ? empirical_subarray_exact(y, limit_n, opts)
                                                     : empirical_subarray_mc(y, limit_n, limit_draws, Seed{seed}, opts);
        doc = io::measure_to_json(mu);
        report["mode"] = limit_mode;
        report["support"] = mu.support_size();
        if (mu.is_exact()) report["denominator"] = mu.denominator();
      }
      io::write_text_file(limit_out, doc.dump() + "\n");
      report["out"] = limit_out;
    } else if (*density) {
      const auto f = io::read_edge_list_file(density_f);
      const auto host = io::read_edge_list_file(density_g);
      const auto ind = graph_ind(f, host);
      report["command"] = "graph-density";
      report["F_vertices"] = f.n();
      report["G_vertices"] = host.n();
      report["ind"] = ind;
      report["injections"] = falling_factorial(host.n(), f.n());
      report["density"] = static_cast<double>(ind) / static_cast<double>(falling_factorial(host.n(), f.n()));
    } else if (*simulate_cmd) {
      const TransitionKernel kernel = io::kernel_from_json(io::read_json_file(sim_kernel));
      require_output_dir(sim_out);
      HiddenState latent;
      bool have_latent = false;
      FiniteArray init = [&] {
        if (is_json_path(sim_init)) {
          if (sim_m < 1) throw InvalidArgument("--m is required when --init is a sampler config");
          const auto cfg = io::sampler_config_from_json(io::read_json_file(sim_init));
          if (!sim_types.empty()) throw InvalidArgument("--types applies to an array --init only");
          have_latent = cfg.counterexample;
          return sample_from_config(cfg, sim_m, Seed{derive_key(seed, Role::Global)}, &latent);
        }
        auto x = io::read_array_file(sim_init);
        if (!sim_types.empty()) {
          latent = io::read_types_file(sim_types);
          if (latent.xi.size() != static_cast<std::size_t>(x.side())) {
            throw InvalidArgument("--types length differs from the array side");
          }
          have_latent = true;
        }
        return x;
      }();
      double horizon = 0;
      if (kernel.time_mode() == TimeMode::Discrete) {
        if (sim_T < 0) throw InvalidArgument("discrete-time kernels need --T");
        horizon = sim_T;
      } else {
        if (!(sim_tmax > 0)) throw InvalidArgument("continuous-time kernels need --tmax > 0");
        horizon = sim_tmax;
      }
      const HiddenState* aux = nullptr;
      if (const auto* hm = std::get_if<kernel::HiddenMajority>(&kernel.family()); hm && hm->mode == HiddenMode::Exact) {
        if (!have_latent) {
          throw InvalidArgument("exact hidden mode needs latent types; pass --types or use the counterexample sampler config as --init");
        }
        aux = &latent;
      }
      const Trajectory traj = simulate(kernel, init, aux, horizon, Seed{seed});
      io::write_text_file(sim_out, io::trajectory_to_jsonl(traj));
      report["command"] = "simulate";
      report["kernel"] = kernel.name();
      report["states"] = traj.states.size();
      report["events"] = traj.event_log ? traj.event_log->size() : 0;
      report["out"] = sim_out;
    } else if (*jumps) {
      const Trajectory traj = io::read_trajectory_file(jumps_traj);
      require_output_dir(jumps_out);
      const auto events = classify_jumps(traj, theta);
      const Json doc = io::jumps_to_json(events, theta);
      io::write_text_file(jumps_out, doc.dump() + "\n");
      report["command"] = "jumps";
      report["jumps"] = events.size();
      report["counts"] = doc["counts"];
      if (traj.event_log) {
        const auto agree = compare_with_log(traj, events);
        report["agreement"] = agree.rate();
      }
      report["out"] = jumps_out;
    } else if (*markov) {
      const kernel::HiddenMajority k{mt_hidden == "exact" ? HiddenMode::Exact : HiddenMode::Estimate};
      const auto rep = markov_test(k, mt_m, mt_N, mt_R, Seed{seed}, {.threads = g.threads, .full_simulation = mt_full});
      report["command"] = "markov-test";
      report["m"] = rep.m;
      report["N"] = rep.N;
      report["R"] = rep.runs;
      report["one_step"] = rep.one_step;
      report["history"] = rep.history;
      report["one_step_halfwidth"] = rep.one_step_halfwidth;
      report["history_halfwidth"] = rep.history_halfwidth;
      report["history_closed_form"] = hidden_majority_history_probability(mt_N);
      report["ci"] = {{"one_step", {rep.one_step - rep.one_step_halfwidth, rep.one_step + rep.one_step_halfwidth}},
                      {"history", {rep.history - rep.history_halfwidth, rep.history + rep.history_halfwidth}}};
      report["counts"] = {{"one_step_conditioning", rep.one_step_conditioning},
                          {"one_step_hits", rep.one_step_hits},
                          {"history_conditioning", rep.history_conditioning},
                          {"history_hits", rep.history_hits}};
    } else if (*locality) {
      const TransitionKernel kernel = io::kernel_from_json(io::read_json_file(loc_kernel));
      const auto x = io::read_array_file(loc_x);
      const auto x_alt = io::read_array_file(loc_alt);
      const auto rep = locality_test(kernel, loc_n, x, x_alt, loc_T, loc_R, Seed{seed}, g.threads);
      report["command"] = "locality-test";
      report["kernel"] = kernel.name();
      report["n"] = loc_n;
      report["T"] = loc_T;
      report["R"] = rep.runs;
      report["tv"] = rep.tv;
      report["noise_band"] = rep.noise_band;
      report["patterns"] = rep.patterns;
      report["local"] = rep.tv <= rep.noise_band;
    } else if (*exch) {
      const auto y = io::read_array_file(exch_in);
      report["command"] = "exch-test";
      report["mode"] = exch_mode;
      if (exch_mode == "dispersion") {
        const auto rep = dispersion_test(y, exch_B, Seed{seed}, g.threads);
        report["statistic"] = rep.statistic;
        report["band"] = rep.band;
        report["replicates"] = rep.replicates;
        report["exceeds"] = rep.statistic > rep.band;
      } else {
        const SubarrayMode mode =
            exch_mode == "exact" ? SubarrayMode::exact_mode() : SubarrayMode::monte_carlo(exch_K, Seed{seed});
        const auto rep = exchangeability_test(y, exch_n, exch_P, mode, est);
        report["statistic"] = rep.statistic;
        report["null_band"] = rep.null_band;
      }
    }
    report["status"] = report.contains("status") ? report["status"] : Json("ok");
    emit(out, report, g);
    return kOk;
  } catch (const BudgetExceeded& e) {
    return fail("budget_exceeded", e.what(), kBudget,
                {{"terms", e.terms()}, {"budget", e.budget()}, {"suggestion", "rerun with --mode mc --K <draws>"}});
  } catch (const InsufficientData& e) {
    return fail("insufficient_conditioning", e.what(), kInsufficientData,
                {{"conditioning_events", e.events()}, {"runs", e.runs()}});
  } catch (const IoError& e) {
    return fail("io", e.what(), kIo);
  } catch (const InvalidArgument& e) {
    return fail("schema", e.what(), kSchema);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
}

}  // namespace exarray::cli
