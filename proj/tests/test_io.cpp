#include <sstream>

#include "doctest.h"
#include "exarray/error.hpp"
#include "exarray/io.hpp"
#include "exarray/limits.hpp"
#include "helpers.hpp"

using namespace exarray;
using exarray::testing::random_array;
using io::Json;

namespace {

FiniteArray round_trip(const FiniteArray& y) {
  std::stringstream s;
  io::write_array(s, y);
  return io::parse_array(s);
}

FiniteArray parse(const std::string& text) {
  std::istringstream s(text);
  return io::parse_array(s);
}

}  // namespace

TEST_CASE("array text round trip") {
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const FiniteArray::Flags flags{trial % 2 == 0, trial % 4 == 0};
    const auto y = random_array(1 + static_cast<int>(trial % 7), 2 + static_cast<int>(trial % 3), trial, flags);
    CHECK(round_trip(y) == y);
  }
  Stream rng(5);
  std::vector<double> v;
  for (int k = 0; k < 16; ++k) v.push_back(rng.uniform());
  const FiniteArray u(4, Alphabet::unit_interval(), v);
  CHECK(round_trip(u) == u);
}

TEST_CASE("array parse errors") {
  CHECK(parse("2 2 -\n0 1\n1 0\n").side() == 2);
  CHECK(parse("2 2 sym,zdiag\n0 1\n1 0\n").symmetric());
  CHECK_THROWS_AS(parse("2 2 -\n0 1\n1\n"), InvalidArgument);
  CHECK_THROWS_AS(parse("2 2 -\n0 1\n1 0 1\n"), InvalidArgument);
  CHECK_THROWS_AS(parse("2 2 -\n0 x\n1 0\n"), InvalidArgument);
  CHECK_THROWS_AS(parse("2 2 wobbly\n0 1\n1 0\n"), InvalidArgument);
  CHECK_THROWS_AS(parse("2 2 sym\n0 1\n0 0\n"), InvalidArgument);
  CHECK_THROWS_AS(parse("2 1 -\n0 0\n0 0\n"), InvalidArgument);
  CHECK_THROWS_AS(parse(""), InvalidArgument);
  CHECK_THROWS_AS(io::read_array_file("/nonexistent/file.txt"), IoError);
}

TEST_CASE("measure json round trip") {
  const auto y = random_array(5, 3, 8);
  const auto exact = empirical_subarray_exact(y, 2);
  const auto back = io::measure_from_json(io::measure_to_json(exact));
  CHECK(back.exactly_equals(exact));
  CHECK(Json::parse(io::measure_to_json(exact).dump()) == io::measure_to_json(exact));

  const auto space = Quantizer::for_alphabet(Alphabet::unit_interval(), 8);
  const auto weights =
      EmpiricalMeasure::from_weights(1, space, {{Pattern{1, {3}}, 0.25}, {Pattern{1, {7}}, 0.75}});
  const auto wback = io::measure_from_json(io::measure_to_json(weights));
  CHECK(wback.weights() == weights.weights());
  CHECK(wback.space() == space);

  auto broken = io::measure_to_json(exact);
  broken["denominator"] = 7;
  CHECK_THROWS_AS(io::measure_from_json(broken), InvalidArgument);
}

TEST_CASE("sampler configs") {
  const auto c = io::sampler_config_from_json(Json::parse(R"({"family":"constant","value":1,"alphabet":{"kind":"finite","k":3}})"));
  REQUIRE(c.f);
  CHECK(c.f->alphabet() == Alphabet::finite(3));

  const auto g = io::sampler_config_from_json(
      Json::parse(R"({"family":"graphon","grid":[[0.1,0.5],[0.5,0.9]],"weakly_exchangeable":true,"zero_diagonal":true})"));
  CHECK(g.f->symmetric());
  CHECK(g.weakly_exchangeable);

  CHECK(io::sampler_config_from_json(Json::parse(R"({"family":"counterexample"})")).counterexample);
  CHECK(io::sampler_config_from_json(Json::parse(R"({"family":"iid","law":{"probs":[0.2,0.3,0.5]}})"))
            .f->alphabet() == Alphabet::finite(3));
  CHECK(io::sampler_config_from_json(Json::parse(R"({"family":"iid","law":"uniform"})")).f->alphabet().is_unit());

  CHECK_THROWS_AS(io::sampler_config_from_json(Json::parse(R"({"family":"constant","value":1,"colour":2})")),
                  InvalidArgument);
  CHECK_THROWS_AS(io::sampler_config_from_json(Json::parse(R"({"family":"graphon"})")), InvalidArgument);
  CHECK_THROWS_AS(io::sampler_config_from_json(Json::parse(R"({"family":"spline"})")), InvalidArgument);
  CHECK_THROWS_AS(io::sampler_config_from_json(Json::parse(R"({"family":"iid","law":{"bernoulli":1.5}})")),
                  InvalidArgument);
  CHECK_THROWS_AS(io::sampler_config_from_json(Json::parse("[1,2]")), InvalidArgument);
}

TEST_CASE("kernel configs") {
  CHECK(io::kernel_from_json(Json::parse(R"({"family":"iid_refresh","law":{"bernoulli":0.3}})")).time_mode() ==
        TimeMode::Discrete);
  CHECK(io::kernel_from_json(Json::parse(R"({"family":"global_refresh","rate":1})")).time_mode() ==
        TimeMode::Continuous);
  const auto hm = io::kernel_from_json(Json::parse(R"({"family":"hidden_majority","hidden_mode":"estimate"})"));
  CHECK(std::get<kernel::HiddenMajority>(hm.family()).mode == HiddenMode::Estimate);
  const auto clocks = io::kernel_from_json(Json::parse(R"({"family":"clocks","lambda_row":0.5})"));
  CHECK(std::get<kernel::RowColumnEntryClocks>(clocks.family()).lambda_row == 0.5);

  CHECK_THROWS_AS(io::kernel_from_json(Json::parse(R"({"family":"global_refresh","rate":1,"probability":0.5})")),
                  InvalidArgument);
  CHECK_THROWS_AS(io::kernel_from_json(Json::parse(R"({"family":"clocks"})")), InvalidArgument);
  CHECK_THROWS_AS(io::kernel_from_json(Json::parse(R"({"family":"hidden_majority","hidden_mode":"psychic"})")),
                  InvalidArgument);
}

TEST_CASE("trajectory jsonl round trip") {
  const TransitionKernel k(kernel::IidRefresh{EntryLaw::bernoulli(0.5)}, TimeMode::Discrete);
  const auto g = random_array(4, 2, 3, {.symmetric = true, .zero_diagonal = true});
  const auto discrete = simulate_discrete(k, g, nullptr, 5, Seed{1});
  std::istringstream d(io::trajectory_to_jsonl(discrete));
  const auto dback = io::trajectory_from_jsonl(d);
  CHECK(dback.states == discrete.states);
  CHECK(dback.times == discrete.times);
  CHECK(dback.mode == TimeMode::Discrete);
  CHECK_FALSE(dback.event_log);

  const auto ct = simulate_ctmc({.lambda_global = 0.2, .lambda_row = 0.5, .lambda_entry = 0.1},
                                random_array(4, 2, 4), 10, Seed{2});
  const auto text = io::trajectory_to_jsonl(ct);
  std::istringstream c(text);
  const auto cback = io::trajectory_from_jsonl(c);
  CHECK(cback.states == ct.states);
  CHECK(cback.times == ct.times);
  REQUIRE(cback.event_log);
  REQUIRE(cback.event_log->size() == ct.event_log->size());
  for (std::size_t e = 0; e < ct.event_log->size(); ++e) {
    CHECK((*cback.event_log)[e].kind == (*ct.event_log)[e].kind);
    CHECK((*cback.event_log)[e].changed == (*ct.event_log)[e].changed);
    CHECK((*cback.event_log)[e].i == (*ct.event_log)[e].i);
  }
  CHECK(io::trajectory_to_jsonl(cback) == text);

  std::istringstream bad("{\"t\":0,\"state\":[[0,1],[1]]}\n");
  CHECK_THROWS_AS(io::trajectory_from_jsonl(bad), InvalidArgument);
  std::istringstream garbage("not json\n");
  CHECK_THROWS_AS(io::trajectory_from_jsonl(garbage), InvalidArgument);
}

TEST_CASE("edge lists") {
  std::istringstream path("# path\n0 1\n1 2\n");
  const auto g = io::parse_edge_list(path);
  CHECK(g.n() == 3);
  CHECK(g.adjacent(1, 0));
  CHECK_FALSE(g.adjacent(0, 2));

  std::istringstream isolated("# vertices 5\n0 1\n");
  CHECK(io::parse_edge_list(isolated).n() == 5);
  std::istringstream loop("1 1\n");
  CHECK_THROWS_AS(io::parse_edge_list(loop), InvalidArgument);
  std::istringstream extra("0 1 2\n");
  CHECK_THROWS_AS(io::parse_edge_list(extra), InvalidArgument);
  CHECK_THROWS_AS(io::read_edge_list_file("/nonexistent.edges"), IoError);
}
