#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "shmm/charts.hpp"
#include "shmm/config.hpp"
#include "shmm/errors.hpp"
#include "shmm/io.hpp"
#include "shmm/sweep.hpp"

using namespace shmm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("shmm_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.experiment_id = "tiny";
  c.hmm.m = 2;
  c.hmm.n = 3;
  c.hmm.seed = 5;
  c.train_sizes = {50, 500};
  c.rank_values = {1, 2};
  c.test.length = 3;
  c.trials = 2;
  c.base_seed = 17;
  c.em_config = {0, 30, 1e-6, 2, 0};
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  const std::string text =
      "# comment\n"
      "experiment_id = demo   # trailing\n"
      "hmm = random 3 5 9 0.5\n"
      "train_sizes = 10, 20\n"
      "rank_values = 1,2,3\n"
      "test = sampled 100 6 4\n"
      "correction_mode = signflip+clamp\n"
      "triple_mode = sliding\n"
      "run_em = false\n"
      "em_restarts = 3\n";
  const ExperimentConfig c = apply_config_entries(parse_config_entries(text));
  CHECK(c.experiment_id == "demo");
  CHECK(c.hmm.m == 3);
  CHECK(c.hmm.n == 5);
  CHECK(c.hmm.seed == 9);
  CHECK(c.hmm.concentration == 0.5);
  CHECK(c.train_sizes == std::vector<long long>{10, 20});
  CHECK(c.rank_values == std::vector<int>{1, 2, 3});
  CHECK_FALSE(c.test.exhaustive);
  CHECK(c.test.count == 100);
  CHECK(c.test.length == 6);
  CHECK(c.correction_mode == CorrectionMode::kSignFlipClamp);
  CHECK(c.triple_mode == TripleMode::kSliding);
  CHECK_FALSE(c.run_em);
  CHECK(c.em_config.restarts == 3);
  CHECK(c.trials == 10);
  CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config_entries("bogus = 1\n"), ValidationError);
  CHECK_THROWS_AS(parse_config_entries("trials = 1\ntrials = 2\n"), ValidationError);
  CHECK_THROWS_AS(parse_config_entries("trials\n"), ValidationError);
  CHECK_THROWS_AS(apply_config_entries({{"trials", "ten"}}), ValidationError);
  CHECK_THROWS_AS(apply_config_entries({{"test", "exhaustive"}}), ValidationError);
  CHECK_THROWS_AS(apply_config_entries({{"hmm", "random 1 2"}}), ValidationError);
  CHECK_THROWS_AS(apply_config_entries({{"correction_mode", "round"}}), ValidationError);
  ExperimentConfig c;
  c.test.length = 2;
  CHECK_THROWS_AS(validate_config(c), ValidationError);
  c = {};
  c.trials = 0;
  CHECK_THROWS_AS(validate_config(c), ValidationError);
  c = tiny_config();
  c.rank_values = {4};
  CHECK_THROWS_AS(run_sweep(c), ValidationError);
}

TEST_CASE("load_config resolves model paths against the config directory") {
  const fs::path dir = scratch("load");
  save_hmm(dir / "truth.hmm", random_hmm(2, 3, 1));
  write_text_file(dir / "exp.cfg", "hmm = file truth.hmm\n");
  const ExperimentConfig c = load_config(dir / "exp.cfg");
  CHECK(c.hmm.from_file);
  CHECK(resolve_truth(c).num_symbols() == 3);
  CHECK_THROWS_AS(load_config(dir / "missing.cfg"), IoError);
}

TEST_CASE("cell seeds are pairwise distinct over a million cells") {
  std::unordered_set<std::uint64_t> seen;
  std::size_t cells = 0;
  for (long long N = 1; N <= 100; ++N)
    for (int r = 1; r <= 50; ++r)
      for (int trial = 0; trial < 100; ++trial)
        for (auto stream : {LearnerStream::kSpectral, LearnerStream::kEm}) {
          seen.insert(sweep_cell_seed(2014, N * 1000, r, trial, stream));
          ++cells;
        }
  CHECK(cells == 1000000);
  CHECK(seen.size() == cells);
}

TEST_CASE("cell seeds do not depend on grid positions") {
  ExperimentConfig a = tiny_config();
  ExperimentConfig b = tiny_config();
  b.rank_values = {2};
  b.train_sizes = {500};
  const auto ra = run_sweep(a);
  const auto rb = run_sweep(b);
  for (const auto& rec : rb) {
    bool found = false;
    for (const auto& other : ra)
      if (other.N == rec.N && other.m_hyper == rec.m_hyper && other.trial == rec.trial && other.learner == rec.learner) {
        CHECK(other.seed == rec.seed);
        CHECK(other.l1 == rec.l1);
        found = true;
      }
    CHECK(found);
  }
}

TEST_CASE("exhaustive test set for the small setup has 4096 sequences") {
  TestSpec spec;
  spec.length = 4;
  const TestSet test = build_test_set(random_hmm(4, 8, 1), spec);
  CHECK(test.sequences.size() == 4096);
  double total = 0;
  for (double p : test.true_probs) total += p;
  CHECK(std::abs(total - 1.0) <= 1e-10);
}

TEST_CASE("sweep records and csv") {
  const ExperimentConfig c = tiny_config();
  const fs::path dir = scratch("sweep");
  const auto recs = run_sweep_to_csv(c, dir / "a.csv");
  run_sweep_to_csv(c, dir / "b.csv");
  CHECK(read_text_file(dir / "a.csv") == read_text_file(dir / "b.csv"));

  // 2 sizes x 2 trials x (2 ranks + EM)
  REQUIRE(recs.size() == 12);
  CHECK(recs[0].N == 50);
  CHECK(recs[0].learner == "spectral");
  CHECK(recs[0].m_hyper == 1);
  CHECK(recs[0].trial == 0);
  for (const auto& r : recs) {
    CHECK(r.l1 >= 0.0);
    CHECK((r.neg_prop >= 0.0 && r.neg_prop <= 1.0));
    CHECK(r.wall_time_ms == 0.0);
    if (r.learner == "em") {
      CHECK(r.m_hyper == 2);
      CHECK(r.neg_prop == 0.0);
    }
  }
  std::istringstream header(read_text_file(dir / "a.csv"));
  std::string line;
  std::getline(header, line);
  CHECK(line == kMetricsHeader);
}

TEST_CASE("correction modes leave neg_prop on raw outputs") {
  ExperimentConfig c = tiny_config();
  c.run_em = false;
  c.train_sizes = {20};
  c.rank_values = {3};
  c.hmm.n = 3;
  const auto raw = run_sweep(c);
  c.correction_mode = CorrectionMode::kSignFlipClamp;
  const auto fixed = run_sweep(c);
  REQUIRE(raw.size() == fixed.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    CHECK(raw[i].neg_prop == fixed[i].neg_prop);
    CHECK(fixed[i].loglik > -std::numeric_limits<double>::infinity());
  }
}

TEST_CASE("render_charts") {
  const fs::path dir = scratch("render");
  run_sweep_to_csv(tiny_config(), dir / "tiny.csv");
  const auto written = render_charts(dir / "tiny.csv", dir / "charts");
  std::vector<std::string> names;
  for (const auto& p : written) names.push_back(p.filename().string());
  CHECK(names == std::vector<std::string>{"tiny_l1.svg", "tiny_neg_prop.svg", "tiny_em_vs_spectral.svg"});
  const std::string first = read_text_file(dir / "charts" / "tiny_l1.svg");
  CHECK(first.rfind("<svg", 0) == 0);
  render_charts(dir / "tiny.csv", dir / "again");
  CHECK(read_text_file(dir / "again" / "tiny_l1.svg") == first);

  write_text_file(dir / "empty.csv", std::string(kMetricsHeader) + "\n");
  CHECK_THROWS_AS(render_charts(dir / "empty.csv", dir / "empty_out"), ValidationError);
  CHECK_FALSE(fs::exists(dir / "empty_out" / "experiment_l1.svg"));

  write_text_file(dir / "odd.csv", "foo,bar\n1,2\n");
  CHECK_THROWS_AS(render_charts(dir / "odd.csv", dir / "odd_out"), ValidationError);
  CHECK_THROWS_AS(render_charts(dir / "nope.csv", dir / "x"), IoError);
}

TEST_CASE("render_svg places one marker per point") {
  LineChart chart;
  chart.title = "t";
  chart.series = {{"a", {{1, 2, 2, 2}}}, {"b", {{1, 3, 2, 4}}}};
  chart.whiskers = true;
  const std::string svg = render_svg(chart);
  std::size_t circles = 0;
  for (std::size_t pos = svg.find("<circle"); pos != std::string::npos; pos = svg.find("<circle", pos + 1)) ++circles;
  CHECK(circles == 2);
  CHECK(render_svg(chart) == svg);
}
