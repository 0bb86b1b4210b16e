#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "shmm/errors.hpp"
#include "shmm/io.hpp"

using namespace shmm;

TEST_CASE("model, dataset and operator files round-trip exactly") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const HmmParams p = random_hmm(1 + static_cast<int>(seed % 4), 2 + static_cast<int>(seed % 5), seed);
    std::stringstream model;
    write_hmm(model, p);
    const HmmParams back = read_hmm(model);
    CHECK(back.pi == p.pi);
    CHECK(back.T == p.T);
    CHECK(back.O == p.O);

    const Dataset d = sample_sequences(p, 20, 5, seed);
    std::stringstream data;
    write_dataset(data, d);
    const Dataset dback = read_dataset(data);
    CHECK(dback.sequences == d.sequences);
    CHECK(dback.n == d.n);

    const auto ops = learn_spectral(estimate_moments(sample_sequences(p, 500, 3, seed + 1)), 1);
    std::stringstream opsio;
    write_operators(opsio, ops);
    const auto oback = read_operators(opsio);
    for (const auto& s : d.sequences) CHECK(predict_joint(oback, s) == predict_joint(ops, s));
  }
}

TEST_CASE("model file layout") {
  Eigen::VectorXd pi(2);
  pi << 0.25, 0.75;
  Eigen::MatrixXd T(2, 2), O(3, 2);
  T << 0.9, 0.2, 0.1, 0.8;
  O << 0.5, 0.1, 0.25, 0.1, 0.25, 0.8;
  std::stringstream out;
  write_hmm(out, validate_params(pi, T, O));
  std::string line;
  std::getline(out, line);
  CHECK(line == "hmm 3 2");
  std::getline(out, line);
  CHECK(line == "0.25 0.75");
  std::getline(out, line);
  CHECK(line == "0.90000000000000002 0.20000000000000001");
}

TEST_CASE("dataset symbols are 1-based on disk") {
  Dataset d;
  d.n = 3;
  d.sequences = {{0, 2, 1}, {1, 1, 1}};
  std::stringstream out;
  write_dataset(out, d);
  CHECK(out.str() == "dataset 3 2 3\n1 3 2\n2 2 2\n");
}

TEST_CASE("malformed inputs are rejected") {
  std::stringstream bad_tag("model 2 2\n");
  CHECK_THROWS_AS(read_hmm(bad_tag), ValidationError);

  std::stringstream truncated("hmm 2 2\n0.5 0.5\n1 0\n");
  CHECK_THROWS_AS(read_hmm(truncated), ValidationError);

  std::stringstream not_stochastic("hmm 1 1\n1\n0.5\n1\n");
  CHECK_THROWS_AS(read_hmm(not_stochastic), ValidationError);

  std::stringstream out_of_range("dataset 2 1 2\n1 3\n");
  CHECK_THROWS_AS(read_dataset(out_of_range), ValidationError);

  std::stringstream zero_symbol("dataset 2 1 2\n0 1\n");
  CHECK_THROWS_AS(read_dataset(zero_symbol), ValidationError);

  std::stringstream wrong_count("dataset 2 3 2\n1 2\n");
  CHECK_THROWS_AS(read_dataset(wrong_count), ValidationError);

  std::stringstream wrong_length("dataset 2 1 3\n1 2\n");
  CHECK_THROWS_AS(read_dataset(wrong_length), ValidationError);

  std::stringstream ragged_ok("dataset 2 2 0\n1 2\n2 2 1\n");
  CHECK(read_dataset(ragged_ok).sequences.size() == 2);

  std::stringstream ops_rank("ops 2 3\n");
  CHECK_THROWS_AS(read_operators(ops_rank), ValidationError);

  CHECK_THROWS_AS(load_hmm("/nonexistent/dir/model.hmm"), IoError);
}

TEST_CASE("loglik trace csv") {
  std::stringstream out;
  write_loglik_trace(out, {-10.5, -9.25});
  CHECK(out.str() == "iteration,loglik\n0,-10.5\n1,-9.25\n");
}
