// shmm: spectral and EM learning of discrete HMMs, with the evaluation sweeps.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shmm/charts.hpp"
#include "shmm/config.hpp"
#include "shmm/em.hpp"
#include "shmm/errors.hpp"
#include "shmm/evaluation.hpp"
#include "shmm/hmm.hpp"
#include "shmm/io.hpp"
#include "shmm/kernels.hpp"
#include "shmm/likelihood.hpp"
#include "shmm/spectral.hpp"
#include "shmm/sweep.hpp"

namespace fs = std::filesystem;
using namespace shmm;

namespace {

// Writes to `path`, or stdout when the path is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_text_file(path, text);
}

template <typename Fn>
std::string to_text(Fn&& fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

std::vector<long long> parse_sizes(const std::string& s) {
  std::vector<long long> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::logic_error&) {
      throw ValidationError("bad size list entry '" + part + "'");
    }
  }
  if (out.empty()) throw ValidationError("empty size list");
  return out;
}

struct Evaluation {
  std::vector<double> raw;
  std::vector<double> corrected;
  bool spectral = false;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral learning and EM for discrete hidden Markov models"};
  app.require_subcommand(1);

  // generate-hmm
  auto* gen = app.add_subcommand("generate-hmm", "Draw a random HMM with Dirichlet columns");
  int gen_m = 4, gen_n = 8;
  std::uint64_t gen_seed = 1;
  double gen_conc = 1.0;
  std::string gen_out;
  gen->add_option("--m", gen_m, "Hidden states")->required();
  gen->add_option("--n", gen_n, "Observation symbols")->required();
  gen->add_option("--seed", gen_seed, "Random seed");
  gen->add_option("--concentration", gen_conc, "Symmetric Dirichlet concentration");
  gen->add_option("--out", gen_out, "Model file (stdout if omitted)");

  // sample-data
  auto* sample = app.add_subcommand("sample-data", "Sample observation sequences from a model");
  std::string sample_model, sample_out;
  int sample_count = 1000, sample_length = 4;
  std::uint64_t sample_seed = 1;
  sample->add_option("--model", sample_model, "Model file")->required();
  sample->add_option("--count", sample_count, "Number of sequences");
  sample->add_option("--length", sample_length, "Sequence length");
  sample->add_option("--seed", sample_seed, "Random seed");
  sample->add_option("--out", sample_out, "Dataset file (stdout if omitted)");

  // learn-spectral
  auto* spec = app.add_subcommand("learn-spectral", "Learn observable operators from a dataset");
  std::string spec_data, spec_out, spec_triples = "first";
  int spec_rank = 0;
  spec->add_option("--data", spec_data, "Dataset file")->required();
  spec->add_option("--rank", spec_rank, "Rank hyperparameter m")->required();
  spec->add_option("--triples", spec_triples, "Triple extraction: first | sliding");
  spec->add_option("--out", spec_out, "Operator file (stdout if omitted)");

  // learn-em
  auto* em = app.add_subcommand("learn-em", "Fit an HMM with Baum-Welch and random restarts");
  std::string em_data, em_out, em_trace;
  EmConfig em_cfg;
  em->add_option("--data", em_data, "Dataset file")->required();
  em->add_option("--states", em_cfg.m_hyper, "Hidden states to fit")->required();
  em->add_option("--max-iterations", em_cfg.max_iterations, "Iteration budget per restart");
  em->add_option("--tolerance", em_cfg.rel_tolerance, "Relative log-likelihood improvement threshold");
  em->add_option("--restarts", em_cfg.restarts, "Random restarts");
  em->add_option("--seed", em_cfg.seed, "Random seed");
  em->add_option("--out", em_out, "Model file (stdout if omitted)");
  em->add_option("--trace", em_trace, "Write the log-likelihood trace CSV here");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Score a learned model against the true model on a test set");
  std::string eval_truth, eval_learned, eval_test, eval_correction = "none";
  int eval_exhaustive = 0;
  eval->add_option("--truth", eval_truth, "True model file")->required();
  eval->add_option("--learned", eval_learned, "Learned operators (ops) or model (hmm) file")->required();
  auto* ex_opt = eval->add_option("--exhaustive", eval_exhaustive, "Use all n^t sequences of this length");
  auto* test_opt = eval->add_option("--test", eval_test, "Test dataset file");
  ex_opt->excludes(test_opt);
  eval->add_option("--correction", eval_correction, "none | clamp | signflip+clamp");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a (N, rank, trial) sweep and write the metrics CSV");
  std::string sweep_config, sweep_out;
  sweep->add_option("--config", sweep_config, "Experiment config file");
  sweep->add_option("--out", sweep_out, "Metrics CSV path")->required();
  std::map<std::string, std::string> overrides;
  std::map<std::string, CLI::Option*> override_opts;
  for (const auto& key : config_keys())
    override_opts[key] = sweep->add_option("--" + key, overrides[key], "Overrides config key '" + key + "'");

  // likelihood-curve
  auto* curve = app.add_subcommand("likelihood-curve", "Likelihood of theta for the symmetric 2-state HMM");
  double curve_theta = 0.6, curve_emission = 0.7;
  std::string curve_lengths = "1,8,32,64", curve_data, curve_out;
  std::uint64_t curve_seed = 1;
  int curve_grid = 1001;
  curve->add_option("--theta-true", curve_theta, "Self-transition probability used to sample data");
  curve->add_option("--emission", curve_emission, "Pr(symbol i | state i)");
  curve->add_option("--lengths", curve_lengths, "Comma-separated sequence lengths to sample");
  curve->add_option("--seed", curve_seed, "Random seed");
  curve->add_option("--grid", curve_grid, "Grid points over [0, 1]");
  curve->add_option("--data", curve_data, "Use the sequences of this dataset instead of sampling");
  curve->add_option("--out", curve_out, "Curve CSV (stdout if omitted)");

  // em-consistency
  auto* cons = app.add_subcommand("em-consistency", "Compare EM and true-parameter training log-likelihoods");
  std::string cons_model, cons_sizes = "1000,10000,100000", cons_out;
  std::uint64_t cons_model_seed = 7, cons_seed = 1;
  int cons_trials = 10, cons_length = 10;
  EmConfig cons_em{2, 5000, 1e-10, 5, 0};
  cons->add_option("--model", cons_model, "True 2x2 model file (random if omitted)");
  cons->add_option("--model-seed", cons_model_seed, "Seed for the random true model");
  cons->add_option("--sizes", cons_sizes, "Comma-separated training sizes");
  cons->add_option("--trials", cons_trials, "Trials per size");
  cons->add_option("--length", cons_length, "Sequence length");
  cons->add_option("--seed", cons_seed, "Base seed");
  cons->add_option("--max-iterations", cons_em.max_iterations, "EM iteration budget");
  cons->add_option("--tolerance", cons_em.rel_tolerance, "EM relative tolerance");
  cons->add_option("--restarts", cons_em.restarts, "EM restarts");
  cons->add_option("--out", cons_out, "Consistency CSV (stdout if omitted)");

  // render
  auto* render = app.add_subcommand("render", "Render SVG charts from a CSV file");
  std::string render_csv, render_dir = ".";
  render->add_option("--csv", render_csv, "Metrics, curve or consistency CSV")->required();
  render->add_option("--out-dir", render_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*gen) {
      emit(gen_out, to_text([&](std::ostream& o) { write_hmm(o, random_hmm(gen_m, gen_n, gen_seed, gen_conc)); }));
    } else if (*sample) {
      const HmmParams model = load_hmm(sample_model);
      const Dataset data = sample_sequences(model, sample_count, sample_length, sample_seed);
      emit(sample_out, to_text([&](std::ostream& o) { write_dataset(o, data); }));
    } else if (*spec) {
      const TripleMode mode = spec_triples == "sliding" ? TripleMode::kSliding
                              : spec_triples == "first" ? TripleMode::kFirst
                                                        : throw ValidationError("--triples must be first or sliding");
      const ObservableOperators ops = learn_spectral(estimate_moments(load_dataset(spec_data), mode), spec_rank);
      if (ops.rank_deficient)
        std::cerr << "warning: projected P21 is numerically rank-deficient below m = " << spec_rank << '\n';
      emit(spec_out, to_text([&](std::ostream& o) { write_operators(o, ops); }));
    } else if (*em) {
      const EmResult fit = em_fit(load_dataset(em_data), em_cfg);
      std::cerr << "loglik " << format_double(fit.loglik_trace.back()) << " after " << fit.loglik_trace.size()
                << " evaluations (restart " << fit.best_restart << (fit.converged ? ", converged" : ", budget hit")
                << ")\n";
      if (!em_trace.empty()) emit(em_trace, to_text([&](std::ostream& o) { write_loglik_trace(o, fit.loglik_trace); }));
      emit(em_out, to_text([&](std::ostream& o) { write_hmm(o, fit.params); }));
    } else if (*eval) {
      const HmmParams truth = load_hmm(eval_truth);
      std::vector<Sequence> test;
      int t = 0;
      if (!eval_test.empty()) {
        test = load_dataset(eval_test).sequences;
        if (test.empty()) throw ValidationError("test set is empty");
        t = static_cast<int>(test.front().size());
        for (const auto& s : test)
          if (static_cast<int>(s.size()) != t) throw ValidationError("test sequences must share one length");
      } else if (eval_exhaustive > 0) {
        t = eval_exhaustive;
        test = enumerate_sequences(truth.num_symbols(), t);
      } else {
        throw ValidationError("evaluate needs --exhaustive <t> or --test <file>");
      }
      const std::vector<double> true_probs = kernels::forward_batch_parallel(truth, test);
      std::vector<double> est;
      double loglik = 0.0;
      const std::string tag = peek_format_tag(eval_learned);
      if (tag == "ops") {
        est = kernels::predict_batch_parallel(load_operators(eval_learned), test);
      } else if (tag == "hmm") {
        const HmmParams learned = load_hmm(eval_learned);
        est = kernels::forward_batch_parallel(learned, test);
      } else {
        throw ValidationError("--learned must be an ops or hmm file");
      }
      const double negatives = neg_prop(est);
      const auto corrected = apply_correction(est, parse_correction_mode(eval_correction));
      loglik = sum_log(corrected);
      std::cout << "test_size " << test.size() << '\n'
                << "l1 " << format_double(normalized_l1(true_probs, corrected, t)) << '\n'
                << "l1_raw " << format_double(normalized_l1(true_probs, est, t)) << '\n'
                << "l1_total_variation " << format_double(total_variation_l1(true_probs, corrected)) << '\n'
                << "neg_prop " << format_double(negatives) << '\n'
                << "loglik " << format_double(loglik) << '\n';
    } else if (*sweep) {
      ConfigEntries entries;
      if (!sweep_config.empty()) entries = parse_config_entries(read_text_file(sweep_config));
      for (const auto& [key, opt] : override_opts)
        if (opt->count() > 0) entries[key] = overrides[key];
      ExperimentConfig cfg = apply_config_entries(entries);
      if (cfg.hmm.from_file && cfg.hmm.path.is_relative() && !sweep_config.empty() && !override_opts["hmm"]->count())
        cfg.hmm.path = fs::path(sweep_config).parent_path() / cfg.hmm.path;
      const auto records = run_sweep_to_csv(cfg, sweep_out);
      std::cerr << "wrote " << records.size() << " records to " << sweep_out << '\n';
    } else if (*curve) {
      SymmetricHmmSpec model;
      model.theta = curve_theta;
      model.emission_correct = curve_emission;
      std::vector<Sequence> seqs;
      if (!curve_data.empty()) {
        const Dataset data = load_dataset(curve_data);
        if (data.n != 2) throw ValidationError("likelihood curves need a 2-symbol dataset");
        seqs = data.sequences;
      } else {
        const HmmParams truth = symmetric_params(model);
        std::uint64_t k = 0;
        for (long long len : parse_sizes(curve_lengths)) {
          if (len < 1) throw ValidationError("lengths must be positive");
          seqs.push_back(sample_sequences(truth, 1, static_cast<int>(len), curve_seed + k++).sequences.front());
        }
      }
      std::vector<LikelihoodCurve> curves;
      for (const auto& s : seqs) {
        curves.push_back(likelihood_curve(model, s, curve_grid));
        std::cerr << "t = " << s.size() << ": " << count_unimodal_modes(curves.back().values) << " mode(s)\n";
      }
      emit(curve_out, to_text([&](std::ostream& o) { write_curves_csv(o, curves); }));
    } else if (*cons) {
      const HmmParams truth = cons_model.empty() ? random_hmm(2, 2, cons_model_seed) : load_hmm(cons_model);
      const auto rows = em_consistency_experiment(truth, parse_sizes(cons_sizes), cons_trials, cons_em,
                                                  cons_length, cons_seed);
      emit(cons_out, to_text([&](std::ostream& o) { write_consistency_csv(o, rows); }));
    } else if (*render) {
      for (const auto& p : render_charts(render_csv, render_dir)) std::cerr << "wrote " << p.string() << '\n';
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
