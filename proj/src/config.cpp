#include "shmm/config.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "shmm/errors.hpp"
#include "shmm/io.hpp"

namespace shmm {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) parts.push_back(trim(part));
  return parts;
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& s) {
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ValidationError("config '" + key + "': expected an integer, got '" + s + "'");
  return v;
}

double to_real(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ValidationError("config '" + key + "': expected a number, got '" + s + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ValidationError("config '" + key + "': expected true or false, got '" + s + "'");
}

template <typename Int>
std::vector<Int> to_int_list(const std::string& key, const std::string& s) {
  std::vector<Int> out;
  for (const auto& part : split(s, ',')) out.push_back(to_int<Int>(key, part));
  if (out.empty()) throw ValidationError("config '" + key + "': empty list");
  return out;
}

HmmSource to_hmm_source(const std::string& key, const std::string& s) {
  const auto w = words(s);
  HmmSource src;
  if (w.size() == 2 && w[0] == "file") {
    src.from_file = true;
    src.path = w[1];
    return src;
  }
  if (w.size() == 5 && w[0] == "random") {
    src.m = to_int<int>(key, w[1]);
    src.n = to_int<int>(key, w[2]);
    src.seed = to_int<std::uint64_t>(key, w[3]);
    src.concentration = to_real(key, w[4]);
    return src;
  }
  throw ValidationError("config '" + key + "': expected 'random <m> <n> <seed> <concentration>' or 'file <path>'");
}

TestSpec to_test_spec(const std::string& key, const std::string& s) {
  const auto w = words(s);
  TestSpec spec;
  if (w.size() == 2 && w[0] == "exhaustive") {
    spec.exhaustive = true;
    spec.length = to_int<int>(key, w[1]);
    return spec;
  }
  if (w.size() == 4 && w[0] == "sampled") {
    spec.exhaustive = false;
    spec.count = to_int<int>(key, w[1]);
    spec.length = to_int<int>(key, w[2]);
    spec.seed = to_int<std::uint64_t>(key, w[3]);
    return spec;
  }
  throw ValidationError("config '" + key + "': expected 'exhaustive <t>' or 'sampled <count> <t> <seed>'");
}

TripleMode to_triple_mode(const std::string& key, const std::string& s) {
  if (s == "first") return TripleMode::kFirst;
  if (s == "sliding") return TripleMode::kSliding;
  throw ValidationError("config '" + key + "': expected first or sliding");
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "experiment_id", "hmm",        "train_sizes",   "rank_values",     "train_length",
      "test",          "trials",     "base_seed",     "correction_mode", "triple_mode",
      "run_em",        "em_m_hyper", "em_max_iterations", "em_rel_tolerance", "em_restarts",
      "em_seed",       "record_wall_time"};
  return keys;
}

ConfigEntries parse_config_entries(const std::string& text) {
  ConfigEntries entries;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& known = config_keys();
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ValidationError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (!entries.emplace(key, value).second)
      throw ValidationError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return entries;
}

ExperimentConfig apply_config_entries(const ConfigEntries& entries, ExperimentConfig c) {
  for (const auto& [key, value] : entries) {
    if (key == "experiment_id") {
      if (value.empty() || value.find_first_of(",/\\ \t") != std::string::npos)
        throw ValidationError("config 'experiment_id' must be non-empty without commas, slashes or spaces");
      c.experiment_id = value;
    } else if (key == "hmm") {
      c.hmm = to_hmm_source(key, value);
    } else if (key == "train_sizes") {
      c.train_sizes = to_int_list<long long>(key, value);
    } else if (key == "rank_values") {
      c.rank_values = to_int_list<int>(key, value);
    } else if (key == "train_length") {
      c.train_length = to_int<int>(key, value);
    } else if (key == "test") {
      c.test = to_test_spec(key, value);
    } else if (key == "trials") {
      c.trials = to_int<int>(key, value);
    } else if (key == "base_seed") {
      c.base_seed = to_int<std::uint64_t>(key, value);
    } else if (key == "correction_mode") {
      c.correction_mode = parse_correction_mode(value);
    } else if (key == "triple_mode") {
      c.triple_mode = to_triple_mode(key, value);
    } else if (key == "run_em") {
      c.run_em = to_bool(key, value);
    } else if (key == "em_m_hyper") {
      c.em_config.m_hyper = to_int<int>(key, value);
    } else if (key == "em_max_iterations") {
      c.em_config.max_iterations = to_int<int>(key, value);
    } else if (key == "em_rel_tolerance") {
      c.em_config.rel_tolerance = to_real(key, value);
    } else if (key == "em_restarts") {
      c.em_config.restarts = to_int<int>(key, value);
    } else if (key == "em_seed") {
      c.em_config.seed = to_int<std::uint64_t>(key, value);
    } else if (key == "record_wall_time") {
      c.record_wall_time = to_bool(key, value);
    } else {
      throw ValidationError("unknown config key '" + key + "'");
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  ExperimentConfig c = apply_config_entries(parse_config_entries(read_text_file(path)));
  // Model paths are relative to the config file.
  if (c.hmm.from_file && c.hmm.path.is_relative()) c.hmm.path = path.parent_path() / c.hmm.path;
  return c;
}

void validate_config(const ExperimentConfig& c) {
  if (c.train_sizes.empty()) throw ValidationError("train_sizes must not be empty");
  for (long long N : c.train_sizes)
    if (N < 1 || N > 2'000'000'000LL) throw ValidationError("train_sizes entries must lie in [1, 2e9]");
  if (c.rank_values.empty()) throw ValidationError("rank_values must not be empty");
  for (int r : c.rank_values)
    if (r < 1) throw ValidationError("rank_values entries must be >= 1");
  if (c.trials < 1) throw ValidationError("trials must be >= 1");
  if (c.test.length < 1) throw ValidationError("test length must be >= 1");
  if (!c.test.exhaustive && c.test.count < 1) throw ValidationError("sampled test count must be >= 1");
  const int train_length = c.train_length == 0 ? c.test.length : c.train_length;
  if (train_length < 3) throw ValidationError("training sequences need length >= 3 for triple moments");
  if (!c.hmm.from_file) {
    if (c.hmm.m < 1 || c.hmm.n < 1) throw ValidationError("hmm needs m >= 1 and n >= 1");
    if (!(c.hmm.concentration > 0.0)) throw ValidationError("hmm concentration must be positive");
  }
  if (c.em_config.m_hyper < 0) throw ValidationError("em_m_hyper must be >= 0");
  if (c.em_config.max_iterations < 1) throw ValidationError("em_max_iterations must be >= 1");
  if (!(c.em_config.rel_tolerance > 0.0)) throw ValidationError("em_rel_tolerance must be positive");
  if (c.em_config.restarts < 1) throw ValidationError("em_restarts must be >= 1");
}

}  // namespace shmm
