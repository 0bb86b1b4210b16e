#include "shmm/io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "shmm/errors.hpp"
#include "shmm/evaluation.hpp"

namespace shmm {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename Vec>
void write_row(std::ostream& out, const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out << ' ';
    out << fmt17(v[i]);
  }
  out << '\n';
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& a) {
  for (Eigen::Index r = 0; r < a.rows(); ++r) write_row(out, Eigen::VectorXd(a.row(r).transpose()));
}

void expect_tag(std::istream& in, const std::string& tag) {
  std::string got;
  if (!(in >> got) || got != tag) throw ValidationError("expected header '" + tag + "', got '" + got + "'");
}

long long read_count(std::istream& in, const char* what) {
  long long v = 0;
  if (!(in >> v)) throw ValidationError(std::string("malformed header field: ") + what);
  return v;
}

double read_number(std::istream& in) {
  double v = 0.0;
  if (!(in >> v)) throw ValidationError("truncated or malformed numeric data");
  return v;
}

Eigen::MatrixXd read_matrix(std::istream& in, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) a(r, c) = read_number(in);
  return a;
}

Eigen::VectorXd read_vector(std::istream& in, Eigen::Index size) {
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = read_number(in);
  return v;
}

void expect_end(std::istream& in) {
  std::string extra;
  if (in >> extra) throw ValidationError("trailing content after data: '" + extra + "'");
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

template <typename Fn>
void save_with(const std::filesystem::path& path, Fn&& fn) {
  std::ostringstream buf;
  fn(buf);
  write_text_file(path, buf.str());
}

}  // namespace

void write_hmm(std::ostream& out, const HmmParams& p) {
  out << "hmm " << p.num_symbols() << ' ' << p.num_states() << '\n';
  write_row(out, p.pi);
  write_matrix(out, p.T);
  write_matrix(out, p.O);
}

HmmParams read_hmm(std::istream& in) {
  expect_tag(in, "hmm");
  const long long n = read_count(in, "n");
  const long long m = read_count(in, "m");
  if (n < 1 || m < 1) throw ValidationError("hmm header needs positive n and m");
  HmmParams p;
  p.pi = read_vector(in, m);
  p.T = read_matrix(in, m, m);
  p.O = read_matrix(in, n, m);
  expect_end(in);
  validate_params(p);
  return p;
}

void write_dataset(std::ostream& out, const Dataset& data) {
  std::size_t t = data.sequences.empty() ? 0 : data.sequences.front().size();
  for (const auto& s : data.sequences)
    if (s.size() != t) t = 0;
  out << "dataset " << data.n << ' ' << data.sequences.size() << ' ' << t << '\n';
  for (const auto& s : data.sequences) {
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (k) out << ' ';
      out << s[k] + 1;
    }
    out << '\n';
  }
}

Dataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("dataset: missing header");
  std::istringstream header(line);
  expect_tag(header, "dataset");
  Dataset data;
  const long long n = read_count(header, "n");
  const long long count = read_count(header, "N");
  const long long t = read_count(header, "t");
  if (n < 1 || count < 0 || t < 0) throw ValidationError("dataset header has invalid sizes");
  data.n = static_cast<int>(n);
  data.sequences.reserve(static_cast<std::size_t>(count));
  while (std::getline(in, line)) {
    std::istringstream row(line);
    Sequence seq;
    long long x = 0;
    while (row >> x) {
      if (x < 1 || x > n) throw ValidationError("dataset: symbol " + std::to_string(x) + " out of range");
      seq.push_back(static_cast<int>(x - 1));
    }
    if (!row.eof()) throw ValidationError("dataset: non-numeric token in line '" + line + "'");
    if (seq.empty()) continue;
    if (t > 0 && static_cast<long long>(seq.size()) != t)
      throw ValidationError("dataset: sequence of length " + std::to_string(seq.size()) + ", header says " +
                            std::to_string(t));
    data.sequences.push_back(std::move(seq));
  }
  if (static_cast<long long>(data.sequences.size()) != count)
    throw ValidationError("dataset: header says " + std::to_string(count) + " sequences, found " +
                          std::to_string(data.sequences.size()));
  return data;
}

void write_operators(std::ostream& out, const ObservableOperators& ops) {
  out << "ops " << ops.n << ' ' << ops.m_hyper << '\n';
  write_matrix(out, ops.U);
  write_row(out, ops.b1);
  write_row(out, ops.b_inf);
  for (const auto& B : ops.B) write_matrix(out, B);
}

ObservableOperators read_operators(std::istream& in) {
  expect_tag(in, "ops");
  const long long n = read_count(in, "n");
  const long long m = read_count(in, "m_hyper");
  if (n < 1 || m < 1 || m > n) throw ValidationError("ops header needs 1 <= m_hyper <= n");
  ObservableOperators ops;
  ops.n = static_cast<int>(n);
  ops.m_hyper = static_cast<int>(m);
  ops.U = read_matrix(in, n, m);
  ops.b1 = read_vector(in, m);
  ops.b_inf = read_vector(in, m);
  for (long long x = 0; x < n; ++x) ops.B.push_back(read_matrix(in, m, m));
  expect_end(in);
  return ops;
}

void write_loglik_trace(std::ostream& out, const std::vector<double>& trace) {
  out << "iteration,loglik\n";
  for (std::size_t i = 0; i < trace.size(); ++i) out << i << ',' << format_double(trace[i]) << '\n';
}

std::string peek_format_tag(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string tag;
  in >> tag;
  return tag;
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << contents;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void save_hmm(const std::filesystem::path& path, const HmmParams& params) {
  save_with(path, [&](std::ostream& o) { write_hmm(o, params); });
}

HmmParams load_hmm(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_hmm(in);
}

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
  save_with(path, [&](std::ostream& o) { write_dataset(o, data); });
}

Dataset load_dataset(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_dataset(in);
}

void save_operators(const std::filesystem::path& path, const ObservableOperators& ops) {
  save_with(path, [&](std::ostream& o) { write_operators(o, ops); });
}

ObservableOperators load_operators(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_operators(in);
}

}  // namespace shmm
