#pragma once

// Plain-text formats. Symbols are 1-based on disk.
//
//   hmm <n> <m>          dataset <n> <N> <t>      ops <n> <m_hyper>
//   pi (1 line, m)       one sequence per line    U (n rows of m_hyper)
//   T  (m rows of m)                              b1 (1 line)
//   O  (n rows of m)                              b_inf (1 line)
//                                                 B_1 .. B_n (m_hyper rows each)
//
// Numbers are written with 17 significant digits. A dataset header with t = 0
// marks sequences of varying length.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "shmm/em.hpp"
#include "shmm/hmm.hpp"
#include "shmm/spectral.hpp"

namespace shmm {

void write_hmm(std::ostream& out, const HmmParams& params);
HmmParams read_hmm(std::istream& in);

void write_dataset(std::ostream& out, const Dataset& data);
Dataset read_dataset(std::istream& in);

void write_operators(std::ostream& out, const ObservableOperators& ops);
ObservableOperators read_operators(std::istream& in);

/// CSV with columns iteration,loglik.
void write_loglik_trace(std::ostream& out, const std::vector<double>& trace);

/// First whitespace-delimited token of a file ("hmm", "ops", "dataset", ...).
std::string peek_format_tag(const std::filesystem::path& path);

// Path helpers. Stream failures raise IoError, malformed content ValidationError.
void save_hmm(const std::filesystem::path& path, const HmmParams& params);
HmmParams load_hmm(const std::filesystem::path& path);
void save_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset load_dataset(const std::filesystem::path& path);
void save_operators(const std::filesystem::path& path, const ObservableOperators& ops);
ObservableOperators load_operators(const std::filesystem::path& path);

/// Writes text to a file, creating parent directories as needed.
void write_text_file(const std::filesystem::path& path, const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace shmm
