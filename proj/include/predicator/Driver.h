//===-- predicator/Driver.h - Command-line front end ----------*- C++ -*-===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef PREDICATOR_DRIVER_H
#define PREDICATOR_DRIVER_H

#include "predicator/Tuner.h"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace predicator {

enum class ReportFormat { Csv, Tsv };

inline char separator(ReportFormat F) { return F == ReportFormat::Tsv ? '\t' : ','; }

/// Bundle file names.
inline constexpr const char *SummaryFile = "summary";
inline constexpr const char *HistoryFile = "history";
inline constexpr const char *OracleFile = "oracle";
inline constexpr const char *GenomeFile = "genome.txt";
inline constexpr const char *BitmaskFile = "bitmask.txt";
inline constexpr const char *ConvertedFile = "converted.ir";

/// `key,value` lines led by `best_speedup`.
std::string tuneSummary(const TuneResult &R, ReportFormat F);
std::string oracleSummary(const OracleResult &R, ReportFormat F);

/// Writes the tuning bundle into Dir (created if missing): summary, genome,
/// bitmask, converted module and history. Returns the written paths.
std::vector<std::filesystem::path>
emitReport(const TuneResult &R, const std::filesystem::path &Dir,
           ReportFormat F = ReportFormat::Csv);
std::vector<std::filesystem::path>
emitReport(const OracleResult &R, const std::filesystem::path &Dir,
           ReportFormat F = ReportFormat::Csv);

/// Runs one invocation. Args excludes the program name. Returns the exit
/// status: 0 success, 1 user error, 2 internal error.
int runCommand(const std::vector<std::string> &Args, std::ostream &Out,
               std::ostream &Err);

} // namespace predicator

#endif // PREDICATOR_DRIVER_H
