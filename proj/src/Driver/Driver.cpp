//===-- Driver.cpp - Command-line front end -------------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "predicator/Driver.h"
#include "predicator/CFG.h"
#include "predicator/Error.h"
#include "predicator/IfConversion.h"
#include "predicator/Parser.h"
#include "predicator/Validator.h"

#include "CLI11.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace predicator;
namespace fs = std::filesystem;

namespace {

std::string readFile(const std::string &Path) {
  std::ifstream In(Path, std::ios::binary);
  if (!In)
    throw UserError("cannot read '" + Path + "'");
  std::ostringstream SS;
  SS << In.rdbuf();
  return SS.str();
}

void writeFile(const fs::path &Path, const std::string &Text) {
  std::ofstream Out(Path, std::ios::binary | std::ios::trunc);
  if (!Out || !(Out << Text) || !Out.flush())
    throw UserError("cannot write '" + Path.string() + "'");
}

std::string extension(ReportFormat F) {
  return F == ReportFormat::Tsv ? ".tsv" : ".csv";
}

/// Rewrites comma-separated text with another separator. Our CSV never
/// quotes, so a plain character swap is exact.
std::string withSeparator(std::string Csv, char Sep) {
  if (Sep != ',')
    std::replace(Csv.begin(), Csv.end(), ',', Sep);
  return Csv;
}

} // namespace

std::string predicator::tuneSummary(const TuneResult &R, ReportFormat F) {
  char S = separator(F);
  std::ostringstream OS;
  OS << "best_speedup" << S << formatFixed(R.BestFitness) << '\n';
  OS << "best_bitmask" << S << R.BestBitmask.str() << '\n';
  OS << "baseline_bitmask" << S << R.BaselineBitmask.str() << '\n';
  OS << "candidates" << S << R.Candidates << '\n';
  OS << "generations" << S << R.History.size() << '\n';
  for (const auto &[Name, Cycles] : R.BaselineCycles)
    OS << "baseline_cycles:" << Name << S << Cycles << '\n';
  for (const std::string &N : R.Notes)
    OS << "note" << S << N << '\n';
  return OS.str();
}

std::string predicator::oracleSummary(const OracleResult &R, ReportFormat F) {
  char S = separator(F);
  std::ostringstream OS;
  OS << "best_speedup" << S << formatFixed(R.OptimalSpeedup) << '\n';
  OS << "best_bitmask" << S << R.Optimal.str() << '\n';
  OS << "baseline_bitmask" << S << R.BaselineBitmask.str() << '\n';
  OS << "candidates" << S << R.Candidates << '\n';
  return OS.str();
}

std::vector<fs::path> predicator::emitReport(const TuneResult &R,
                                             const fs::path &Dir,
                                             ReportFormat F) {
  std::error_code Ec;
  fs::create_directories(Dir, Ec);
  if (Ec)
    throw UserError("cannot create '" + Dir.string() + "': " + Ec.message());
  std::vector<fs::path> Paths = {
      Dir / (std::string(SummaryFile) + extension(F)), Dir / GenomeFile,
      Dir / BitmaskFile, Dir / ConvertedFile,
      Dir / (std::string(HistoryFile) + extension(F))};
  writeFile(Paths[0], tuneSummary(R, F));
  writeFile(Paths[1], R.BestGenome.serialize());
  writeFile(Paths[2], R.BestBitmask.str() + "\n");
  writeFile(Paths[3], R.ConvertedModule);
  writeFile(Paths[4], R.historyCsv(separator(F)));
  return Paths;
}

std::vector<fs::path> predicator::emitReport(const OracleResult &R,
                                             const fs::path &Dir,
                                             ReportFormat F) {
  std::error_code Ec;
  fs::create_directories(Dir, Ec);
  if (Ec)
    throw UserError("cannot create '" + Dir.string() + "': " + Ec.message());
  std::vector<fs::path> Paths = {
      Dir / (std::string(SummaryFile) + extension(F)), Dir / BitmaskFile,
      Dir / (std::string(OracleFile) + extension(F))};
  writeFile(Paths[0], oracleSummary(R, F));
  writeFile(Paths[1], R.Optimal.str() + "\n");
  writeFile(Paths[2], R.csv(separator(F)));
  return Paths;
}

namespace {

struct Options {
  std::string Module;
  std::string Entry;
  std::string Machine;
  std::string Neat;
  std::string Bitmask;
  std::vector<std::string> InputFiles;
  std::string OutDir;
  std::string Output;
  std::string ReportPath;
  std::string Format = "csv";
  std::string Predictor;
  long long Penalty = -1;
  std::uint64_t Seed = 1;
  bool SeedGiven = false;
  std::size_t Limit = 20;
  unsigned Threads = 0;
};

ReportFormat formatOf(const Options &O) {
  return O.Format == "tsv" ? ReportFormat::Tsv : ReportFormat::Csv;
}

Module loadModule(const Options &O) {
  return parseModule(readFile(O.Module));
}

MachineModel loadMachine(const Options &O) {
  MachineModel MM;
  if (!O.Machine.empty())
    MM = parseMachineModel(readFile(O.Machine));
  if (!O.Predictor.empty()) {
    if (O.Predictor == "twobit")
      MM.Predictor = PredictorKind::TwoBit;
    else if (O.Predictor == "always_taken")
      MM.Predictor = PredictorKind::AlwaysTaken;
    else
      MM.Predictor = PredictorKind::Oracle;
  }
  if (O.Penalty >= 0)
    MM.MispredictPenalty = static_cast<unsigned>(O.Penalty);
  return MM;
}

std::vector<Workload> loadWorkloads(const Options &O) {
  std::vector<Workload> Ws;
  for (const std::string &Path : O.InputFiles) {
    try {
      Ws.push_back({fs::path(Path).stem().string(), parseInputs(readFile(Path))});
    } catch (const UserError &E) {
      throw UserError(Path + ": " + E.what());
    }
  }
  return Ws;
}

std::uint64_t seedOf(const Options &O) {
  if (O.SeedGiven)
    return O.Seed;
  if (const char *Env = std::getenv("PREDICATOR_SEED")) {
    std::string Text = Env;
    std::uint64_t V = 0;
    auto [Ptr, Ec] = std::from_chars(Text.data(), Text.data() + Text.size(), V);
    if (Ec != std::errc() || Ptr != Text.data() + Text.size())
      throw UserError("PREDICATOR_SEED must be a non-negative integer, got '" +
                      Text + "'");
    return V;
  }
  return O.Seed;
}

int cmdCheck(const Options &O, std::ostream &Out) {
  Module M = loadModule(O);
  auto Diags = validateModule(M);
  for (const Diagnostic &D : Diags)
    Out << D.str() << '\n';
  if (!Diags.empty())
    return 1;
  Out << "ok\n";
  return 0;
}

int cmdCandidates(const Options &O, std::ostream &Out) {
  Module M = loadModule(O);
  requireValid(M);
  char S = separator(formatOf(O));
  Out << "index" << S << "branch_site" << S << "function" << S << "head" << S
      << "shape" << S << "true_side" << S << "false_side" << S << "join" << S
      << "selects\n";
  for (const Candidate &C : findModuleCandidates(M))
    Out << C.Index << S << siteName(C.Site) << S << C.Function << S << C.Head
        << S << shapeName(C.Shape) << S << C.TrueSide.value_or("") << S
        << C.FalseSide.value_or("") << S << C.Join << S << C.Phis.size()
        << '\n';
  return 0;
}

int cmdFeatures(const Options &O, std::ostream &Out) {
  Program P = Program::build(loadModule(O), O.Entry, loadMachine(O));
  Out << featuresCsv(P.Features, separator(formatOf(O)));
  return 0;
}

int cmdConvert(const Options &O, std::ostream &Out, std::ostream &Err) {
  Module M = loadModule(O);
  requireValid(M);
  auto [Converted, Report] = applyBitmask(M, Bitmask::parse(O.Bitmask));
  std::string Text = printModule(Converted);
  if (O.Output.empty())
    Out << Text;
  else
    writeFile(O.Output, Text);
  std::string Csv = Report.csv(separator(formatOf(O)));
  if (O.ReportPath.empty())
    Err << Csv;
  else
    writeFile(O.ReportPath, Csv);
  return 0;
}

int cmdSimulate(const Options &O, std::ostream &Out) {
  Module M = loadModule(O);
  MachineModel MM = loadMachine(O);
  Program P = Program::build(M, O.Entry, MM);
  if (!O.Bitmask.empty())
    M = applyBitmask(P.M, Bitmask::parse(O.Bitmask)).first;
  if (O.InputFiles.size() != 1)
    throw UserError("simulate takes exactly one --inputs file");
  Inputs In = parseInputs(readFile(O.InputFiles.front()));
  Out << simulate(M, P.Entry, In, MM).csv(separator(formatOf(O)));
  return 0;
}

int cmdTune(const Options &O, std::ostream &Out) {
  MachineModel MM = loadMachine(O);
  Program P = Program::build(loadModule(O), O.Entry, MM);
  neat::NeatConfig Cfg;
  if (!O.Neat.empty())
    Cfg = neat::parseNeatConfig(readFile(O.Neat));
  TuneOptions TO;
  TO.Threads = O.Threads;
  TuneResult R = tune(P, loadWorkloads(O), Cfg, MM, seedOf(O), TO);
  if (!O.OutDir.empty())
    emitReport(R, O.OutDir, formatOf(O));
  Out << tuneSummary(R, formatOf(O));
  return 0;
}

int cmdExhaustive(const Options &O, std::ostream &Out) {
  MachineModel MM = loadMachine(O);
  Program P = Program::build(loadModule(O), O.Entry, MM);
  OracleResult R = exhaustiveSearch(P, loadWorkloads(O), MM, O.Limit,
                                    /*TableCutoff=*/O.Limit, O.Threads);
  if (!O.OutDir.empty())
    emitReport(R, O.OutDir, formatOf(O));
  Out << R.csv(separator(formatOf(O)));
  return 0;
}

/// Re-renders a bundle's summary and history (or oracle table).
int cmdReport(const Options &O, std::ostream &Out) {
  fs::path Dir = O.Module;
  if (!fs::is_directory(Dir))
    throw UserError("'" + Dir.string() + "' is not a result bundle directory");
  char S = separator(formatOf(O));
  auto find = [&](const char *Stem) -> std::optional<fs::path> {
    for (const char *Ext : {".csv", ".tsv"})
      if (fs::exists(Dir / (std::string(Stem) + Ext)))
        return Dir / (std::string(Stem) + Ext);
    return std::nullopt;
  };
  auto render = [&](const fs::path &P) {
    std::string Text = readFile(P.string());
    if (P.extension() == ".tsv")
      std::replace(Text.begin(), Text.end(), '\t', ',');
    Out << withSeparator(std::move(Text), S);
  };
  auto Summary = find(SummaryFile);
  if (!Summary)
    throw UserError("'" + Dir.string() + "' has no summary file");
  render(*Summary);
  for (const char *Stem : {HistoryFile, OracleFile})
    if (auto P = find(Stem)) {
      Out << '\n';
      render(*P);
    }
  return 0;
}

} // namespace

int predicator::runCommand(const std::vector<std::string> &Args,
                           std::ostream &Out, std::ostream &Err) {
  CLI::App App{"If-conversion autotuner", "predicator"};
  App.require_subcommand(1);
  Options O;

  auto addModule = [&](CLI::App *Sub, const char *What = "IR module") {
    Sub->add_option("module", O.Module, What)->required();
  };
  auto addFormat = [&](CLI::App *Sub) {
    Sub->add_option("--format", O.Format, "csv or tsv")
        ->check(CLI::IsMember({"csv", "tsv"}));
  };
  auto addMachine = [&](CLI::App *Sub) {
    Sub->add_option("--machine,-m", O.Machine, "machine model config")
        ->check(CLI::ExistingFile);
    Sub->add_option("--predictor", O.Predictor, "override the predictor")
        ->check(CLI::IsMember({"twobit", "always_taken", "oracle"}));
    Sub->add_option("--penalty", O.Penalty, "override the mispredict penalty")
        ->check(CLI::NonNegativeNumber);
  };
  auto addEntry = [&](CLI::App *Sub) {
    Sub->add_option("--entry", O.Entry, "entry function (default @main or "
                                        "the only function)");
  };

  CLI::App *Check = App.add_subcommand("check", "validate a module");
  addModule(Check);

  CLI::App *Cands = App.add_subcommand("candidates", "list candidates");
  addModule(Cands);
  addFormat(Cands);

  CLI::App *Feats = App.add_subcommand("features", "per-candidate features");
  addModule(Feats);
  addMachine(Feats);
  addEntry(Feats);
  addFormat(Feats);

  CLI::App *Conv = App.add_subcommand("convert", "apply a bitmask");
  addModule(Conv);
  Conv->add_option("--bitmask,-b", O.Bitmask, "bits in candidate order")
      ->required();
  Conv->add_option("--output,-o", O.Output, "converted IR (default stdout)");
  Conv->add_option("--report", O.ReportPath,
                   "apply report (default stderr)");
  addFormat(Conv);

  CLI::App *Sim = App.add_subcommand("simulate", "simulate one workload");
  addModule(Sim);
  Sim->add_option("--inputs,-i", O.InputFiles, "inputs file")
      ->required()
      ->check(CLI::ExistingFile);
  Sim->add_option("--bitmask,-b", O.Bitmask, "convert before simulating");
  addMachine(Sim);
  addEntry(Sim);
  addFormat(Sim);

  CLI::App *Tune = App.add_subcommand("tune", "evolve a conversion policy");
  addModule(Tune);
  Tune->add_option("--inputs,-i", O.InputFiles, "workload inputs files")
      ->required()
      ->check(CLI::ExistingFile);
  Tune->add_option("--neat", O.Neat, "NEAT config")->check(CLI::ExistingFile);
  CLI::Option *SeedOpt = Tune->add_option("--seed", O.Seed, "random seed");
  Tune->add_option("--out", O.OutDir, "bundle directory");
  Tune->add_option("--threads", O.Threads, "evaluation threads (0 = all)");
  addMachine(Tune);
  addEntry(Tune);
  addFormat(Tune);

  CLI::App *Exh = App.add_subcommand("exhaustive", "enumerate all bitmasks");
  addModule(Exh);
  Exh->add_option("--inputs,-i", O.InputFiles, "workload inputs files")
      ->required()
      ->check(CLI::ExistingFile);
  Exh->add_option("--limit", O.Limit, "largest candidate count to enumerate");
  Exh->add_option("--out", O.OutDir, "bundle directory");
  Exh->add_option("--threads", O.Threads, "evaluation threads (0 = all)");
  addMachine(Exh);
  addEntry(Exh);
  addFormat(Exh);

  CLI::App *Rep = App.add_subcommand("report", "re-emit a result bundle");
  addModule(Rep, "bundle directory");
  addFormat(Rep);

  if (!Args.empty() && !Args.front().starts_with('-') &&
      !App.get_subcommand_no_throw(Args.front())) {
    Err << "error: unknown subcommand '" << Args.front()
        << "' (run with --help for the list)\n";
    return 1;
  }

  try {
    std::vector<const char *> Argv = {"predicator"};
    for (const std::string &A : Args)
      Argv.push_back(A.c_str());
    App.parse(static_cast<int>(Argv.size()), Argv.data());
  } catch (const CLI::ExtrasError &) {
    // CLI11's own message lists the leftovers back to front.
    Err << "error: unexpected argument(s):";
    for (const std::string &A : App.remaining(true))
      Err << ' ' << A;
    Err << '\n';
    return 1;
  } catch (const CLI::ParseError &E) {
    if (E.get_exit_code() == 0) {
      App.exit(E, Out, Err);
      return 0;
    }
    Err << "error: " << E.what() << '\n';
    return 1;
  }
  O.SeedGiven = SeedOpt->count() > 0;

  try {
    if (Check->parsed())
      return cmdCheck(O, Out);
    if (Cands->parsed())
      return cmdCandidates(O, Out);
    if (Feats->parsed())
      return cmdFeatures(O, Out);
    if (Conv->parsed())
      return cmdConvert(O, Out, Err);
    if (Sim->parsed())
      return cmdSimulate(O, Out);
    if (Tune->parsed())
      return cmdTune(O, Out);
    if (Exh->parsed())
      return cmdExhaustive(O, Out);
    if (Rep->parsed())
      return cmdReport(O, Out);
  } catch (const UserError &E) {
    Err << "error: " << E.what() << '\n';
    return 1;
  } catch (const InternalError &E) {
    Err << "internal error: " << E.what() << '\n';
    return 2;
  } catch (const std::exception &E) {
    Err << "internal error: " << E.what() << '\n';
    return 2;
  }
  throw InternalError("no subcommand dispatched");
}
