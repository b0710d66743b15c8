//===-- Genome.cpp - NEAT genome encoding and evaluation ------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "predicator/NEAT.h"
#include "predicator/Config.h"
#include "predicator/Error.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

using namespace predicator;
using namespace predicator::neat;

std::string_view neat::roleName(NodeRole R) {
  switch (R) {
  case NodeRole::Input:
    return "input";
  case NodeRole::Bias:
    return "bias";
  case NodeRole::Output:
    return "output";
  case NodeRole::Hidden:
    return "hidden";
  }
  return "unknown";
}

std::size_t Genome::numHidden() const {
  return static_cast<std::size_t>(
      std::count_if(Nodes.begin(), Nodes.end(),
                    [](const NodeGene &N) { return N.Role == NodeRole::Hidden; }));
}

std::size_t Genome::numInputs() const {
  return static_cast<std::size_t>(
      std::count_if(Nodes.begin(), Nodes.end(),
                    [](const NodeGene &N) { return N.Role == NodeRole::Input; }));
}

const NodeGene *Genome::node(std::uint32_t Id) const {
  auto It = std::lower_bound(
      Nodes.begin(), Nodes.end(), Id,
      [](const NodeGene &N, std::uint32_t V) { return N.Id < V; });
  return It != Nodes.end() && It->Id == Id ? &*It : nullptr;
}

const ConnectionGene *Genome::connection(std::uint32_t Innovation) const {
  auto It = std::lower_bound(Connections.begin(), Connections.end(), Innovation,
                             [](const ConnectionGene &C, std::uint32_t V) {
                               return C.Innovation < V;
                             });
  return It != Connections.end() && It->Innovation == Innovation ? &*It
                                                                  : nullptr;
}

bool Genome::hasConnection(std::uint32_t From, std::uint32_t To) const {
  return std::any_of(Connections.begin(), Connections.end(),
                     [&](const ConnectionGene &C) {
                       return C.From == From && C.To == To;
                     });
}

bool Genome::reaches(std::uint32_t From, std::uint32_t To) const {
  std::set<std::uint32_t> Seen{From};
  std::vector<std::uint32_t> Work{From};
  while (!Work.empty()) {
    std::uint32_t N = Work.back();
    Work.pop_back();
    if (N == To)
      return true;
    for (const ConnectionGene &C : Connections)
      if (C.From == N && Seen.insert(C.To).second)
        Work.push_back(C.To);
  }
  return false;
}

bool Genome::isAcyclic() const {
  std::map<std::uint32_t, std::size_t> InDegree;
  for (const NodeGene &N : Nodes)
    InDegree[N.Id] = 0;
  for (const ConnectionGene &C : Connections)
    ++InDegree[C.To];
  std::vector<std::uint32_t> Ready;
  for (const auto &[Id, D] : InDegree)
    if (D == 0)
      Ready.push_back(Id);
  std::size_t Visited = 0;
  while (!Ready.empty()) {
    std::uint32_t N = Ready.back();
    Ready.pop_back();
    ++Visited;
    for (const ConnectionGene &C : Connections)
      if (C.From == N && --InDegree[C.To] == 0)
        Ready.push_back(C.To);
  }
  return Visited == InDegree.size();
}

std::string Genome::serialize() const {
  std::ostringstream OS;
  for (const NodeGene &N : Nodes)
    OS << "node " << N.Id << ' ' << roleName(N.Role) << '\n';
  for (const ConnectionGene &C : Connections) {
    char Buf[64];
    auto [End, Ec] = std::to_chars(Buf, Buf + sizeof(Buf), C.Weight);
    OS << "conn " << C.Innovation << ' ' << C.From << ' ' << C.To << ' '
       << std::string_view(Buf, End - Buf) << ' ' << (C.Enabled ? 1 : 0)
       << '\n';
  }
  return OS.str();
}

Genome Genome::deserialize(std::string_view Text) {
  Genome G;
  std::istringstream IS{std::string(Text)};
  std::string Line;
  std::size_t LineNo = 0;
  auto fail = [&](const std::string &Why) {
    return UserError("genome line " + std::to_string(LineNo) + ": " + Why);
  };
  while (std::getline(IS, Line)) {
    ++LineNo;
    std::istringstream LS(Line);
    std::string Kind;
    if (!(LS >> Kind) || Kind[0] == '#')
      continue;
    if (Kind == "node") {
      NodeGene N;
      std::string Role;
      if (!(LS >> N.Id >> Role))
        throw fail("expected 'node <id> <role>'");
      if (Role == "input")
        N.Role = NodeRole::Input;
      else if (Role == "bias")
        N.Role = NodeRole::Bias;
      else if (Role == "output")
        N.Role = NodeRole::Output;
      else if (Role == "hidden")
        N.Role = NodeRole::Hidden;
      else
        throw fail("unknown node role '" + Role + "'");
      G.Nodes.push_back(N);
    } else if (Kind == "conn") {
      ConnectionGene C;
      std::string Weight;
      int Enabled = 0;
      if (!(LS >> C.Innovation >> C.From >> C.To >> Weight >> Enabled))
        throw fail("expected 'conn <innov> <from> <to> <weight> <enabled>'");
      auto [Ptr, Ec] =
          std::from_chars(Weight.data(), Weight.data() + Weight.size(), C.Weight);
      if (Ec != std::errc() || Ptr != Weight.data() + Weight.size())
        throw fail("invalid weight '" + Weight + "'");
      C.Enabled = Enabled != 0;
      G.Connections.push_back(C);
    } else {
      throw fail("unknown record '" + Kind + "'");
    }
  }
  std::sort(G.Nodes.begin(), G.Nodes.end(),
            [](const NodeGene &A, const NodeGene &B) { return A.Id < B.Id; });
  std::sort(G.Connections.begin(), G.Connections.end(),
            [](const ConnectionGene &A, const ConnectionGene &B) {
              return A.Innovation < B.Innovation;
            });
  for (std::size_t I = 1; I < G.Nodes.size(); ++I)
    if (G.Nodes[I].Id == G.Nodes[I - 1].Id)
      throw UserError("genome: duplicate node id " +
                      std::to_string(G.Nodes[I].Id));
  for (std::size_t I = 0; I < G.Connections.size(); ++I) {
    const ConnectionGene &C = G.Connections[I];
    if (I && C.Innovation == G.Connections[I - 1].Innovation)
      throw UserError("genome: duplicate innovation " +
                      std::to_string(C.Innovation));
    const NodeGene *From = G.node(C.From), *To = G.node(C.To);
    if (!From || !To)
      throw UserError("genome: connection " + std::to_string(C.Innovation) +
                      " references a missing node");
    if (To->Role == NodeRole::Input || To->Role == NodeRole::Bias)
      throw UserError("genome: connection " + std::to_string(C.Innovation) +
                      " feeds an input or bias node");
  }
  if (!G.isAcyclic())
    throw UserError("genome: network contains a cycle");
  return G;
}

std::vector<double> neat::activateAll(const Genome &G,
                                      std::span<const double> X,
                                      double Slope) {
  std::map<std::uint32_t, double> Sum, Value;
  std::map<std::uint32_t, std::size_t> InDegree;
  for (const NodeGene &N : G.Nodes)
    InDegree[N.Id] = 0;
  for (const ConnectionGene &C : G.Connections)
    ++InDegree[C.To];

  std::size_t NextInput = 0;
  std::vector<std::uint32_t> Ready;
  for (auto It = InDegree.rbegin(); It != InDegree.rend(); ++It)
    if (It->second == 0)
      Ready.push_back(It->first);
  std::size_t Visited = 0;
  while (!Ready.empty()) {
    std::uint32_t Id = Ready.back();
    Ready.pop_back();
    ++Visited;
    const NodeGene &N = *G.node(Id);
    double V;
    switch (N.Role) {
    case NodeRole::Input:
      // Inputs are ordered by id; ids are assigned in input order.
      NextInput = static_cast<std::size_t>(
          std::count_if(G.Nodes.begin(), G.Nodes.end(), [&](const NodeGene &O) {
            return O.Role == NodeRole::Input && O.Id < Id;
          }));
      if (NextInput >= X.size())
        throw UserError("network expects " + std::to_string(G.numInputs()) +
                        " inputs, got " + std::to_string(X.size()));
      V = X[NextInput];
      break;
    case NodeRole::Bias:
      V = 1.0;
      break;
    default:
      V = 1.0 / (1.0 + std::exp(-Slope * Sum[Id]));
      break;
    }
    Value[Id] = V;
    for (const ConnectionGene &C : G.Connections) {
      if (C.From != Id)
        continue;
      if (C.Enabled)
        Sum[C.To] += C.Weight * V;
      if (--InDegree[C.To] == 0)
        Ready.push_back(C.To);
    }
  }
  if (Visited != G.Nodes.size())
    throw InternalError("cycle in feed-forward network");
  if (X.size() != G.numInputs())
    throw UserError("network expects " + std::to_string(G.numInputs()) +
                    " inputs, got " + std::to_string(X.size()));
  std::vector<double> Out;
  for (const NodeGene &N : G.Nodes)
    if (N.Role == NodeRole::Output)
      Out.push_back(Value[N.Id]);
  return Out;
}

double neat::activate(const Genome &G, std::span<const double> X,
                      double Slope) {
  std::vector<double> Out = activateAll(G, X, Slope);
  if (Out.size() != 1)
    throw UserError("activate expects a single-output network");
  return Out.front();
}

double neat::compatibilityDistance(const Genome &A, const Genome &B,
                                   const NeatConfig &Cfg) {
  const auto &GA = A.Connections, &GB = B.Connections;
  std::uint32_t MaxA = GA.empty() ? 0 : GA.back().Innovation;
  std::uint32_t MaxB = GB.empty() ? 0 : GB.back().Innovation;
  std::size_t Excess = 0, Disjoint = 0, Matching = 0;
  double WeightDiff = 0.0;
  std::size_t I = 0, J = 0;
  while (I < GA.size() || J < GB.size()) {
    if (I < GA.size() && J < GB.size() &&
        GA[I].Innovation == GB[J].Innovation) {
      ++Matching;
      WeightDiff += std::abs(GA[I].Weight - GB[J].Weight);
      ++I;
      ++J;
    } else if (J >= GB.size() ||
               (I < GA.size() && GA[I].Innovation < GB[J].Innovation)) {
      (GA[I].Innovation > MaxB ? Excess : Disjoint)++;
      ++I;
    } else {
      (GB[J].Innovation > MaxA ? Excess : Disjoint)++;
      ++J;
    }
  }
  double N = 1.0;
  if (GA.size() >= Cfg.SmallGenomeGenes || GB.size() >= Cfg.SmallGenomeGenes)
    N = static_cast<double>(std::max(GA.size(), GB.size()));
  double MeanDiff = Matching ? WeightDiff / static_cast<double>(Matching) : 0.0;
  return (Cfg.C1 * static_cast<double>(Excess) +
          Cfg.C2 * static_cast<double>(Disjoint)) /
             N +
         Cfg.C3 * MeanDiff;
}

void NeatConfig::validate() const {
  if (PopulationSize < 2)
    throw UserError("population must be at least 2");
  for (double Rate : {WeightMutateRate, WeightResetRate, AddConnectionRate,
                      AddNodeRate, CrossoverRate, DisableInheritRate,
                      SurvivalThreshold, OutputThreshold})
    if (!(Rate >= 0.0 && Rate <= 1.0))
      throw UserError("NEAT rates must lie in [0,1]");
  if (CompatibilityThreshold < 0 || C1 < 0 || C2 < 0 || C3 < 0)
    throw UserError("compatibility parameters must be non-negative");
}

namespace {
struct NeatKey {
  std::string_view Name;
  double NeatConfig::*Real = nullptr;
  std::size_t NeatConfig::*Count = nullptr;
};

const NeatKey NeatKeys[] = {
    {"population", nullptr, &NeatConfig::PopulationSize},
    {"generations", nullptr, &NeatConfig::Generations},
    {"c1", &NeatConfig::C1},
    {"c2", &NeatConfig::C2},
    {"c3", &NeatConfig::C3},
    {"compatibility_threshold", &NeatConfig::CompatibilityThreshold},
    {"small_genome_genes", nullptr, &NeatConfig::SmallGenomeGenes},
    {"weight_mutate_rate", &NeatConfig::WeightMutateRate},
    {"weight_perturb_sigma", &NeatConfig::WeightPerturbSigma},
    {"weight_reset_rate", &NeatConfig::WeightResetRate},
    {"weight_reset_range", &NeatConfig::WeightResetRange},
    {"initial_weight_range", &NeatConfig::InitialWeightRange},
    {"add_connection_rate", &NeatConfig::AddConnectionRate},
    {"add_node_rate", &NeatConfig::AddNodeRate},
    {"crossover_rate", &NeatConfig::CrossoverRate},
    {"disable_inherit_rate", &NeatConfig::DisableInheritRate},
    {"elitism", nullptr, &NeatConfig::Elitism},
    {"stagnation_cutoff", nullptr, &NeatConfig::StagnationCutoff},
    {"survival_threshold", &NeatConfig::SurvivalThreshold},
    {"output_threshold", &NeatConfig::OutputThreshold},
    {"sigmoid_slope", &NeatConfig::SigmoidSlope},
};
} // namespace

NeatConfig neat::parseNeatConfig(std::string_view Text) {
  NeatConfig Cfg;
  for (const ConfigEntry &E : parseConfig(Text)) {
    const NeatKey *Key = nullptr;
    for (const NeatKey &K : NeatKeys)
      if (K.Name == E.Key)
        Key = &K;
    if (!Key)
      throw UserError("NEAT config line " + std::to_string(E.Line) +
                      ": unknown key '" + E.Key + "'");
    if (Key->Real)
      Cfg.*(Key->Real) = configReal(E);
    else
      Cfg.*(Key->Count) = configUnsigned(E);
  }
  Cfg.validate();
  return Cfg;
}

std::string neat::printNeatConfig(const NeatConfig &Cfg) {
  std::ostringstream OS;
  for (const NeatKey &K : NeatKeys) {
    OS << K.Name << " = ";
    if (K.Real) {
      char Buf[64];
      auto [End, Ec] = std::to_chars(Buf, Buf + sizeof(Buf), Cfg.*(K.Real));
      OS << std::string_view(Buf, End - Buf);
    } else {
      OS << Cfg.*(K.Count);
    }
    OS << '\n';
  }
  return OS.str();
}
