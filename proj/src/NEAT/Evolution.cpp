//===-- Evolution.cpp - NEAT operators and generation step ----------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "predicator/Error.h"
#include "predicator/NEAT.h"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace predicator;
using namespace predicator::neat;

std::uint32_t InnovationTracker::connectionInnovation(std::uint32_t From,
                                                      std::uint32_t To) {
  auto [It, Inserted] = Connections.try_emplace({From, To}, NextInnovation);
  if (Inserted)
    ++NextInnovation;
  return It->second;
}

std::uint32_t InnovationTracker::splitNode(std::uint32_t Innovation) {
  auto [It, Inserted] = Splits.try_emplace(Innovation, NextNode);
  if (Inserted)
    ++NextNode;
  return It->second;
}

namespace {

double uniform(Rng &R, double Lo, double Hi) {
  return std::uniform_real_distribution<double>(Lo, Hi)(R);
}

bool chance(Rng &R, double P) { return uniform(R, 0.0, 1.0) < P; }

std::size_t pick(Rng &R, std::size_t N) {
  return std::uniform_int_distribution<std::size_t>(0, N - 1)(R);
}

void sortGenes(Genome &G) {
  std::sort(G.Nodes.begin(), G.Nodes.end(),
            [](const NodeGene &A, const NodeGene &B) { return A.Id < B.Id; });
  std::sort(G.Connections.begin(), G.Connections.end(),
            [](const ConnectionGene &A, const ConnectionGene &B) {
              return A.Innovation < B.Innovation;
            });
}

} // namespace

Population neat::initPopulation(const NeatConfig &Cfg, std::size_t Inputs,
                                std::size_t Outputs, Rng &R) {
  Cfg.validate();
  if (Inputs == 0 || Outputs == 0)
    throw UserError("a network needs at least one input and one output");
  Population P;
  P.NumInputs = Inputs;
  P.NumOutputs = Outputs;
  Genome Proto;
  auto N = static_cast<std::uint32_t>(Inputs);
  auto O = static_cast<std::uint32_t>(Outputs);
  for (std::uint32_t I = 0; I < N; ++I)
    Proto.Nodes.push_back({I, NodeRole::Input});
  Proto.Nodes.push_back({N, NodeRole::Bias});
  for (std::uint32_t K = 0; K < O; ++K)
    Proto.Nodes.push_back({N + 1 + K, NodeRole::Output});
  P.Innovations.NextNode = N + 1 + O;
  for (std::uint32_t K = 0; K < O; ++K)
    for (std::uint32_t I = 0; I <= N; ++I) {
      std::uint32_t Innov = P.Innovations.connectionInnovation(I, N + 1 + K);
      Proto.Connections.push_back({Innov, I, N + 1 + K, 0.0, true});
    }
  for (std::size_t K = 0; K < Cfg.PopulationSize; ++K) {
    Genome G = Proto;
    for (ConnectionGene &C : G.Connections)
      C.Weight = uniform(R, -Cfg.InitialWeightRange, Cfg.InitialWeightRange);
    P.Genomes.push_back(std::move(G));
  }
  return P;
}

SpeciesSet neat::speciate(const Population &P, const NeatConfig &Cfg,
                          const SpeciesSet &Previous) {
  SpeciesSet S;
  S.NextId = Previous.NextId;
  for (const Species &Old : Previous.Species) {
    Species Carried = Old;
    Carried.Members.clear();
    S.Species.push_back(std::move(Carried));
  }
  for (std::size_t I = 0; I < P.Genomes.size(); ++I) {
    const Genome &G = P.Genomes[I];
    Species *Home = nullptr;
    for (Species &Sp : S.Species)
      if (compatibilityDistance(G, Sp.Representative, Cfg) <=
          Cfg.CompatibilityThreshold) {
        Home = &Sp;
        break;
      }
    if (!Home) {
      Species Fresh;
      Fresh.Id = S.NextId++;
      Fresh.Representative = G;
      Fresh.Representative.Fitness.reset();
      Fresh.LastImproved = P.Generation;
      S.Species.push_back(std::move(Fresh));
      Home = &S.Species.back();
    }
    Home->Members.push_back(I);
  }
  std::erase_if(S.Species, [](const Species &Sp) { return Sp.Members.empty(); });
  for (Species &Sp : S.Species) {
    Sp.Representative = P.Genomes[Sp.Members.front()];
    Sp.Representative.Fitness.reset();
  }
  return S;
}

Genome neat::crossover(const Genome &Fitter, const Genome &Other,
                       const NeatConfig &Cfg, Rng &R) {
  Genome Child;
  Child.Nodes = Fitter.Nodes;
  for (const ConnectionGene &C : Fitter.Connections) {
    const ConnectionGene *Match = Other.connection(C.Innovation);
    if (!Match) {
      Child.Connections.push_back(C);
      continue;
    }
    ConnectionGene Gene = chance(R, 0.5) ? C : *Match;
    Gene.From = C.From;
    Gene.To = C.To;
    if (!C.Enabled || !Match->Enabled)
      Gene.Enabled = !chance(R, Cfg.DisableInheritRate);
    else
      Gene.Enabled = true;
    Child.Connections.push_back(Gene);
  }
  return Child;
}

void neat::mutateWeights(Genome &G, const NeatConfig &Cfg, Rng &R) {
  std::normal_distribution<double> Perturb(0.0, Cfg.WeightPerturbSigma);
  for (ConnectionGene &C : G.Connections) {
    if (chance(R, Cfg.WeightResetRate))
      C.Weight = uniform(R, -Cfg.WeightResetRange, Cfg.WeightResetRange);
    else
      C.Weight += Perturb(R);
  }
}

void neat::splitConnection(Genome &G, std::uint32_t Innovation,
                           InnovationTracker &T) {
  auto It = std::find_if(G.Connections.begin(), G.Connections.end(),
                         [&](const ConnectionGene &C) {
                           return C.Innovation == Innovation;
                         });
  if (It == G.Connections.end())
    throw InternalError("split of a connection the genome lacks");
  ConnectionGene Old = *It;
  It->Enabled = false;
  std::uint32_t Hidden = T.splitNode(Innovation);
  if (G.node(Hidden))
    throw InternalError("split produced an existing node id");
  G.Nodes.push_back({Hidden, NodeRole::Hidden});
  G.Connections.push_back(
      {T.connectionInnovation(Old.From, Hidden), Old.From, Hidden, 1.0, true});
  G.Connections.push_back(
      {T.connectionInnovation(Hidden, Old.To), Hidden, Old.To, Old.Weight, true});
  sortGenes(G);
}

bool neat::mutateAddNode(Genome &G, InnovationTracker &T, Rng &R) {
  std::vector<std::uint32_t> Enabled;
  for (const ConnectionGene &C : G.Connections)
    if (C.Enabled)
      Enabled.push_back(C.Innovation);
  if (Enabled.empty())
    return false;
  splitConnection(G, Enabled[pick(R, Enabled.size())], T);
  return true;
}

bool neat::mutateAddConnection(Genome &G, InnovationTracker &T,
                               const NeatConfig &Cfg, Rng &R) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> Options;
  for (const NodeGene &From : G.Nodes) {
    if (From.Role == NodeRole::Output)
      continue;
    for (const NodeGene &To : G.Nodes) {
      if (To.Role == NodeRole::Input || To.Role == NodeRole::Bias ||
          To.Id == From.Id || G.hasConnection(From.Id, To.Id) ||
          G.reaches(To.Id, From.Id))
        continue;
      Options.push_back({From.Id, To.Id});
    }
  }
  if (Options.empty())
    return false;
  auto [From, To] = Options[pick(R, Options.size())];
  G.Connections.push_back(
      {T.connectionInnovation(From, To), From, To,
       uniform(R, -Cfg.InitialWeightRange, Cfg.InitialWeightRange), true});
  sortGenes(G);
  return true;
}

namespace {

void mutate(Genome &G, InnovationTracker &T, const NeatConfig &Cfg, Rng &R) {
  if (chance(R, Cfg.WeightMutateRate))
    mutateWeights(G, Cfg, R);
  if (chance(R, Cfg.AddNodeRate))
    mutateAddNode(G, T, R);
  if (chance(R, Cfg.AddConnectionRate))
    mutateAddConnection(G, T, Cfg, R);
}

/// Largest-remainder apportionment of Total seats by Shares. Ties in the
/// remainder go to the earlier entry.
std::vector<std::size_t> apportion(const std::vector<double> &Shares,
                                   std::size_t Total) {
  std::vector<std::size_t> Seats(Shares.size(), 0);
  double Sum = std::accumulate(Shares.begin(), Shares.end(), 0.0);
  std::vector<double> Exact(Shares.size());
  for (std::size_t I = 0; I < Shares.size(); ++I)
    Exact[I] = Sum > 0 ? Shares[I] / Sum * static_cast<double>(Total)
                       : static_cast<double>(Total) /
                             static_cast<double>(Shares.size());
  std::size_t Given = 0;
  for (std::size_t I = 0; I < Shares.size(); ++I) {
    Seats[I] = static_cast<std::size_t>(std::floor(Exact[I]));
    Given += Seats[I];
  }
  std::vector<std::size_t> Order(Shares.size());
  std::iota(Order.begin(), Order.end(), 0);
  std::stable_sort(Order.begin(), Order.end(), [&](std::size_t A, std::size_t B) {
    return Exact[A] - std::floor(Exact[A]) > Exact[B] - std::floor(Exact[B]);
  });
  for (std::size_t K = 0; Given < Total; K = (K + 1) % Order.size(), ++Given)
    ++Seats[Order[K]];
  return Seats;
}

/// Indices into P.Genomes sorted by fitness, best first, stable by index.
std::vector<std::size_t> ranked(std::vector<std::size_t> Members,
                                std::span<const double> Fitness) {
  std::stable_sort(Members.begin(), Members.end(),
                   [&](std::size_t A, std::size_t B) {
                     return Fitness[A] > Fitness[B];
                   });
  return Members;
}

} // namespace

Population neat::nextGeneration(const Population &P, SpeciesSet &S,
                                std::span<const double> Fitness,
                                const NeatConfig &Cfg, Rng &R) {
  if (Fitness.size() != P.Genomes.size())
    throw InternalError("fitness count does not match the population");
  std::size_t Seen = 0;
  for (const Species &Sp : S.Species)
    Seen += Sp.Members.size();
  if (Seen != P.Genomes.size() || S.Species.empty())
    throw InternalError("species do not partition the population");

  Population Next;
  Next.Generation = P.Generation + 1;
  Next.NumInputs = P.NumInputs;
  Next.NumOutputs = P.NumOutputs;
  Next.Innovations = P.Innovations;
  Next.Innovations.Splits.clear();

  std::size_t Best = 0;
  for (std::size_t I = 1; I < Fitness.size(); ++I)
    if (Fitness[I] > Fitness[Best])
      Best = I;

  // Stagnation bookkeeping and fitness sharing.
  std::vector<std::size_t> Eligible;
  std::vector<double> Shares;
  bool AllStagnant = true;
  for (std::size_t K = 0; K < S.Species.size(); ++K) {
    Species &Sp = S.Species[K];
    double Top = 0.0, Sum = 0.0;
    bool HoldsBest = false;
    for (std::size_t M : Sp.Members) {
      Top = std::max(Top, Fitness[M]);
      Sum += Fitness[M];
      HoldsBest |= M == Best;
    }
    if (Top > Sp.BestFitness) {
      Sp.BestFitness = Top;
      Sp.LastImproved = P.Generation;
    }
    bool Stagnant = P.Generation - Sp.LastImproved >= Cfg.StagnationCutoff;
    AllStagnant &= Stagnant;
    if (Stagnant && !HoldsBest)
      continue;
    Eligible.push_back(K);
    Shares.push_back(Sum / static_cast<double>(Sp.Members.size()));
  }

  if (AllStagnant) {
    // Every species stagnated, the champion's included: reseed from the two
    // best genomes.
    std::vector<std::size_t> All(P.Genomes.size());
    std::iota(All.begin(), All.end(), 0);
    All = ranked(std::move(All), Fitness);
    const Genome &A = P.Genomes[All[0]];
    const Genome &B = P.Genomes[All.size() > 1 ? All[1] : All[0]];
    Next.Genomes.push_back(A);
    Next.Genomes.push_back(B);
    while (Next.Genomes.size() < Cfg.PopulationSize) {
      Genome G = Next.Genomes.size() % 2 ? B : A;
      mutate(G, Next.Innovations, Cfg, R);
      Next.Genomes.push_back(std::move(G));
    }
    Next.Genomes.resize(Cfg.PopulationSize);
    for (Genome &G : Next.Genomes)
      G.Fitness.reset();
    Next.Restarted = true;
    S.Species.clear();
    return Next;
  }

  std::vector<std::size_t> Quota = apportion(Shares, Cfg.PopulationSize);
  // The species holding the best genome always keeps a seat for its elite.
  for (std::size_t E = 0; E < Eligible.size(); ++E) {
    const auto &Members = S.Species[Eligible[E]].Members;
    if (std::find(Members.begin(), Members.end(), Best) == Members.end() ||
        Quota[E] > 0)
      continue;
    std::size_t Donor = static_cast<std::size_t>(
        std::max_element(Quota.begin(), Quota.end()) - Quota.begin());
    --Quota[Donor];
    ++Quota[E];
  }

  for (std::size_t E = 0; E < Eligible.size(); ++E) {
    const Species &Sp = S.Species[Eligible[E]];
    std::vector<std::size_t> Order = ranked(Sp.Members, Fitness);
    std::size_t Produced = 0;
    for (std::size_t K = 0; K < Cfg.Elitism && K < Order.size() &&
                            Produced < Quota[E];
         ++K, ++Produced) {
      Genome Elite = P.Genomes[Order[K]];
      Elite.Fitness.reset();
      Next.Genomes.push_back(std::move(Elite));
    }
    std::size_t PoolSize = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(
               Cfg.SurvivalThreshold * static_cast<double>(Order.size()))));
    PoolSize = std::min(PoolSize, Order.size());
    for (; Produced < Quota[E]; ++Produced) {
      Genome Child;
      if (PoolSize >= 2 && chance(R, Cfg.CrossoverRate)) {
        std::size_t A = pick(R, PoolSize), B = pick(R, PoolSize - 1);
        if (B >= A)
          ++B;
        // Order is best first, so the lower rank is the fitter parent.
        const Genome &PA = P.Genomes[Order[std::min(A, B)]];
        const Genome &PB = P.Genomes[Order[std::max(A, B)]];
        Child = crossover(PA, PB, Cfg, R);
      } else {
        Child = P.Genomes[Order[pick(R, PoolSize)]];
      }
      Child.Fitness.reset();
      mutate(Child, Next.Innovations, Cfg, R);
      Next.Genomes.push_back(std::move(Child));
    }
  }
  if (Next.Genomes.size() != Cfg.PopulationSize)
    throw InternalError("population size changed across generations");
  return Next;
}
