//===-- predicator/NEAT.h - NeuroEvolution of Augmenting Topologies -*- C++ -*-===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// A feed-forward NEAT implementation: historical markings, speciation by
// compatibility distance with explicit fitness sharing, crossover aligned
// on innovation numbers, and add-node/add-connection structural mutation.
// Nothing here knows about if-conversion.
//
//===----------------------------------------------------------------------===//

#ifndef PREDICATOR_NEAT_H
#define PREDICATOR_NEAT_H

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace predicator::neat {

using Rng = std::mt19937_64;

enum class NodeRole { Input, Bias, Output, Hidden };

std::string_view roleName(NodeRole R);

struct NodeGene {
  std::uint32_t Id = 0;
  NodeRole Role = NodeRole::Hidden;

  friend bool operator==(const NodeGene &, const NodeGene &) = default;
};

struct ConnectionGene {
  std::uint32_t Innovation = 0;
  std::uint32_t From = 0;
  std::uint32_t To = 0;
  double Weight = 0.0;
  bool Enabled = true;

  friend bool operator==(const ConnectionGene &, const ConnectionGene &) = default;
};

struct Genome {
  std::vector<NodeGene> Nodes;             ///< Sorted by id.
  std::vector<ConnectionGene> Connections; ///< Sorted by innovation.
  std::optional<double> Fitness;

  std::size_t numHidden() const;
  std::size_t numInputs() const;
  const NodeGene *node(std::uint32_t Id) const;
  const ConnectionGene *connection(std::uint32_t Innovation) const;
  bool hasConnection(std::uint32_t From, std::uint32_t To) const;
  /// Whether a path From ->* To exists over all genes, enabled or not.
  bool reaches(std::uint32_t From, std::uint32_t To) const;
  bool isAcyclic() const;

  /// `node <id> <role>` and `conn <innov> <from> <to> <weight> <enabled>`
  /// lines; weights use shortest round-trip formatting.
  std::string serialize() const;
  static Genome deserialize(std::string_view Text);

  /// Structural equality, ignoring fitness.
  friend bool operator==(const Genome &A, const Genome &B) {
    return A.Nodes == B.Nodes && A.Connections == B.Connections;
  }
};

struct NeatConfig {
  std::size_t PopulationSize = 30;
  std::size_t Generations = 50;
  double C1 = 1.0; ///< Excess coefficient.
  double C2 = 1.0; ///< Disjoint coefficient.
  double C3 = 0.4; ///< Weight-difference coefficient.
  double CompatibilityThreshold = 3.0;
  /// Below this many genes in both genomes the distance is not normalized.
  std::size_t SmallGenomeGenes = 20;
  double WeightMutateRate = 0.8;
  double WeightPerturbSigma = 0.5;
  double WeightResetRate = 0.1;
  double WeightResetRange = 2.0;
  double InitialWeightRange = 1.0;
  double AddConnectionRate = 0.05;
  double AddNodeRate = 0.03;
  double CrossoverRate = 0.75;
  double DisableInheritRate = 0.75;
  std::size_t Elitism = 1;
  std::size_t StagnationCutoff = 15;
  /// Fraction of each species (best first) eligible as parents.
  double SurvivalThreshold = 0.5;
  double OutputThreshold = 0.5;
  double SigmoidSlope = 4.9;

  /// Throws UserError when a rate leaves [0,1] or the population is < 2.
  void validate() const;
};

/// `population = 30`, `generations = 50`, `c1 = 1.0`, ... Unknown keys are
/// rejected.
NeatConfig parseNeatConfig(std::string_view Text);
std::string printNeatConfig(const NeatConfig &Cfg);

/// Historical markings. Connection innovations are keyed by (from, to) for
/// the whole run; node splits are shared only within one generation.
struct InnovationTracker {
  std::uint32_t NextInnovation = 1;
  std::uint32_t NextNode = 0;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> Connections;
  std::map<std::uint32_t, std::uint32_t> Splits;

  std::uint32_t connectionInnovation(std::uint32_t From, std::uint32_t To);
  /// Node id for splitting connection `Innovation` this generation.
  std::uint32_t splitNode(std::uint32_t Innovation);
};

struct Population {
  std::size_t Generation = 0;
  std::vector<Genome> Genomes;
  InnovationTracker Innovations;
  std::size_t NumInputs = 0;
  std::size_t NumOutputs = 0;
  /// Set when every species stagnated and the population was reseeded.
  bool Restarted = false;
};

struct Species {
  std::uint32_t Id = 0;
  Genome Representative;
  std::vector<std::size_t> Members;
  double BestFitness = 0.0;
  std::size_t LastImproved = 0;
};

struct SpeciesSet {
  std::vector<neat::Species> Species;
  std::uint32_t NextId = 0;
};

/// Minimal networks: every input and the bias wired straight to every
/// output, no hidden nodes, weights uniform in +-InitialWeightRange.
Population initPopulation(const NeatConfig &Cfg, std::size_t Inputs,
                          std::size_t Outputs, Rng &R);

/// Feed-forward evaluation; returns the output node activations. Inputs are
/// passed through unchanged, the bias node emits 1.0, every other node
/// emits 1 / (1 + exp(-Slope * sum)).
std::vector<double> activateAll(const Genome &G, std::span<const double> X,
                                double Slope = 4.9);
/// Single-output convenience.
double activate(const Genome &G, std::span<const double> X,
                double Slope = 4.9);

/// (C1*E + C2*D) / N + C3 * mean |weight difference| of matching genes.
double compatibilityDistance(const Genome &A, const Genome &B,
                             const NeatConfig &Cfg);

/// Assigns every genome to the first species (in carried-over order) whose
/// representative lies within the threshold, founding species as needed.
/// Empty species are dropped; survivors take their first member as the next
/// representative.
SpeciesSet speciate(const Population &P, const NeatConfig &Cfg,
                    const SpeciesSet &Previous = {});

/// Builds the next population from a speciated, evaluated one. Updates the
/// species' stagnation bookkeeping in S.
Population nextGeneration(const Population &P, SpeciesSet &S,
                          std::span<const double> Fitness,
                          const NeatConfig &Cfg, Rng &R);

// Operators, exposed for testing.
Genome crossover(const Genome &Fitter, const Genome &Other,
                 const NeatConfig &Cfg, Rng &R);
void mutateWeights(Genome &G, const NeatConfig &Cfg, Rng &R);
/// Splits a random enabled connection. Returns false if none exists.
bool mutateAddNode(Genome &G, InnovationTracker &T, Rng &R);
/// Splits the given connection gene.
void splitConnection(Genome &G, std::uint32_t Innovation,
                     InnovationTracker &T);
/// Adds a random connection that keeps the network acyclic.
bool mutateAddConnection(Genome &G, InnovationTracker &T,
                         const NeatConfig &Cfg, Rng &R);

} // namespace predicator::neat

#endif // PREDICATOR_NEAT_H
