#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hrc/clustering.hpp"
#include "hrc/demos.hpp"
#include "hrc/place_drill.hpp"

namespace hrc::synthetic {

struct MarkovConfig {
  int subjects = 20;
  int per_subject = 3;
  int min_length = 6;
  int max_length = 12;
  /// Probability of each generator's preferred successor.
  double strength = 0.85;
};

struct LabeledCorpus {
  DemoSet demos;
  /// Generator type of each sequence.
  std::vector<int> sequence_labels;
  /// Generator type of each subject.
  std::map<std::string, int> subject_labels;
};

/// Four human and four robot actions, alternating.
ActionAlphabet markov_alphabet();

/// Generator matrix of type 0 or 1 over markov_alphabet(): each action is
/// followed by a type-specific action of the other actor with probability
/// `strength`, the rest spread evenly over the other actor's actions.
TransitionMatrix generator_matrix(int type, double strength);

/// Subjects alternate between the two generator types; every sequence
/// starts with a uniformly chosen human action.
LabeledCorpus markov_corpus(const MarkovConfig& config, std::uint64_t seed);

struct PlaceDrillConfig {
  int per_type = 6;
  int per_subject = 3;
  /// Chance that a sequence abandons the subject's usual placement order.
  double order_noise = 0.2;
};

/// Scripted demonstrations: each subject has a preference and a usual
/// placement order. Safe subjects idle until every screw is placed and then
/// drill in placement order; efficient subjects drill each screw right after
/// it is placed. Labels: 0 safe, 1 efficient.
LabeledCorpus place_drill_corpus(const PlaceDrillConfig& config, std::uint64_t seed);

place_drill::Preference preference_of(int label);

/// Demonstration of one preference for a given placement order.
DemoSequence place_drill_demo(place_drill::Preference pref, const std::vector<int>& order,
                              std::optional<std::string> subject = std::nullopt);

}  // namespace hrc::synthetic
