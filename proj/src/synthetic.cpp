#include "hrc/synthetic.hpp"

#include <algorithm>
#include <numeric>

#include "hrc/random.hpp"

namespace hrc::synthetic {

namespace {

std::string subject_name(const std::string& prefix, int index) {
  std::string n = std::to_string(index + 1);
  return prefix + std::string(n.size() < 2 ? 2 - n.size() : 0, '0') + n;
}

}  // namespace

ActionAlphabet markov_alphabet() {
  std::vector<Action> acts;
  for (int i = 0; i < 4; ++i) acts.push_back({i, "h" + std::to_string(i), Actor::human});
  for (int i = 0; i < 4; ++i) acts.push_back({4 + i, "r" + std::to_string(i), Actor::robot});
  return ActionAlphabet(std::move(acts));
}

TransitionMatrix generator_matrix(int type, double strength) {
  TransitionMatrix t(8);
  const double rest = (1.0 - strength) / 3.0;
  for (int prev = 0; prev < 8; ++prev) {
    const bool human = prev < 4;
    const int i = prev % 4;
    const int base = human ? 4 : 0;
    int preferred;
    if (type == 0)
      preferred = human ? i : (i + 1) % 4;
    else
      preferred = human ? (i + 2) % 4 : (i + 3) % 4;
    for (int j = 0; j < 4; ++j) t.at(base + j, prev) = j == preferred ? strength : rest;
  }
  return t;
}

LabeledCorpus markov_corpus(const MarkovConfig& c, std::uint64_t seed) {
  LabeledCorpus out;
  out.demos.alphabet = markov_alphabet();
  const TransitionMatrix gens[2] = {generator_matrix(0, c.strength), generator_matrix(1, c.strength)};
  Rng rng(seed);
  for (int s = 0; s < c.subjects; ++s) {
    const int type = s % 2;
    const auto name = subject_name("s", s);
    out.subject_labels[name] = type;
    for (int r = 0; r < c.per_subject; ++r) {
      DemoSequence seq;
      seq.subject = name;
      const int length = c.min_length + uniform_index(rng, c.max_length - c.min_length + 1);
      seq.actions.push_back(uniform_index(rng, 4));
      while (static_cast<int>(seq.actions.size()) < length) {
        const auto row = gens[type].row(seq.actions.back());
        seq.actions.push_back(sample_index(rng, row));
      }
      out.demos.sequences.push_back(std::move(seq));
      out.sequence_labels.push_back(type);
    }
  }
  return out;
}

place_drill::Preference preference_of(int label) {
  return label == 0 ? place_drill::Preference::safe : place_drill::Preference::efficient;
}

DemoSequence place_drill_demo(place_drill::Preference pref, const std::vector<int>& order,
                              std::optional<std::string> subject) {
  using namespace place_drill;
  DemoSequence seq;
  seq.subject = std::move(subject);
  if (pref == Preference::efficient) {
    for (int s : order) {
      seq.actions.push_back(place(s));
      seq.actions.push_back(drill(s));
    }
  } else {
    for (std::size_t i = 0; i < order.size(); ++i) {
      seq.actions.push_back(place(order[i]));
      seq.actions.push_back(i + 1 < order.size() ? kNoOp : drill(order[0]));
    }
    for (std::size_t i = 1; i < order.size(); ++i) {
      seq.actions.push_back(kWait);
      seq.actions.push_back(drill(order[i]));
    }
  }
  return seq;
}

LabeledCorpus place_drill_corpus(const PlaceDrillConfig& c, std::uint64_t seed) {
  LabeledCorpus out;
  out.demos.alphabet = place_drill::make_alphabet();
  Rng rng(seed);
  for (int type = 0; type < 2; ++type)
    for (int s = 0; s < c.per_type; ++s) {
      const auto name = subject_name(type == 0 ? "safe" : "efficient", s);
      out.subject_labels[name] = type;
      std::vector<int> usual{0, 1, 2};
      std::shuffle(usual.begin(), usual.end(), rng);
      for (int r = 0; r < c.per_subject; ++r) {
        auto order = usual;
        if (uniform01(rng) < c.order_noise) std::shuffle(order.begin(), order.end(), rng);
        out.demos.sequences.push_back(place_drill_demo(preference_of(type), order, name));
        out.sequence_labels.push_back(type);
      }
    }
  return out;
}

}  // namespace hrc::synthetic
