#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hrc/alphabet.hpp"

namespace hrc {

/// One demonstrated trace of alternating human and robot actions.
struct DemoSequence {
  std::vector<int> actions;
  std::optional<std::string> subject;

  bool operator==(const DemoSequence&) const = default;
};

struct DemoSet {
  ActionAlphabet alphabet;
  std::vector<DemoSequence> sequences;

  bool operator==(const DemoSet&) const = default;
};

/// Throws ValidationError on length < 2, unknown ids or a non-alternating
/// pair; the message carries the 1-based index of the offending element.
void validate_sequence(const DemoSequence& seq, const ActionAlphabet& alphabet);

DemoSet load_demonstrations(const std::filesystem::path& path);
DemoSet demonstrations_from_json(const nlohmann::json& j, const std::string& origin = "demonstrations");
nlohmann::json to_json(const DemoSet& demos);
void save_demonstrations(const DemoSet& demos, const std::filesystem::path& path);

/// Parses one sequence given as a list of labels.
DemoSequence sequence_from_labels(const ActionAlphabet& alphabet, const std::vector<std::string>& labels,
                                  std::optional<std::string> subject = std::nullopt);
std::vector<std::string> sequence_labels(const ActionAlphabet& alphabet, const DemoSequence& seq);

/// Sequences grouped by subject id, in order of first appearance. Sequences
/// without a subject each form their own group named "#<index>".
std::vector<std::pair<std::string, std::vector<DemoSequence>>> group_by_subject(
    const std::vector<DemoSequence>& sequences);

}  // namespace hrc
