#include "hrc/demos.hpp"

#include <fstream>

#include "hrc/errors.hpp"

namespace hrc {

void validate_sequence(const DemoSequence& seq, const ActionAlphabet& alphabet) {
  if (seq.actions.size() < 2)
    throw ValidationError("sequence has length " + std::to_string(seq.actions.size()) + "; need at least 2");
  for (std::size_t i = 0; i < seq.actions.size(); ++i) {
    int id = seq.actions[i];
    if (id < 0 || id >= alphabet.size())
      throw ValidationError("unknown action id " + std::to_string(id) + " at index " + std::to_string(i + 1));
    if (i > 0 && alphabet.actor(id) == alphabet.actor(seq.actions[i - 1]))
      throw ValidationError("actors do not alternate at index " + std::to_string(i + 1) + " ('" +
                            alphabet.label(seq.actions[i - 1]) + "' then '" + alphabet.label(id) + "')");
  }
}

DemoSequence sequence_from_labels(const ActionAlphabet& alphabet, const std::vector<std::string>& labels,
                                  std::optional<std::string> subject) {
  DemoSequence seq;
  seq.subject = std::move(subject);
  seq.actions.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto id = alphabet.find(labels[i]);
    if (!id) throw ValidationError("unknown action '" + labels[i] + "' at index " + std::to_string(i + 1));
    seq.actions.push_back(*id);
  }
  validate_sequence(seq, alphabet);
  return seq;
}

std::vector<std::string> sequence_labels(const ActionAlphabet& alphabet, const DemoSequence& seq) {
  std::vector<std::string> out;
  out.reserve(seq.actions.size());
  for (int id : seq.actions) out.push_back(alphabet.label(id));
  return out;
}

DemoSet demonstrations_from_json(const nlohmann::json& j, const std::string& origin) {
  if (!j.is_object() || !j.contains("alphabet") || !j.contains("sequences"))
    throw ParseError(origin, "expected an object with 'alphabet' and 'sequences'");
  DemoSet demos;
  demos.alphabet = alphabet_from_json(j.at("alphabet"));
  const auto& seqs = j.at("sequences");
  if (!seqs.is_array()) throw ParseError(origin + ": sequences", "expected an array");
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    const std::string where = origin + ": sequences[" + std::to_string(i) + "]";
    try {
      const auto& s = seqs[i];
      std::optional<std::string> subject;
      if (s.contains("subject") && !s.at("subject").is_null()) subject = s.at("subject").get<std::string>();
      demos.sequences.push_back(
          sequence_from_labels(demos.alphabet, s.at("actions").get<std::vector<std::string>>(), subject));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(where, ex.what());
    } catch (const ValidationError& ex) {
      throw ParseError(where, ex.what());
    }
  }
  return demos;
}

DemoSet load_demonstrations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open demonstrations file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ParseError(path.string() + " (byte " + std::to_string(ex.byte) + ")", ex.what());
  }
  return demonstrations_from_json(j, path.string());
}

nlohmann::json to_json(const DemoSet& demos) {
  auto seqs = nlohmann::json::array();
  for (const auto& s : demos.sequences) {
    nlohmann::json e;
    e["subject"] = s.subject ? nlohmann::json(*s.subject) : nlohmann::json(nullptr);
    e["actions"] = sequence_labels(demos.alphabet, s);
    seqs.push_back(std::move(e));
  }
  return {{"alphabet", to_json(demos.alphabet)}, {"sequences", std::move(seqs)}};
}

void save_demonstrations(const DemoSet& demos, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << to_json(demos).dump(2) << '\n';
}

std::vector<std::pair<std::string, std::vector<DemoSequence>>> group_by_subject(
    const std::vector<DemoSequence>& sequences) {
  std::vector<std::pair<std::string, std::vector<DemoSequence>>> groups;
  std::map<std::string, std::size_t> where;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    const auto& s = sequences[i];
    std::string key = s.subject ? *s.subject : "#" + std::to_string(i);
    auto [it, inserted] = where.emplace(key, groups.size());
    if (inserted) groups.emplace_back(key, std::vector<DemoSequence>{});
    groups[it->second].second.push_back(s);
  }
  return groups;
}

}  // namespace hrc
