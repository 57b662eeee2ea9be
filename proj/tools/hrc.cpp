#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hrc/bundle.hpp"
#include "hrc/errors.hpp"
#include "hrc/hand_finishing.hpp"
#include "hrc/harness.hpp"
#include "hrc/place_drill.hpp"
#include "hrc/service.hpp"
#include "hrc/synthetic.hpp"

namespace fs = std::filesystem;
using namespace hrc;

namespace {

void emit(const nlohmann::json& j, const std::string& out) {
  if (out.empty() || out == "-")
    std::cout << j.dump(2) << "\n";
  else
    write_json(out, j);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

nlohmann::json labels_json(const synthetic::LabeledCorpus& c, const std::vector<std::string>& names) {
  nlohmann::json labels = nlohmann::json::object();
  for (const auto& [subject, label] : c.subject_labels) labels[subject] = names[static_cast<std::size_t>(label)];
  return {{"labels", labels}};
}

// Subject → label index, with labels numbered in order of first name.
std::map<std::string, int> read_labels(const std::string& path, std::vector<std::string>& names) {
  std::map<std::string, int> out;
  const auto j = read_json(path);
  for (const auto& [subject, v] : j.at("labels").items()) {
    const auto name = v.get<std::string>();
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) it = names.insert(names.end(), name);
    out[subject] = static_cast<int>(it - names.begin());
  }
  return out;
}

// Prompts on stdin for each human turn.
int prompt_human(const TaskDomain& d, int step, int robot, const std::vector<int>& legal) {
  for (;;) {
    std::cout << "step " << d.steps[static_cast<std::size_t>(step)] << ", robot: " << d.alphabet.label(robot)
              << "\nchoose:";
    for (int h : legal) std::cout << " " << d.alphabet.label(h);
    std::cout << "\n> " << std::flush;
    std::string line;
    if (!std::getline(std::cin, line)) throw Error("input closed");
    auto id = d.alphabet.find(line);
    if (id && std::find(legal.begin(), legal.end(), *id) != legal.end()) return *id;
    std::cout << "not a legal action\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn human types from demonstrations and execute type-aware collaborative policies"};
  app.require_subcommand(1);

  // domain
  auto* domain_cmd = app.add_subcommand("domain", "Write the bundled domain or validate a domain file");
  std::string domain_name = "place-drill", domain_out, domain_check;
  double discount = 0.95;
  domain_cmd->add_option("--name", domain_name, "Bundled domain to write")->check(CLI::IsMember({"place-drill"}));
  domain_cmd->add_option("--discount", discount, "Discount factor");
  domain_cmd->add_option("--validate", domain_check, "Domain file to validate")->check(CLI::ExistingFile);
  domain_cmd->add_option("--out", domain_out, "Output file (stdout if omitted)");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic demonstration corpus");
  std::string synth_kind = "place-drill", synth_out, synth_labels;
  std::uint64_t synth_seed = 0;
  int synth_per_type = 6;
  synth_cmd->add_option("--kind", synth_kind)->check(CLI::IsMember({"place-drill", "markov"}));
  synth_cmd->add_option("--seed", synth_seed);
  synth_cmd->add_option("--per-type", synth_per_type, "Subjects per type");
  synth_cmd->add_option("--out", synth_out)->required();
  synth_cmd->add_option("--labels", synth_labels, "Write subject labels here");

  // cluster
  auto* cluster_cmd = app.add_subcommand("cluster", "Cluster demonstrations into types by hard EM and BIC");
  std::string cluster_demos, cluster_out;
  int kmin = 2, kmax = 10, restarts = 20, threads = 1;
  std::uint64_t seed = 0;
  bool uniform_prior = false;
  cluster_cmd->add_option("--demos", cluster_demos)->required()->check(CLI::ExistingFile);
  cluster_cmd->add_option("--kmin", kmin);
  cluster_cmd->add_option("--kmax", kmax);
  cluster_cmd->add_option("--restarts", restarts);
  cluster_cmd->add_option("--seed", seed);
  cluster_cmd->add_option("--threads", threads);
  cluster_cmd->add_flag("--uniform-prior", uniform_prior, "Fix P(z) to 1/k");
  cluster_cmd->add_option("--out", cluster_out)->required();

  // irl
  auto* irl_cmd = app.add_subcommand("irl", "Learn per-type rewards from a clustered model");
  std::string irl_domain, irl_model, irl_out;
  int irl_cluster = -1, irl_max_iter = 50;
  double irl_epsilon = 0.01;
  irl_cmd->add_option("--domain", irl_domain)->required()->check(CLI::ExistingFile);
  irl_cmd->add_option("--model", irl_model)->required()->check(CLI::ExistingFile);
  irl_cmd->add_option("--cluster", irl_cluster, "Cluster index (all if omitted)");
  irl_cmd->add_option("--epsilon", irl_epsilon);
  irl_cmd->add_option("--max-iter", irl_max_iter);
  irl_cmd->add_option("--seed", seed);
  irl_cmd->add_option("--out", irl_out)->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "Cluster, learn rewards, assemble and solve into a bundle");
  std::string train_demos, train_domain, train_out, timestamp;
  TrainConfig config;
  train_cmd->add_option("--demos", train_demos)->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--domain", train_domain)->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--kmin", config.k_min);
  train_cmd->add_option("--kmax", config.k_max);
  train_cmd->add_option("--restarts", config.restarts);
  train_cmd->add_option("--seed", config.seed);
  train_cmd->add_option("--epsilon", config.irl_epsilon);
  train_cmd->add_option("--points", config.solver.n_points);
  train_cmd->add_option("--threads", config.threads);
  train_cmd->add_flag("--uniform-prior", config.em.uniform_prior);
  train_cmd->add_option("--timestamp", timestamp, "Record this creation time in the manifest");
  train_cmd->add_option("--out", train_out)->required();

  // infer-type
  auto* infer_cmd = app.add_subcommand("infer-type", "Posterior over types from a user's demonstrations");
  std::string infer_bundle, infer_demos, infer_out;
  infer_cmd->add_option("--bundle", infer_bundle)->required()->check(CLI::ExistingDirectory);
  infer_cmd->add_option("--demos", infer_demos)->required()->check(CLI::ExistingFile);
  infer_cmd->add_option("--out", infer_out);

  // run
  auto* run_cmd = app.add_subcommand("run", "Execute one episode against a scripted, simulated or interactive human");
  std::string run_bundle, run_human = "simulated", run_demos, run_prior = "uniform", run_out;
  int run_type = 0, run_turns = 50;
  double run_epsilon = 0.0;
  run_cmd->add_option("--bundle", run_bundle)->required()->check(CLI::ExistingDirectory);
  run_cmd->add_option("--human", run_human)->check(CLI::IsMember({"scripted", "simulated", "interactive"}));
  run_cmd->add_option("--demos", run_demos, "User demonstrations: scripted base and offline prior")->check(CLI::ExistingFile);
  run_cmd->add_option("--prior", run_prior)->check(CLI::IsMember({"uniform", "offline"}));
  run_cmd->add_option("--type", run_type, "Type simulated by --human simulated");
  run_cmd->add_option("--epsilon", run_epsilon, "Deviation probability of a scripted human");
  run_cmd->add_option("--max-turns", run_turns);
  run_cmd->add_option("--seed", seed);
  run_cmd->add_option("--out", run_out);

  // export-policy
  auto* export_cmd = app.add_subcommand("export-policy", "Write the policy's alpha vectors with labels");
  std::string export_bundle, export_out;
  export_cmd->add_option("--bundle", export_bundle)->required()->check(CLI::ExistingDirectory);
  export_cmd->add_option("--out", export_out);

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Leave-one-out evaluation under deviating simulated humans");
  std::string eval_demos, eval_domain, eval_labels, eval_epsilons = "0,0.2,0.4,0.6,0.8,1.0", eval_baselines = "per-user-mdp",
                                                    eval_out;
  RobustnessConfig robust;
  TrainConfig eval_config;
  eval_cmd->add_option("--demos", eval_demos)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--domain", eval_domain)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--labels", eval_labels, "Subject labels (place-drill preferences)")->check(CLI::ExistingFile);
  eval_cmd->add_option("--epsilons", eval_epsilons);
  eval_cmd->add_option("--reps", robust.reps);
  eval_cmd->add_option("--baselines", eval_baselines)->check(CLI::IsMember({"per-user-mdp", "none"}));
  eval_cmd->add_option("--kmin", eval_config.k_min);
  eval_cmd->add_option("--kmax", eval_config.k_max);
  eval_cmd->add_option("--restarts", eval_config.restarts);
  eval_cmd->add_option("--seed", eval_config.seed);
  eval_cmd->add_option("--threads", eval_config.threads);
  eval_cmd->add_option("--out", eval_out)->required();

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Serve live sessions over HTTP");
  std::string serve_bundle, bind = "127.0.0.1:8080";
  int idle_minutes = 30;
  serve_cmd->add_option("--bundle", serve_bundle)->required()->check(CLI::ExistingDirectory);
  serve_cmd->add_option("--bind", bind, "host:port");
  serve_cmd->add_option("--idle-minutes", idle_minutes);

  // hand-finishing
  auto* hand_cmd = app.add_subcommand("hand-finishing", "Solve the grid hand-finishing task and run one episode");
  std::string hand_config, hand_out, hand_side = "left";
  int hand_points = 1000;
  hand_cmd->add_option("--config", hand_config)->check(CLI::ExistingFile);
  hand_cmd->add_option("--side", hand_side, "Type of the simulated human")->check(CLI::IsMember({"left", "right"}));
  hand_cmd->add_option("--points", hand_points);
  hand_cmd->add_option("--seed", seed);
  hand_cmd->add_option("--out", hand_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*domain_cmd) {
      if (!domain_check.empty()) {
        const auto problems = validate_domain(load_domain(domain_check));
        for (const auto& p : problems) std::cout << p << "\n";
        if (problems.empty()) std::cout << "valid\n";
        return problems.empty() ? 0 : 1;
      }
      emit(to_json(place_drill::make_domain(discount)), domain_out);
    } else if (*synth_cmd) {
      if (synth_kind == "markov") {
        synthetic::MarkovConfig mc;
        mc.subjects = 2 * synth_per_type;
        const auto c = synthetic::markov_corpus(mc, synth_seed);
        save_demonstrations(c.demos, synth_out);
        if (!synth_labels.empty()) write_json(synth_labels, labels_json(c, {"0", "1"}));
      } else {
        synthetic::PlaceDrillConfig pc;
        pc.per_type = synth_per_type;
        const auto c = synthetic::place_drill_corpus(pc, synth_seed);
        save_demonstrations(c.demos, synth_out);
        if (!synth_labels.empty()) write_json(synth_labels, labels_json(c, {"safe", "efficient"}));
      }
    } else if (*cluster_cmd) {
      const auto demos = load_demonstrations(cluster_demos);
      EmOptions em;
      em.uniform_prior = uniform_prior;
      const auto model =
          select_best_model(demos.sequences, demos.alphabet.size(), kmin, kmax, restarts, seed, em, threads);
      write_json(cluster_out, model_file_json(demos, model));
      std::cerr << "selected k=" << model.k << " (BIC " << model.bic << ")\n";
    } else if (*irl_cmd) {
      const auto domain = load_domain(irl_domain);
      const auto [demos, model] = model_file_from_json(read_json(irl_model));
      const auto groups = sequences_by_cluster(demos.sequences, model);
      const auto typed = with_type_responses(domain, groups);
      std::vector<RewardSpec> specs;
      for (int z = 0; z < model.k; ++z) {
        if (irl_cluster >= 0 && z != irl_cluster) continue;
        specs.push_back(learn_reward(typed, type_tag(z), groups[static_cast<std::size_t>(z)], irl_epsilon, irl_max_iter,
                                     derive_seed(seed, {0x1e1, static_cast<std::uint64_t>(z)})));
      }
      if (specs.empty()) throw Error("cluster " + std::to_string(irl_cluster) + " does not exist");
      auto j = rewards_to_json(specs);
      if (irl_cluster >= 0) j["cluster"] = irl_cluster;
      write_json(irl_out, j);
    } else if (*train_cmd) {
      config.solver.seed = config.seed;
      const auto bundle = train(load_demonstrations(train_demos), load_domain(train_domain), config);
      save_bundle(bundle, train_out, timestamp);
      std::cerr << "trained k=" << bundle.k() << ", " << bundle.policy.sweeps << " sweeps over "
                << bundle.policy.belief_points << " beliefs\n";
    } else if (*infer_cmd) {
      const auto bundle = load_bundle(infer_bundle);
      const auto demos = load_demonstrations(infer_demos);
      emit({{"belief", infer_type_offline(bundle, demos.sequences)}}, infer_out);
    } else if (*run_cmd) {
      const auto bundle = load_bundle(run_bundle);
      std::vector<DemoSequence> user;
      if (!run_demos.empty()) user = load_demonstrations(run_demos).sequences;
      Belief prior = uniform_belief(bundle.k());
      if (run_prior == "offline") {
        if (user.empty()) throw Error("--prior offline needs --demos");
        prior = infer_type_offline(bundle, user);
      }
      std::unique_ptr<HumanSource> human;
      if (run_human == "scripted") {
        if (user.empty()) throw Error("--human scripted needs --demos");
        human = std::make_unique<EpsilonHuman>(human_actions_of(bundle.domain.alphabet, user.front().actions), run_epsilon,
                                               seed);
      } else if (run_human == "simulated") {
        human = std::make_unique<SimulatedHuman>(bundle.domain, type_tag(run_type), seed);
      } else {
        human = std::make_unique<InteractiveHuman>(
            [&](int step, int robot, const std::vector<int>& legal) { return prompt_human(bundle.domain, step, robot, legal); });
      }
      const auto t = run_episode(bundle, *human, prior, run_turns);
      emit(to_json(bundle.domain, t), run_out);
    } else if (*export_cmd) {
      const auto bundle = load_bundle(export_bundle);
      auto steps = nlohmann::json::array();
      for (int x = 0; x < bundle.momdp.num_x; ++x) {
        auto vs = nlohmann::json::array();
        for (const auto& v : bundle.policy.alphas[static_cast<std::size_t>(x)])
          vs.push_back({{"action", bundle.momdp.action_labels[static_cast<std::size_t>(v.action)]}, {"alpha", v.values}});
        steps.push_back({{"step", bundle.domain.steps[static_cast<std::size_t>(x)]},
                         {"terminal", bundle.domain.is_terminal(x)},
                         {"vectors", vs}});
      }
      emit({{"types", bundle.k()}, {"steps", steps}}, export_out);
    } else if (*eval_cmd) {
      const auto demos = load_demonstrations(eval_demos);
      const auto domain = load_domain(eval_domain);
      robust.epsilons = parse_list(eval_epsilons);
      robust.baseline = eval_baselines == "per-user-mdp";
      robust.seed = eval_config.seed;
      eval_config.solver.seed = eval_config.seed;
      std::vector<std::string> names;
      std::map<std::string, int> labels;
      if (!eval_labels.empty()) labels = read_labels(eval_labels, names);
      const auto folds = cross_validate(demos, domain, eval_config, eval_config.threads);
      Scorer scorer;
      if (domain.name == place_drill::make_domain().name && !labels.empty()) {
        robust.deviation_actions = {place_drill::place(0), place_drill::place(1), place_drill::place(2)};
        robust.fallback = place_drill::kWait;
        scorer = [&](const std::string& subject, int step, int robot) {
          const auto pref = names[static_cast<std::size_t>(labels.at(subject))] == "safe"
                                ? place_drill::Preference::safe
                                : place_drill::Preference::efficient;
          return place_drill::true_reward(pref, step, robot);
        };
      } else {
        // Without ground truth, score by the learned reward of the held-out
        // subject's predicted type in its own fold.
        std::map<std::string, std::vector<double>> learned;
        for (const auto& f : folds)
          learned[f.held_out] =
              f.bundle.rewards[static_cast<std::size_t>(predict_subject(f.bundle.model, f.held_out_demos))].state_reward();
        scorer = [learned](const std::string& subject, int step, int) {
          return learned.at(subject)[static_cast<std::size_t>(step)];
        };
      }
      const auto report = evaluate_robustness(folds, robust, scorer);
      fs::create_directories(eval_out);
      emit_plot_data(report, fs::path(eval_out) / "plot.csv");
      emit_episodes(report, fs::path(eval_out) / "episodes.csv");
      nlohmann::json summary{{"folds", folds.size()}, {"reps", report.reps}};
      if (!labels.empty()) summary["classification_accuracy"] = classification_accuracy(folds, labels);
      write_json(fs::path(eval_out) / "summary.json", summary);
      std::cout << plot_csv(report);
    } else if (*serve_cmd) {
      auto bundle = std::make_shared<const TrainedBundle>(load_bundle(serve_bundle));
      const auto id = fs::path(serve_bundle).lexically_normal().filename().string();
      ServiceOptions opts;
      opts.idle_timeout = std::chrono::minutes(idle_minutes);
      SessionManager manager({{id.empty() ? "default" : id, bundle}}, opts);
      const auto colon = bind.rfind(':');
      if (colon == std::string::npos) throw Error("--bind must be host:port");
      std::cerr << "serving bundle '" << id << "' on " << bind << "\n";
      serve_http(manager, bind.substr(0, colon), std::stoi(bind.substr(colon + 1)));
    } else if (*hand_cmd) {
      const auto cfg = hand_config.empty() ? hand_finishing::Config{}
                                           : hand_finishing::config_from_json(read_json(hand_config));
      const auto m = hand_finishing::make_momdp(cfg);
      SolverOptions so;
      so.n_points = hand_points;
      so.seed = seed;
      const auto pv = solve_point_based(m, so);
      const int side = hand_side == "left" ? 0 : 1;
      Rng rng(derive_seed(seed, {0x4a4d}));
      auto turns = nlohmann::json::array();
      int x = m.initial_x;
      Belief b = m.initial_belief;
      for (int t = 0; t < 100 && !m.is_terminal(x); ++t) {
        const int a = best_action(pv, x, b);
        const int x2 = m.tx_row(x, side, a).front().first;
        const int o = sample_index(rng, m.obs_rows[static_cast<std::size_t>(m.obs_row_id(x2, a, side))]);
        b = belief_update(m, b, x, a, x2, o);
        turns.push_back({{"step", m.x_labels[static_cast<std::size_t>(x)]},
                         {"robot_action", m.action_labels[static_cast<std::size_t>(a)]},
                         {"hand", m.obs_labels[static_cast<std::size_t>(o)]},
                         {"belief", b}});
        x = x2;
      }
      emit({{"turns", turns}, {"final_step", m.x_labels[static_cast<std::size_t>(x)]},
            {"goal", hand_finishing::goal_of(cfg, x)}}, hand_out);
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
