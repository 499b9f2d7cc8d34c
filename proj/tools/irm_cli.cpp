// irm: command line front end for the interactive regret-minimization engine.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "irm/error.hpp"
#include "irm/experiment.hpp"
#include "irm/service.hpp"
#include "irm/session_io.hpp"
#include "irm/skyline.hpp"

namespace {

using namespace irm;
namespace fs = std::filesystem;

struct DataArgs {
  std::string dataset = "anti";
  std::size_t n = 1000;
  std::size_t d = 4;
  std::uint64_t data_seed = 1;
  std::vector<std::string> columns;
  std::vector<std::string> labels;
  std::vector<std::string> invert;
  std::string name;
};

void add_data_options(CLI::App* cmd, DataArgs& a) {
  cmd->add_option("--dataset", a.dataset, "anti, corr, indep, a dataset .json, or a delimited file")->capture_default_str();
  cmd->add_option("--n", a.n, "points to generate")->capture_default_str();
  cmd->add_option("--d", a.d, "dimensions to generate")->capture_default_str();
  cmd->add_option("--data-seed", a.data_seed, "generator seed")->capture_default_str();
  cmd->add_option("--columns", a.columns, "columns to use from a delimited file (names or 0-based indices)")->delimiter(',');
  cmd->add_option("--labels", a.labels, "label columns from a delimited file")->delimiter(',');
  cmd->add_option("--invert", a.invert, "smaller-is-better columns")->delimiter(',');
  cmd->add_option("--name", a.name, "dataset name");
}

Dataset load(const DataArgs& a) {
  if (a.dataset == "anti" || a.dataset == "corr" || a.dataset == "indep") {
    DatasetSpec spec;
    spec.kind = dataset_kind_from_string(a.dataset);
    spec.n = a.n;
    spec.d = a.d;
    spec.seed = a.data_seed;
    return build_dataset(spec, a.name);
  }
  if (fs::path(a.dataset).extension() == ".json") {
    Dataset ds = read_dataset(a.dataset);
    if (!a.name.empty()) ds.name = a.name;
    return ds;
  }
  DatasetSpec spec;
  spec.kind = DatasetKind::File;
  spec.path = a.dataset;
  spec.columns = a.columns;
  spec.label_columns = a.labels;
  spec.invert = a.invert;
  return build_dataset(spec, a.name);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  return out;
}

std::vector<Strategy> parse_algorithms(const std::vector<std::string>& names) {
  std::vector<Strategy> out;
  for (const auto& n : names) {
    if (n == "all") return ExperimentConfig{}.algorithms;
    out.push_back(Strategy::from_name(n));
  }
  return out;
}

Service* g_service = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive regret minimization by sorting"};
  app.require_subcommand(1);

  DataArgs gen_args;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "write a dataset document");
  add_data_options(gen, gen_args);
  gen->add_option("--seed", gen_args.data_seed, "generator seed");
  gen->add_option("--out", gen_out, "output .json (stdout when omitted)");

  DataArgs sky_args;
  std::string sky_out;
  auto* sky = app.add_subcommand("skyline", "print the skyline ids of a dataset");
  add_data_options(sky, sky_args);
  sky->add_option("--out", sky_out, "output .json (stdout when omitted)");

  DataArgs run_args;
  std::vector<std::string> algos{"all"};
  std::vector<std::size_t> s_values{4};
  std::vector<double> epsilons{0.0};
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  std::string run_out = "results";
  std::vector<double> weights, original_weights;
  std::size_t max_rounds = 1000;
  std::string sessions_dir;
  auto* run = app.add_subcommand("run", "run simulated-user experiments");
  add_data_options(run, run_args);
  run->add_option("--algo", algos, "all, or any of sorting-simplex, sorting-random, uh-simplex, uh-random")
      ->delimiter(',')
      ->capture_default_str();
  run->add_option("--s", s_values, "display sizes")->delimiter(',')->capture_default_str();
  run->add_option("--epsilon", epsilons, "regret thresholds")->delimiter(',')->capture_default_str();
  run->add_option("--trials", trials, "simulated users per configuration")->capture_default_str();
  run->add_option("--seed", seed, "first trial seed")->capture_default_str();
  run->add_option("--out", run_out, "output prefix: writes PREFIX.csv and PREFIX.json")->capture_default_str();
  run->add_option("--user-weights", weights, "fixed hidden utility on normalized values")->delimiter(',');
  run->add_option("--original-weights", original_weights, "fixed hidden utility on original values")->delimiter(',');
  run->add_option("--max-rounds", max_rounds, "stop a session after this many rounds")->capture_default_str();
  run->add_option("--sessions", sessions_dir, "also write one session document per trial here");

  std::vector<std::string> serve_data;
  std::string bind = "127.0.0.1:8080";
  std::string state_dir;
  DataArgs serve_gen;
  auto* serve = app.add_subcommand("serve", "run the JSON session service");
  serve->add_option("--dataset", serve_data, "dataset .json files or anti/corr/indep (repeatable)");
  serve->add_option("--n", serve_gen.n, "points per generated dataset")->capture_default_str();
  serve->add_option("--d", serve_gen.d, "dimensions of generated datasets")->capture_default_str();
  serve->add_option("--data-seed", serve_gen.data_seed, "generator seed")->capture_default_str();
  serve->add_option("--bind", bind, "host:port")->capture_default_str();
  serve->add_option("--state", state_dir, "directory for persisted datasets and sessions");

  std::string replay_in, replay_dataset, replay_out;
  auto* rep = app.add_subcommand("replay", "re-run a recorded session and check it");
  rep->add_option("session", replay_in, "session document")->required();
  rep->add_option("--dataset", replay_dataset, "dataset .json when the document does not embed one");
  rep->add_option("--out", replay_out, "write the replayed session document here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const Dataset ds = load(gen_args);
      if (gen_out.empty())
        std::cout << to_json(ds).dump() << '\n';
      else
        write_dataset(ds, gen_out);
      std::cerr << ds.name << ": n=" << ds.size() << " d=" << ds.dim << '\n';
    } else if (*sky) {
      const Dataset ds = load(sky_args);
      const auto sk = compute_skyline(ds.points);
      const nlohmann::json j{{"dataset", ds.name}, {"n", ds.size()}, {"skyline", sk.ids}};
      if (sky_out.empty())
        std::cout << j.dump() << '\n';
      else
        open_out(sky_out) << j.dump() << '\n';
      std::cerr << "skyline size " << sk.size() << " of " << ds.size() << '\n';
    } else if (*run) {
      auto ds = std::make_shared<const Dataset>(load(run_args));
      ExperimentConfig cfg;
      cfg.algorithms = parse_algorithms(algos);
      cfg.s_values = s_values;
      cfg.epsilons = epsilons;
      cfg.trials = trials;
      cfg.base_seed = seed;
      cfg.max_rounds = max_rounds;
      if (!weights.empty()) cfg.user_weights = weights;
      if (!original_weights.empty()) cfg.user_original_weights = original_weights;
      cfg.keep_documents = !sessions_dir.empty();
      const auto records = run_experiment(cfg, ds);
      auto csv = open_out(run_out + ".csv");
      write_csv(records, csv);
      open_out(run_out + ".json") << to_json(records).dump(2) << '\n';
      if (!sessions_dir.empty()) {
        fs::create_directories(sessions_dir);
        for (const auto& r : records) {
          if (r.document.is_null()) continue;
          const std::string file = r.algorithm + "-s" + std::to_string(r.s) + "-e" + std::to_string(r.epsilon) +
                                   "-seed" + std::to_string(r.seed) + ".json";
          open_out((fs::path(sessions_dir) / file).string()) << r.document.dump(2) << '\n';
        }
      }
      std::size_t failed = 0;
      for (const auto& r : records) failed += !r.error.empty();
      std::cerr << records.size() << " trials, " << failed << " failed; wrote " << run_out << ".csv and " << run_out
                << ".json\n";
      return failed == 0 ? 0 : 2;
    } else if (*serve) {
      ServiceOptions opt;
      opt.state_dir = state_dir;
      Service service(opt);
      for (const auto& spec : serve_data) {
        DataArgs a = serve_gen;
        a.dataset = spec;
        service.add_dataset(load(a));
      }
      if (service.dataset_count() == 0) throw Error(ErrorCode::InvalidArgument, "serve needs at least one --dataset");
      const auto colon = bind.rfind(':');
      if (colon == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--bind expects host:port");
      const std::string host = bind.substr(0, colon);
      const int port = std::stoi(bind.substr(colon + 1));
      g_service = &service;
      std::signal(SIGINT, [](int) {
        if (g_service) g_service->stop();
      });
      std::cerr << "listening on " << host << ':' << port << '\n';
      service.listen(host, port);
    } else if (*rep) {
      const auto doc = read_session_file(replay_in);
      Session s = replay_dataset.empty() ? replay(doc)
                                         : replay(doc, std::make_shared<const Dataset>(read_dataset(replay_dataset)));
      const auto rec = s.recommend();
      std::cout << nlohmann::json{{"status", to_string(s.status())},
                                  {"rounds", s.rounds_completed()},
                                  {"recommendation", rec.point},
                                  {"regret_bound", rec.regret_bound},
                                  {"identical", true}}
                       .dump()
                << '\n';
      if (!replay_out.empty()) write_session(s, replay_out, doc.contains("dataset_document"));
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
