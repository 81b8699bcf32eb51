#include "bod/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "bod/engine.hpp"
#include "bod/error.hpp"
#include "bod/log.hpp"
#include "bod/service.hpp"
#include "bod/snapshot.hpp"
#include "bod/synth.hpp"
#include "bod/table.hpp"

namespace bod {

namespace fs = std::filesystem;

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;
constexpr double kBoundMs = 30000.0;

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << text;
}

std::vector<Dataset> load_datasets(const std::vector<std::string>& paths) {
  std::vector<Dataset> out;
  for (const auto& p : paths) {
    out.push_back(parse_dataset(std::string_view(read_file(p)), fs::path(p).stem().string()));
  }
  return out;
}

std::string trim_copy(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

void print_round(std::ostream& err, const AugmentedTable& table, const RoundResult& r,
                 std::size_t top) {
  err << "round " << r.round_index << ": pivot tuple " << r.pivot_tuple << ", y_min "
      << fixed6(r.y_min) << ", y_max " << fixed6(r.y_max) << ", " << r.survivors.size()
      << " survivors, " << r.eliminated.size() << " eliminated\n";
  const auto ranked = rank_by_utility(table, r.survivors);
  for (std::size_t i = 0; i < ranked.size() && i < top; ++i) {
    const auto id = ranked.tuple_ids[i];
    err << "  tuple " << id << "  utility " << fixed6(table.utility(id)) << '\n';
  }
}

/// Reads one attribute per pending dataset. Returns nullopt on "stop" or EOF.
std::optional<RoundChoice> prompt_round(const Session& session, std::istream& in,
                                        std::ostream& err) {
  RoundChoice choice;
  for (const auto& pending : session.pending_datasets()) {
    while (true) {
      err << pending.name << " [";
      for (std::size_t i = 0; i < pending.attributes.size(); ++i) {
        err << (i ? ", " : "") << i + 1 << ") " << pending.attributes[i];
      }
      err << "]> " << std::flush;

      std::string line;
      if (!std::getline(in, line)) return std::nullopt;
      line = trim_copy(line);
      if (line == "stop") return std::nullopt;

      std::optional<std::string> picked;
      if (std::find(pending.attributes.begin(), pending.attributes.end(), line) !=
          pending.attributes.end()) {
        picked = line;
      } else if (!line.empty() && std::all_of(line.begin(), line.end(), ::isdigit)) {
        const auto k = std::stoul(line);
        if (k >= 1 && k <= pending.attributes.size()) picked = pending.attributes[k - 1];
      }
      if (picked) {
        choice.selections.emplace(pending.name, *picked);
        break;
      }
      err << "'" << line << "' is not an unranked attribute of " << pending.name
          << "; enter a name, its number, or 'stop'\n";
    }
  }
  return choice;
}

struct DiscoverArgs {
  std::vector<std::string> datasets;
  bool interactive = false;
  std::string choices;
  std::string output;
  std::string history;
  std::size_t top = 5;
};

int discover(const DiscoverArgs& args, std::istream& in, std::ostream& out, std::ostream& err) {
  auto table = std::make_shared<const AugmentedTable>(augment(load_datasets(args.datasets)));
  Session session(table);
  err << "loaded " << table->tuple_count() << " tuples, " << table->column_count()
      << " attributes in " << table->partitions().size() << " datasets; at most "
      << max_rounds(*table) << " rounds\n";

  if (!args.choices.empty()) {
    const auto choices = choices_from_json(json::parse(read_file(args.choices)));
    for (const auto& choice : choices) {
      print_round(err, *table, session.submit_round(choice), args.top);
    }
  } else {
    err << "rank one attribute per dataset each round; type 'stop' to finish early\n";
    while (!session.finished()) {
      err << "\nround " << session.round() + 1 << " (" << session.alive().size()
          << " tuples alive)\n";
      const auto choice = prompt_round(session, in, err);
      if (!choice) break;
      print_round(err, *table, session.submit_round(*choice), args.top);
    }
  }

  const auto result = session.finish();
  err << "\nfinished after " << session.round() << " rounds with " << result.size()
      << " tuples\n";
  if (!args.history.empty()) write_file(args.history, session_snapshot(session).dump(2) + "\n");
  if (args.output.empty()) {
    write_subset_csv(out, *table, result);
  } else {
    std::ostringstream csv;
    write_subset_csv(csv, *table, result);
    write_file(args.output, csv.str());
  }
  return 0;
}

struct BenchArgs {
  std::size_t tuples = 10000;
  std::vector<std::size_t> tuple_list{5000, 10000, 15000};
  std::size_t d_min = 3;
  std::size_t d_max = 9;
  std::size_t d = 6;
  std::size_t datasets = 3;
  std::uint64_t seed = 7;
  std::size_t reps = 3;
  std::string out;
};

int write_bench(const BenchReport& report, const std::string& path, std::ostream& out) {
  std::ostringstream csv;
  report.write_csv(csv);
  write_file(path, csv.str());
  const auto json_path = fs::path(path).replace_extension(".json");
  write_file(json_path, report.to_json().dump(2) + "\n");

  out << "config  d  n_tuples  min_ms  median_ms  max_ms\n";
  for (const auto& a : report.aggregates) {
    out << a.config_index << "  " << a.d << "  " << a.n_tuples << "  " << fixed6(a.min_ms)
        << "  " << fixed6(a.median_ms) << "  " << fixed6(a.max_ms) << '\n';
  }
  const double worst = report.max_elapsed_ms();
  out << report.rows.size() << " rows written to " << path << " and " << json_path.string()
      << "\nmax elapsed " << fixed6(worst) << " ms; under 30 s: " << (worst < kBoundMs ? "yes" : "no")
      << '\n';
  return 0;
}

struct OracleArgs {
  std::string snapshot;
  std::vector<std::string> datasets;
};

int oracle(const OracleArgs& args, std::ostream& out, std::ostream& err) {
  const auto table = augment(load_datasets(args.datasets));
  const auto snapshot = json::parse(read_file(args.snapshot));
  const auto digest = snapshot.at("table_digest").get<std::string>();
  if (digest != table_digest(table)) {
    throw Error(Errc::DigestMismatch,
                "snapshot digest " + digest + " does not match datasets (" + table_digest(table) + ")");
  }
  std::vector<RoundChoice> choices;
  for (const auto& entry : snapshot.at("history")) choices.push_back(choice_from_json(entry.at("choices")));
  const auto replayed = replay_oracle(table, choices);

  bool ok = true;
  const auto& recorded = snapshot.at("history");
  for (std::size_t i = 0; i < replayed.size(); ++i) {
    const auto& rec = recorded[i];
    const auto& r = replayed[i];
    std::vector<std::string> diffs;
    if (rec.at("pivot").get<TupleId>() != r.pivot_tuple) diffs.push_back("pivot");
    if (std::abs(rec.at("y_min").get<double>() - r.y_min) > 1e-9) diffs.push_back("y_min");
    if (std::abs(rec.at("y_max").get<double>() - r.y_max) > 1e-9) diffs.push_back("y_max");
    if (rec.at("survivors").get<std::vector<TupleId>>() != r.survivors.tuple_ids) {
      diffs.push_back("survivors");
    }
    if (diffs.empty()) {
      out << "round " << r.round_index << ": match\n";
    } else {
      ok = false;
      out << "round " << r.round_index << ": MISMATCH in";
      for (const auto& d : diffs) out << ' ' << d;
      out << '\n';
    }
  }
  out << (ok ? "history matches oracle\n" : "history differs from oracle\n");
  if (!ok) err << "oracle replay disagrees with recorded history\n";
  return ok ? 0 : kExitData;
}

std::atomic<HttpService*> g_running_service{nullptr};

extern "C" void stop_on_signal(int) {
  if (auto* svc = g_running_service.load()) svc->stop();
}

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string snapshot_dir;
  std::string assets;
  std::size_t max_body = 64u << 20;
};

int serve(const ServeArgs& args, std::ostream& err) {
  ServiceOptions options;
  if (!args.snapshot_dir.empty()) options.snapshot_dir = args.snapshot_dir;
  if (!args.assets.empty()) options.assets_dir = args.assets;
  options.max_payload_bytes = args.max_body;

  HttpService service(std::move(options));
  const int port = service.bind(args.host, args.port);
  if (port < 0) {
    err << "cannot bind " << args.host << ":" << args.port << '\n';
    return kExitData;
  }
  err << "listening on http://" << args.host << ":" << port << " (" << service.store().size()
      << " sessions restored)\n";
  g_running_service = &service;
  std::signal(SIGINT, stop_on_signal);
  std::signal(SIGTERM, stop_on_signal);
  service.listen();
  g_running_service = nullptr;
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
  init_logging();

  CLI::App app{"Interactive preference-driven data discovery", "bod"};
  app.require_subcommand(1);

  DiscoverArgs discover_args;
  auto* discover_cmd = app.add_subcommand("discover", "Augment datasets and filter them round by round");
  discover_cmd->add_option("-d,--dataset", discover_args.datasets, "CSV dataset (name = file stem)")
      ->required()
      ->check(CLI::ExistingFile);
  auto* interactive_flag =
      discover_cmd->add_flag("--interactive", discover_args.interactive, "Prompt for each round (default)");
  discover_cmd->add_option("--choices", discover_args.choices, "JSON array of rounds for batch replay")
      ->check(CLI::ExistingFile)
      ->excludes(interactive_flag);
  discover_cmd->add_option("-o,--output", discover_args.output, "Result CSV path (default stdout)");
  discover_cmd->add_option("--history", discover_args.history, "Write the session snapshot JSON here");
  discover_cmd->add_option("--top", discover_args.top, "Survivors shown per round")->capture_default_str();

  auto* bench_cmd = app.add_subcommand("bench", "Synthetic runtime sweeps");
  bench_cmd->require_subcommand(1);

  BenchArgs attrs_args;
  auto* attrs_cmd = bench_cmd->add_subcommand("attrs", "Sweep the total attribute count");
  attrs_cmd->add_option("--tuples", attrs_args.tuples)->capture_default_str()->check(CLI::PositiveNumber);
  attrs_cmd->add_option("--d-min", attrs_args.d_min)->capture_default_str()->check(CLI::PositiveNumber);
  attrs_cmd->add_option("--d-max", attrs_args.d_max)->capture_default_str()->check(CLI::PositiveNumber);
  attrs_cmd->add_option("--datasets", attrs_args.datasets)->capture_default_str()->check(CLI::PositiveNumber);
  attrs_cmd->add_option("--seed", attrs_args.seed)->capture_default_str();
  attrs_cmd->add_option("--reps", attrs_args.reps)->capture_default_str()->check(CLI::NonNegativeNumber);
  attrs_cmd->add_option("--out", attrs_args.out, "Report CSV path; JSON twin beside it")->required();

  BenchArgs tuples_args;
  auto* tuples_cmd = bench_cmd->add_subcommand("tuples", "Sweep the tuple count at fixed d");
  tuples_cmd->add_option("--d", tuples_args.d)->capture_default_str()->check(CLI::PositiveNumber);
  tuples_cmd->add_option("--tuples", tuples_args.tuple_list)
      ->delimiter(',')
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  tuples_cmd->add_option("--datasets", tuples_args.datasets)->capture_default_str()->check(CLI::PositiveNumber);
  tuples_cmd->add_option("--seed", tuples_args.seed)->capture_default_str();
  tuples_cmd->add_option("--reps", tuples_args.reps)->capture_default_str()->check(CLI::NonNegativeNumber);
  tuples_cmd->add_option("--out", tuples_args.out, "Report CSV path; JSON twin beside it")->required();

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP/JSON session service");
  serve_cmd->add_option("--host", serve_args.host)->capture_default_str();
  serve_cmd->add_option("--port", serve_args.port)->capture_default_str()->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--snapshot-dir", serve_args.snapshot_dir, "Persist sessions as JSON here");
  serve_cmd->add_option("--assets", serve_args.assets, "Static web UI directory served at /")
      ->check(CLI::ExistingDirectory);
  serve_cmd->add_option("--max-body", serve_args.max_body, "Request size limit in bytes")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  OracleArgs oracle_args;
  auto* oracle_cmd = app.add_subcommand("oracle", "Re-run a recorded history through the naive oracle");
  oracle_cmd->add_option("--replay", oracle_args.snapshot, "Session snapshot JSON")
      ->required()
      ->check(CLI::ExistingFile);
  oracle_cmd->add_option("-d,--dataset", oracle_args.datasets, "Datasets the session was built from")
      ->required()
      ->check(CLI::ExistingFile);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*discover_cmd) return discover(discover_args, in, out, err);
    if (*attrs_cmd) {
      if (attrs_args.d_min > attrs_args.d_max) {
        err << "--d-min must not exceed --d-max\n";
        return kExitUsage;
      }
      if (attrs_args.d_min < attrs_args.datasets) {
        err << "--d-min must be at least --datasets (one attribute per dataset)\n";
        return kExitUsage;
      }
      const auto sweep = attribute_sweep(attrs_args.datasets, attrs_args.tuples, attrs_args.d_min,
                                         attrs_args.d_max, attrs_args.seed);
      return write_bench(run_benchmark(sweep, attrs_args.reps), attrs_args.out, out);
    }
    if (*tuples_cmd) {
      if (tuples_args.d < tuples_args.datasets) {
        err << "--d must be at least --datasets (one attribute per dataset)\n";
        return kExitUsage;
      }
      const auto sweep =
          tuple_sweep(tuples_args.datasets, tuples_args.d, tuples_args.tuple_list, tuples_args.seed);
      return write_bench(run_benchmark(sweep, tuples_args.reps), tuples_args.out, out);
    }
    if (*serve_cmd) return serve(serve_args, err);
    if (*oracle_cmd) return oracle(oracle_args, out, err);
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return kExitData;
  } catch (const json::exception& e) {
    err << "error: invalid JSON: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace bod
