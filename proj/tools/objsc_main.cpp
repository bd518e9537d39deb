#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "objsc/adversary.hpp"
#include "objsc/harness.hpp"
#include "objsc/miner.hpp"
#include "objsc/validator.hpp"
#include "objsc/workload.hpp"

namespace {

using namespace objsc;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitRejected = 2;

std::uint64_t seed_fallback() {
  if (const char* env = std::getenv("OBJSC_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring unparsable OBJSC_SEED\n";
    }
  }
  return 1;
}

struct WorkloadFlags {
  std::string workload_file;
  std::string contract = "mix";
  std::uint32_t scts = 100;
  std::uint32_t threads = 8;
  std::uint32_t shared = 500;
  std::uint32_t buckets = kDefaultBuckets;
  std::uint64_t seed = 0;
  bool seed_set = false;

  void attach(CLI::App* app) {
    app->add_option("--workload", workload_file,
                    "workload config file (key=value)");
    app->add_option("--contract", contract, "coin|ballot|auction|mix");
    app->add_option("--scts", scts, "SCTs per block");
    app->add_option("--threads", threads, "worker threads");
    app->add_option("--shared", shared, "shared data-items");
    app->add_option("--buckets", buckets, "hash-table buckets");
    app->add_option("--seed", seed, "workload seed")->each([this](std::string) {
      seed_set = true;
    });
  }

  bool resolve(WorkloadSpec& spec, std::string* error) {
    if (!workload_file.empty()) {
      auto parsed = parse_workload_file(workload_file, error);
      if (!parsed.has_value()) return false;
      spec = *parsed;
      return true;
    }
    auto c = contract_from_string(contract);
    if (!c.has_value()) {
      *error = "unknown contract '" + contract + "'";
      return false;
    }
    spec.contract = *c;
    spec.num_scts = scts;
    spec.num_threads = threads;
    spec.shared_items = shared;
    spec.hash_buckets = buckets;
    spec.seed = seed_set ? seed : seed_fallback();
    return true;
  }
};

int cmd_mine(const WorkloadSpec& spec, const std::string& protocol_name,
             const std::string& out_path) {
  auto protocol = protocol_from_string(protocol_name);
  if (!protocol.has_value()) {
    std::cerr << "error: unknown protocol '" << protocol_name << "'\n";
    return kExitError;
  }
  std::vector<Sct> scts = generate_workload(spec);
  FinalState init = mint_state(spec);
  MinerConfig cfg{*protocol, spec.num_threads, spec};
  MineResult mined = mine_block(cfg, scts, init, 0);

  std::cout << "mined protocol=" << to_string(*protocol)
            << " scts=" << mined.block.scts.size()
            << " threads=" << cfg.threads << " aborts=" << mined.abort_count
            << " edges=" << mined.block.bg.edge_count()
            << " ms=" << mined.elapsed_ms
            << " hash=" << block_hash(mined.block) << "\n";
  if (!out_path.empty()) {
    std::string error;
    if (!write_block_file(mined.block, out_path, &error)) {
      std::cerr << "error: " << error << "\n";
      return kExitError;
    }
  }
  return kExitOk;
}

int cmd_validate(const std::string& in_path, std::uint32_t threads, bool smv,
                 const std::string& strategy_name) {
  std::string error;
  auto block = read_block_file(in_path, &error);
  if (!block.has_value()) {
    std::cerr << "error: " << error << "\n";
    return kExitError;
  }
  ValidateOptions opt;
  opt.threads = threads;
  opt.smv = smv;
  if (strategy_name == "dec") {
    opt.strategy = ValidatorStrategy::Decentralized;
  } else if (strategy_name == "forkjoin") {
    opt.strategy = ValidatorStrategy::ForkJoin;
  } else {
    std::cerr << "error: unknown strategy '" << strategy_name << "'\n";
    return kExitError;
  }
  FinalState init = block_init_state(*block);
  try {
    Verdict verdict = validate_block(*block, init, opt);
    std::cout << "verdict=" << to_string(verdict.kind)
              << " ms=" << verdict.elapsed_ms << " threads=" << opt.threads
              << " protocol=" << to_string(block->meta.protocol)
              << " strategy=" << strategy_name << " smv=" << (smv ? 1 : 0);
    if (verdict.kind == Verdict::Kind::RejectMaliciousMiner) {
      std::cout << " signalKey=" << verdict.signal_key
                << " signalSct=" << verdict.signal_sct;
    }
    std::cout << "\n";
    return verdict.accepted() ? kExitOk : kExitRejected;
  } catch (const BlockFormatError& e) {
    std::cerr << "error: malformed block: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concurrent smart-contract miner/validator over object STMs"};
  app.require_subcommand(1);

  // mine
  auto* mine = app.add_subcommand("mine", "execute a block and write it");
  WorkloadFlags mine_flags;
  mine_flags.attach(mine);
  std::string mine_protocol = "svostm";
  std::string mine_out;
  mine->add_option("--protocol", mine_protocol, "svostm|mvostm|serial");
  mine->add_option("--out", mine_out, "block output path");

  // validate
  auto* validate = app.add_subcommand("validate", "replay and check a block");
  std::string val_in;
  std::uint32_t val_threads = 8;
  bool val_smv = true;
  std::string val_strategy = "dec";
  validate->add_option("--in", val_in, "block file")->required();
  validate->add_option("--threads", val_threads, "validator threads");
  validate->add_flag("--smv,!--no-smv", val_smv,
                     "counter-instrumented validation (default on)");
  validate->add_option("--strategy", val_strategy, "dec|forkjoin");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a workload sweep to CSV");
  WorkloadFlags sweep_flags;
  sweep_flags.attach(sweep);
  std::string sweep_name = "w1";
  std::uint32_t sweep_repeats = 26;
  std::string sweep_protocols = "svostm,mvostm";
  std::string sweep_out = "sweep.csv";
  std::string sweep_strategy = "dec";
  bool sweep_smv = true;
  sweep->add_option("--sweep", sweep_name, "w1|w2|w3|custom");
  sweep->add_option("--repeats", sweep_repeats,
                    "repeats per point (first discarded)");
  sweep->add_option("--protocols", sweep_protocols, "comma-separated list");
  sweep->add_option("--strategy", sweep_strategy, "dec|forkjoin");
  sweep->add_flag("--smv,!--no-smv", sweep_smv, "validator counters");
  sweep->add_option("--out", sweep_out, "CSV output path");

  // attack
  auto* attack = app.add_subcommand("attack", "malicious-block acceptance");
  std::uint32_t attack_trials = 200;
  std::uint32_t attack_threads = 4;
  std::uint64_t attack_seed = 0;
  bool attack_seed_set = false;
  std::string attack_out;
  attack->add_option("--trials", attack_trials, "malicious blocks to try");
  attack->add_option("--threads", attack_threads, "validator threads");
  attack->add_option("--seed", attack_seed, "experiment seed")
      ->each([&attack_seed_set](std::string) { attack_seed_set = true; });
  attack->add_option("--out", attack_out, "write table to file");

  // bgstats
  auto* bgstats = app.add_subcommand("bgstats", "block-graph size model");
  std::vector<std::string> bg_files;
  bgstats->add_option("files", bg_files, "block files")->required();

  CLI11_PARSE(app, argc, argv);

  if (mine->parsed()) {
    WorkloadSpec spec;
    std::string error;
    if (!mine_flags.resolve(spec, &error)) {
      std::cerr << "error: " << error << "\n";
      return kExitError;
    }
    return cmd_mine(spec, mine_protocol, mine_out);
  }

  if (validate->parsed()) {
    return cmd_validate(val_in, val_threads, val_smv, val_strategy);
  }

  if (sweep->parsed()) {
    WorkloadSpec spec;
    std::string error;
    if (!sweep_flags.resolve(spec, &error)) {
      std::cerr << "error: " << error << "\n";
      return kExitError;
    }
    RunConfig cfg;
    auto s = sweep_from_string(sweep_name);
    if (!s.has_value()) {
      std::cerr << "error: unknown sweep '" << sweep_name << "'\n";
      return kExitError;
    }
    cfg.sweep = *s;
    cfg.repeats = sweep_repeats;
    cfg.contract = spec.contract;
    cfg.base = spec;
    cfg.smv = sweep_smv;
    cfg.strategy = sweep_strategy == "forkjoin" ? ValidatorStrategy::ForkJoin
                                                : ValidatorStrategy::Decentralized;
    cfg.out_path = sweep_out;
    cfg.protocols.clear();
    std::stringstream ss(sweep_protocols);
    std::string name;
    while (std::getline(ss, name, ',')) {
      auto p = protocol_from_string(name);
      if (!p.has_value()) {
        std::cerr << "error: unknown protocol '" << name << "'\n";
        return kExitError;
      }
      cfg.protocols.push_back(*p);
    }
    auto records = run_sweep(cfg, &error);
    if (!records.has_value()) {
      std::cerr << "error: " << error << "\n";
      return kExitRejected;
    }
    std::cout << run_records_csv(*records);
    std::cout << "# wrote " << cfg.out_path << " and " << cfg.out_path
              << ".jsonl\n";
    return kExitOk;
  }

  if (attack->parsed()) {
    AdversaryConfig cfg;
    cfg.trials = attack_trials;
    cfg.threads = attack_threads;
    cfg.seed = attack_seed_set ? attack_seed : seed_fallback();
    AdversaryResult result = run_adversary_experiment(cfg);
    std::string table = adversary_table(result);
    std::cout << table;
    if (!attack_out.empty()) {
      std::ofstream f(attack_out);
      if (!f) {
        std::cerr << "error: cannot open " << attack_out << "\n";
        return kExitError;
      }
      f << table;
    }
    return kExitOk;
  }

  if (bgstats->parsed()) {
    std::vector<BgStatsRow> rows;
    for (const std::string& path : bg_files) {
      std::string error;
      auto block = read_block_file(path, &error);
      if (!block.has_value()) {
        std::cerr << "error: " << error << "\n";
        return kExitError;
      }
      rows.push_back(bg_stats_row(path, *block));
    }
    std::cout << bg_stats_table(rows);
    return kExitOk;
  }

  return kExitError;
}
