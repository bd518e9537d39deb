#include "objsc/harness.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace objsc {

const char* to_string(Sweep s) {
  switch (s) {
    case Sweep::W1: return "w1";
    case Sweep::W2: return "w2";
    case Sweep::W3: return "w3";
    case Sweep::Custom: return "custom";
  }
  return "?";
}

std::optional<Sweep> sweep_from_string(const std::string& s) {
  if (s == "w1") return Sweep::W1;
  if (s == "w2") return Sweep::W2;
  if (s == "w3") return Sweep::W3;
  if (s == "custom") return Sweep::Custom;
  return std::nullopt;
}

namespace {

struct SweepPoint {
  std::uint32_t value;  // the varied quantity
  WorkloadSpec spec;
};

std::vector<SweepPoint> sweep_points(const RunConfig& cfg) {
  std::vector<SweepPoint> points;
  WorkloadSpec base = cfg.base;
  base.contract = cfg.contract;
  switch (cfg.sweep) {
    case Sweep::W1:
      for (std::uint32_t n = 50; n <= 300; n += 50) {
        WorkloadSpec s = base;
        s.num_scts = n;
        s.num_threads = 50;
        points.push_back({n, s});
      }
      break;
    case Sweep::W2:
      for (std::uint32_t t = 10; t <= 60; t += 10) {
        WorkloadSpec s = base;
        s.num_scts = 100;
        s.num_threads = t;
        points.push_back({t, s});
      }
      break;
    case Sweep::W3:
      for (std::uint32_t shared = 100; shared <= 600; shared += 100) {
        WorkloadSpec s = base;
        s.num_scts = 100;
        s.num_threads = 50;
        s.shared_items = shared;
        points.push_back({shared, s});
      }
      break;
    case Sweep::Custom:
      points.push_back({base.num_scts, base});
      break;
  }
  return points;
}

}  // namespace

std::optional<std::vector<RunRecord>> run_sweep(const RunConfig& cfg,
                                                std::string* error) {
  std::vector<RunRecord> records;
  std::vector<SweepPoint> points = sweep_points(cfg);
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    for (Protocol protocol : cfg.protocols) {
      const SweepPoint& point = points[pi];
      RunRecord rec;
      rec.sweep = cfg.sweep;
      rec.point = point.value;
      rec.contract = cfg.contract;
      rec.protocol = protocol;
      rec.scts = point.spec.num_scts;
      rec.threads = point.spec.num_threads;
      rec.shared_items = point.spec.shared_items;
      rec.hash_buckets = point.spec.hash_buckets;

      for (std::uint32_t r = 0; r < cfg.repeats; ++r) {
        WorkloadSpec spec = point.spec;
        spec.seed = cfg.base.seed + 104729ull * pi + 7919ull * r;
        std::vector<Sct> scts = generate_workload(spec);
        FinalState init = mint_state(spec);

        MinerConfig mcfg{protocol, spec.num_threads, spec};
        MineResult mined = mine_block(mcfg, scts, init, 0);
        MineResult serial = mine_serial(spec, scts, init, 0);

        ValidateOptions vopt;
        vopt.threads = spec.num_threads;
        vopt.smv = cfg.smv;
        vopt.strategy = cfg.strategy;
        Verdict concurrent = validate_block(mined.block, init, vopt);
        Verdict serial_verdict = validate_serial(mined.block, init);

        if (!concurrent.accepted() || !serial_verdict.accepted()) {
          if (error != nullptr) {
            *error = "honest block rejected (" +
                     std::string(to_string(concurrent.kind)) + "/" +
                     std::string(to_string(serial_verdict.kind)) +
                     ") at sweep point " + std::to_string(point.value);
          }
          return std::nullopt;
        }

        bool warmup = cfg.repeats > 1 && r == 0;
        if (warmup) continue;
        rec.samples += 1;
        rec.miner_ms += mined.elapsed_ms;
        rec.serial_miner_ms += serial.elapsed_ms;
        rec.validator_ms += concurrent.elapsed_ms;
        rec.serial_validator_ms += serial_verdict.elapsed_ms;
        rec.aborts += mined.abort_count;
        BgSizeStats stats = bg_size_stats(mined.block.scts.size(),
                                          mined.block.bg.edge_count());
        rec.bg_edges += static_cast<double>(mined.block.bg.edge_count());
        rec.bg_bytes += static_cast<double>(stats.graph_bytes);
        rec.bg_pct += stats.percent;
        rec.runs += 1;
        rec.accepts += 1;
      }

      if (rec.samples > 0) {
        double n = rec.samples;
        rec.miner_ms /= n;
        rec.serial_miner_ms /= n;
        rec.validator_ms /= n;
        rec.serial_validator_ms /= n;
        rec.aborts /= n;
        rec.bg_edges /= n;
        rec.bg_bytes /= n;
        rec.bg_pct /= n;
        rec.miner_speedup =
            rec.miner_ms > 0 ? rec.serial_miner_ms / rec.miner_ms : 0.0;
        rec.validator_speedup =
            rec.validator_ms > 0 ? rec.serial_validator_ms / rec.validator_ms
                                 : 0.0;
      }
      records.push_back(rec);
    }
  }
  if (!cfg.out_path.empty()) {
    if (!write_run_records(records, cfg.out_path, error)) return std::nullopt;
  }
  return records;
}

std::string run_records_csv(const std::vector<RunRecord>& records) {
  std::ostringstream os;
  os << "sweep,point,contract,protocol,role,scts,threads,shared,buckets,"
        "samples,serial_ms,concurrent_ms,speedup,aborts,bg_edges,bg_bytes,"
        "bg_pct,accept_rate\n";
  os << std::fixed << std::setprecision(4);
  for (const RunRecord& r : records) {
    double accept_rate = r.runs == 0 ? 0.0 : double(r.accepts) / double(r.runs);
    for (int role = 0; role < 2; ++role) {
      os << to_string(r.sweep) << ',' << r.point << ','
         << to_string(r.contract) << ',' << to_string(r.protocol) << ','
         << (role == 0 ? "miner" : "validator") << ',' << r.scts << ','
         << r.threads << ',' << r.shared_items << ',' << r.hash_buckets << ','
         << r.samples << ','
         << (role == 0 ? r.serial_miner_ms : r.serial_validator_ms) << ','
         << (role == 0 ? r.miner_ms : r.validator_ms) << ','
         << (role == 0 ? r.miner_speedup : r.validator_speedup) << ','
         << r.aborts << ',' << r.bg_edges << ',' << r.bg_bytes << ','
         << r.bg_pct << ',' << accept_rate << '\n';
    }
  }
  return os.str();
}

bool write_run_records(const std::vector<RunRecord>& records,
                       const std::string& csv_path, std::string* error) {
  std::ofstream csv(csv_path);
  if (!csv) {
    if (error != nullptr) *error = "cannot open " + csv_path;
    return false;
  }
  csv << run_records_csv(records);
  if (!csv) {
    if (error != nullptr) *error = "write failed for " + csv_path;
    return false;
  }

  std::ofstream jsonl(csv_path + ".jsonl");
  if (!jsonl) {
    if (error != nullptr) *error = "cannot open " + csv_path + ".jsonl";
    return false;
  }
  for (const RunRecord& r : records) {
    nlohmann::json j{{"sweep", to_string(r.sweep)},
                     {"point", r.point},
                     {"contract", to_string(r.contract)},
                     {"protocol", to_string(r.protocol)},
                     {"scts", r.scts},
                     {"threads", r.threads},
                     {"shared", r.shared_items},
                     {"buckets", r.hash_buckets},
                     {"samples", r.samples},
                     {"miner_ms", r.miner_ms},
                     {"serial_miner_ms", r.serial_miner_ms},
                     {"validator_ms", r.validator_ms},
                     {"serial_validator_ms", r.serial_validator_ms},
                     {"miner_speedup", r.miner_speedup},
                     {"validator_speedup", r.validator_speedup},
                     {"aborts", r.aborts},
                     {"bg_edges", r.bg_edges},
                     {"bg_bytes", r.bg_bytes},
                     {"bg_pct", r.bg_pct},
                     {"accepts", r.accepts},
                     {"runs", r.runs}};
    jsonl << j.dump() << '\n';
  }
  return true;
}

AdversaryResult run_adversary_experiment(const AdversaryConfig& cfg) {
  AdversaryResult result;
  result.trials = cfg.trials;
  for (std::uint32_t t = 0; t < cfg.trials; ++t) {
    Block block;
    FinalState init;
    if (t % 2 == 0) {
      DoubleSpendOptions opt;
      opt.prev_hash = cfg.seed + t;
      opt.filler_accounts = cfg.filler_items;
      opt.hash_buckets = cfg.hash_buckets;
      block = make_double_spend_block(opt);
    } else {
      DoubleVoteOptions opt;
      opt.prev_hash = cfg.seed + t;
      opt.filler_items = cfg.filler_items;
      opt.hash_buckets = cfg.hash_buckets;
      block = make_double_vote_block(opt);
    }
    init = block_init_state(block);

    ValidateOptions vopt;
    vopt.threads = cfg.threads;
    vopt.strategy = ValidatorStrategy::Decentralized;
    vopt.jitter_seed = cfg.seed * 1000003ull + t;
    vopt.jitter_max_spin = cfg.jitter_max_spin;

    vopt.smv = false;
    Verdict nonsmv = validate_block(block, init, vopt);
    if (nonsmv.accepted()) result.nonsmv_accepts += 1;

    vopt.smv = true;
    vopt.jitter_seed += 0x9e3779b9ull;
    Verdict smv = validate_block(block, init, vopt);
    switch (smv.kind) {
      case Verdict::Kind::Accept:
        result.smv_accepts += 1;
        break;
      case Verdict::Kind::RejectMaliciousMiner:
        result.smv_signal_rejects += 1;
        break;
      case Verdict::Kind::RejectStateMismatch:
        result.smv_state_rejects += 1;
        break;
    }
    if (!smv.counters_zero) result.counters_always_zero = false;
  }
  return result;
}

std::string adversary_table(const AdversaryResult& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1);
  os << "mode,trials,accepted,accepted_pct\n";
  if (r.trials == 0) return os.str();
  os << "nonsmv," << r.trials << ',' << r.nonsmv_accepts << ','
     << r.nonsmv_accept_pct() << '\n';
  os << "smv," << r.trials << ',' << r.smv_accepts << ','
     << r.smv_accept_pct() << '\n';
  os << "# smv rejects: " << r.smv_signal_rejects << " by counter signal, "
     << r.smv_state_rejects << " by state mismatch\n";
  return os.str();
}

BgStatsRow bg_stats_row(const std::string& label, const Block& block) {
  BgStatsRow row;
  row.label = label;
  row.protocol = block.meta.protocol;
  row.scts = block.scts.size();
  row.edges = block.bg.edge_count();
  row.stats = bg_size_stats(row.scts, row.edges);
  return row;
}

std::string bg_stats_table(const std::vector<BgStatsRow>& rows) {
  std::ostringstream os;
  os << "label,protocol,scts,edges,block_bytes,bg_bytes,bg_pct\n";
  os << std::fixed << std::setprecision(1);
  for (const BgStatsRow& r : rows) {
    os << r.label << ',' << to_string(r.protocol) << ',' << r.scts << ','
       << r.edges << ',' << r.stats.block_bytes << ',' << r.stats.graph_bytes
       << ',' << r.stats.percent << '\n';
  }
  return os.str();
}

}  // namespace objsc
