#include "pra/config.hpp"
#include "pra/csv.hpp"
#include "pra/errors.hpp"
#include "pra/experiments.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kNumerical = 2, kIo = 3 };

std::string sidecar_path(const std::string& out, const std::string& suffix) {
  std::filesystem::path p(out);
  const std::string ext = p.has_extension() ? p.extension().string() : ".csv";
  p.replace_extension();
  return p.string() + "_" + suffix + ext;
}

void write_slot_logs(const std::vector<pra::TrialRecord>& records,
                     const std::vector<std::vector<pra::SlotRecord>>& logs, const std::string& path) {
  pra::CsvTable t;
  t.header = {"deadline_frames", "trial", "method", "t", "m", "p_w", "rate_nats"};
  for (std::size_t i = 0; i < records.size() && i < logs.size(); ++i)
    for (const auto& s : logs[i])
      t.rows.push_back({std::to_string(records[i].deadline_frames), std::to_string(records[i].trial_id),
                        records[i].method, std::to_string(s.slot), s.active ? "1" : "0",
                        pra::format_number(s.power_w), pra::format_number(s.rate_nats)});
  pra::write_csv(t, path);
}

int run(pra::ExperimentConfig cfg) {
  cfg.validate();
  using pra::ExperimentKind;
  switch (cfg.experiment) {
    case ExperimentKind::pdf_validation: {
      const auto r = pra::pdf_validation(cfg);
      pra::write_csv(r.histogram, cfg.output_path);
      std::cout << "samples " << r.samples << "\nks_true " << pra::format_number(r.ks_true)
                << "\nks_estimated " << pra::format_number(r.ks_estimated) << '\n';
      break;
    }
    case ExperimentKind::param_stats:
      pra::write_csv(pra::to_csv(pra::param_stats(cfg)), cfg.output_path);
      break;
    case ExperimentKind::kappa_sweep:
      pra::write_csv(pra::to_csv(pra::kappa_sweep(cfg)), cfg.output_path);
      break;
    case ExperimentKind::energy_compare: {
      if (cfg.slot_log) {
        std::vector<pra::TrialRecord> all;
        std::vector<std::vector<pra::SlotRecord>> all_logs;
        for (int frames : cfg.deadline_frames) {
          pra::ExperimentConfig c = cfg;
          c.sys.frames = frames;
          std::vector<std::vector<pra::SlotRecord>> logs;
          auto records = pra::run_trials(c, &logs);
          all.insert(all.end(), records.begin(), records.end());
          for (auto& l : logs) all_logs.push_back(std::move(l));
        }
        write_slot_logs(all, all_logs, sidecar_path(cfg.output_path, "slots"));
      }
      const auto r = pra::energy_compare(cfg);
      pra::write_csv(pra::to_csv(r.rows), cfg.output_path);
      pra::write_csv(pra::to_csv(r.records), sidecar_path(cfg.output_path, "trials"));
      for (const auto& row : r.rows)
        std::cout << row.deadline_frames << ' ' << row.method << ' '
                  << pra::format_number(row.mean_energy_j) << ' '
                  << pra::format_number(row.completion_rate) << '\n';
      break;
    }
    case ExperimentKind::table1: {
      const auto r = pra::table1_experiment(cfg);
      pra::write_csv(pra::to_csv(r.summary), cfg.output_path);
      pra::write_csv(pra::to_csv(r.trials), sidecar_path(cfg.output_path, "trials"));
      for (const auto& s : r.summary)
        std::cout << "T_s=" << s.slots_per_frame
                  << " max_nu_dev=" << pra::format_number(s.max_nu_deviation)
                  << " max_gth_dev=" << pra::format_number(s.max_gth_deviation) << '\n';
      break;
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predictive resource allocation experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> out;
  bool dump = false;
  app.add_option("--config", config_path, "flat YAML key: value config file");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--trials", trials, "number of Monte Carlo trials");
  app.add_option("--out", out, "output CSV path");
  app.add_flag("--dump-config", dump, "print the effective config and exit");

  const std::pair<const char*, pra::ExperimentKind> commands[] = {
      {"pdf", pra::ExperimentKind::pdf_validation},
      {"params", pra::ExperimentKind::param_stats},
      {"sweep", pra::ExperimentKind::kappa_sweep},
      {"compare", pra::ExperimentKind::energy_compare},
      {"table1", pra::ExperimentKind::table1},
  };
  for (const auto& [name, kind] : commands) app.add_subcommand(name, std::string(pra::to_string(kind)));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    pra::ExperimentConfig cfg = config_path.empty() ? pra::ExperimentConfig{} : pra::load_config(config_path);
    for (const auto& [name, kind] : commands)
      if (app.got_subcommand(name)) cfg.experiment = kind;
    if (seed) {
      cfg.seed = *seed;
      cfg.sys.rng_seed = *seed;
    }
    if (trials) cfg.n_trials = *trials;
    if (out) cfg.output_path = *out;
    if (dump) {
      cfg.validate();
      std::cout << pra::dump_config(cfg);
      return kOk;
    }
    return run(cfg);
  } catch (const pra::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const pra::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const pra::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
}
