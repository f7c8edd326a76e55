// Command-line front end for the mind-wandering EEG pipeline.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "mwd/pipeline.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
  std::optional<std::string> manifest;
  std::optional<std::string> features;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("-c,--config", f.config, "JSON config file");
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  sub->add_option("-o,--out", f.out, "output directory");
  sub->add_option("--manifest", f.manifest, "dataset manifest (default: synthetic data)");
  sub->add_option("--features", f.features, "precomputed feature matrix CSV");
}

mwd::PipelineConfig resolve(const Flags& f) {
  mwd::PipelineConfig c = f.config.empty() ? mwd::PipelineConfig{} : mwd::load_config(f.config);
  if (f.seed) c.seed = *f.seed;
  if (f.threads) c.threads = *f.threads;
  if (f.out) c.out = *f.out;
  if (f.manifest) c.manifest = *f.manifest;
  if (f.features) c.features_file = *f.features;
  c.threads = mwd::resolve_threads(c.threads);
  return c;
}

void summarize(const std::string& cmd, const nlohmann::json& rep) {
  if (cmd == "synth") {
    const auto& d = rep["dataset"];
    std::cout << "wrote " << d["manifest"].get<std::string>() << ": " << d["n_subjects"] << " subjects, "
              << d["n_epochs"] << " epochs (" << d["n_mw"] << " MW)\n";
  } else if (cmd == "extract") {
    const auto& f = rep["features"];
    std::cout << "wrote " << f["path"].get<std::string>() << ": " << f["n_rows"] << " rows x " << f["n_cols"]
              << " features, " << f["undefined_substituted"] << " undefined values substituted\n";
  } else if (cmd == "evaluate") {
    const auto& m = rep["metrics"];
    std::cout << "LOSO AUC " << m["auc"] << "  weighted F1 " << m["weighted_f1"] << "  Kappa " << m["kappa"]
              << "  training " << m["total_fit_seconds"] << " s\n";
  } else if (cmd == "train") {
    std::cout << "trained on " << rep["n_rows"] << " rows x " << rep["n_features"] << " features in "
              << rep["timing"]["fit_s"] << " s\n";
  } else if (cmd == "select-channels") {
    for (const auto& e : rep["ranking"]["entries"]) std::cout << e["channel"].get<std::string>() << ' ' << e["score"] << '\n';
    for (const auto& p : rep["curve"]) std::cout << "K=" << p["k"] << " AUC " << p["metrics"]["auc"] << '\n';
  } else if (cmd == "select-features") {
    for (const auto& r : rep["comparison"])
      std::cout << r["selection"]["method"].get<std::string>() << " k=" << r["selection"]["k"] << " time "
                << r["selection"]["seconds"] << " s  AUC " << r["metrics"]["auc"] << '\n';
  } else if (cmd == "bench") {
    for (const auto& r : rep["by_channels"])
      std::cout << r["channels"] << " channels: median " << r["median_s"] << " s over " << r["runs"] << " runs\n";
    for (const auto& r : rep["by_trees"])
      std::cout << r["trees"] << " trees: median " << r["median_s"] << " s over " << r["runs"] << " runs\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mind-wandering detection from EEG: entropy features, random forests, channel and feature selection"};
  app.require_subcommand(1);
  using Cmd = nlohmann::json (*)(const mwd::PipelineConfig&);
  const std::map<std::string, std::pair<Cmd, const char*>> commands = {
      {"synth", {mwd::cmd_synth, "write a synthetic dataset"}},
      {"extract", {mwd::cmd_extract, "extract the feature matrix"}},
      {"train", {mwd::cmd_train, "fit the classifier on all epochs"}},
      {"evaluate", {mwd::cmd_evaluate, "leave-one-subject-out evaluation"}},
      {"select-channels", {mwd::cmd_select_channels, "rank channels and build the channel curve"}},
      {"select-features", {mwd::cmd_select_features, "compare RFE, IFE and CIFE"}},
      {"bench", {mwd::cmd_bench, "time forest training against channel and tree counts"}},
  };
  Flags flags;
  for (const auto& [name, cmd] : commands) add_common(app.add_subcommand(name, cmd.second), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const auto rep = commands.at(name).first(resolve(flags));
    summarize(name, rep);
    return 0;
  } catch (const mwd::Error& e) {
    std::cerr << "error [" << mwd::to_string(e.kind()) << "]: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error [format]: " << e.what() << '\n';
    return static_cast<int>(mwd::ErrorKind::Format);
  } catch (const std::exception& e) {
    std::cerr << "error [internal]: " << e.what() << '\n';
    return static_cast<int>(mwd::ErrorKind::Internal);
  }
}
