#include "mwd/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "mwd/io.hpp"
#include "mwd/metrics.hpp"

namespace mwd {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

// Stream ids for seeds derived from the master seed.
constexpr std::uint64_t kModelStream = 1;
constexpr std::uint64_t kSearchStream = 2;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& ctx) {
  if (!j.is_object()) throw invalid_argument("config: '" + ctx + "' must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw invalid_argument("config: unknown key '" + ctx + "." + k + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& ctx) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& ex) {
    throw invalid_argument("config: bad value for '" + ctx + "." + key + "': " + ex.what());
  }
}

std::optional<std::vector<std::string>> read_channels(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  std::vector<std::string> v;
  read(j, key, v, ctx);
  if (v.empty()) throw invalid_argument("config: '" + ctx + "." + key + "' must not be empty");
  return v;
}

SelectMethod select_method_from_string(const std::string& s) {
  if (s == "RFE" || s == "rfe") return SelectMethod::Rfe;
  if (s == "IFE" || s == "ife") return SelectMethod::Ife;
  if (s == "CIFE" || s == "cife") return SelectMethod::Cife;
  throw invalid_argument("unknown feature-selection method '" + s + "'");
}

json max_features_json(const ForestParams& p) {
  switch (p.max_features) {
    case MaxFeatures::Sqrt: return "sqrt";
    case MaxFeatures::All: return "all";
    case MaxFeatures::Fraction: return p.max_features_fraction;
  }
  return nullptr;
}

json spec_to_json(const ClassifierSpec& s) {
  return {{"kind", to_string(s.kind)},
          {"n_trees", s.forest.n_trees},
          {"max_depth", s.forest.max_depth},
          {"max_features", max_features_json(s.forest)},
          {"min_samples_leaf", s.forest.min_samples_leaf},
          {"n_neighbors", s.knn_k}};
}

json params_to_json(const ParamSet& p) {
  json j = json::object();
  for (const auto& [k, v] : p) {
    if (const auto* i = std::get_if<std::int64_t>(&v))
      j[k] = *i;
    else if (const auto* d = std::get_if<double>(&v))
      j[k] = *d;
    else
      j[k] = std::get<std::string>(v);
  }
  return j;
}

json base_report(const PipelineConfig& c, const char* command) {
  return {{"schema", kReportSchema},
          {"version", kVersion},
          {"command", command},
          {"config", config_to_json(c)},
          {"seed", c.seed},
          {"threads", c.threads}};
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw io_error("cannot create '" + p.string() + "': " + ec.message());
}

std::ofstream open_csv(const fs::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open '" + p.string() + "' for writing");
  return out;
}

// Validates config channels against the dataset before any heavy work.
void check_channels(const std::optional<std::vector<std::string>>& wanted, const std::vector<std::string>& have) {
  if (!wanted) return;
  for (const auto& ch : *wanted)
    if (std::find(have.begin(), have.end(), ch) == have.end())
      throw invalid_argument("config: unknown channel '" + ch + "'");
}

}  // namespace

namespace {

PipelineConfig parse_config(const json& j) {
  PipelineConfig c;
  check_keys(j, {"dataset", "features", "classifier", "search", "selection", "bench", "seed", "threads", "out"}, "");
  read(j, "seed", c.seed, "");
  read(j, "threads", c.threads, "");
  if (j.contains("out")) c.out = j["out"].get<std::string>();

  if (j.contains("dataset")) {
    const auto& d = j["dataset"];
    check_keys(d, {"manifest", "features_file", "synth"}, "dataset");
    if (d.contains("manifest") && !d["manifest"].is_null()) c.manifest = d["manifest"].get<std::string>();
    if (d.contains("features_file") && !d["features_file"].is_null())
      c.features_file = d["features_file"].get<std::string>();
    if (d.contains("synth")) {
      const auto& s = d["synth"];
      check_keys(s, {"n_subjects", "epochs_per_subject", "n_channels", "informative_channels", "separation", "fs",
                     "window_s"},
                 "dataset.synth");
      read(s, "n_subjects", c.synth.n_subjects, "dataset.synth");
      read(s, "epochs_per_subject", c.synth.epochs_per_subject, "dataset.synth");
      read(s, "n_channels", c.synth.n_channels, "dataset.synth");
      read(s, "separation", c.synth.separation, "dataset.synth");
      read(s, "fs", c.synth.fs, "dataset.synth");
      read(s, "window_s", c.synth.window_s, "dataset.synth");
      if (s.contains("informative_channels")) {
        std::vector<int> inf;
        read(s, "informative_channels", inf, "dataset.synth");
        c.synth.informative_channels = std::set<int>(inf.begin(), inf.end());
      }
    }
  }
  if (j.contains("features")) {
    const auto& f = j["features"];
    check_keys(f, {"include_mse", "channels", "sampen_m", "sampen_r_factor", "perm_m", "perm_d", "disp_m", "disp_c",
                   "disp_d"},
               "features");
    read(f, "include_mse", c.features.include_mse, "features");
    read(f, "sampen_m", c.features.sampen_m, "features");
    read(f, "sampen_r_factor", c.features.sampen_r_factor, "features");
    read(f, "perm_m", c.features.perm_m, "features");
    read(f, "perm_d", c.features.perm_d, "features");
    read(f, "disp_m", c.features.disp_m, "features");
    read(f, "disp_c", c.features.disp_c, "features");
    read(f, "disp_d", c.features.disp_d, "features");
    c.channels = read_channels(f, "channels", "features");
  }
  if (j.contains("classifier")) {
    const auto& k = j["classifier"];
    check_keys(k, {"kind", "n_trees", "max_depth", "max_features", "min_samples_leaf", "n_neighbors"}, "classifier");
    if (k.contains("kind")) c.classifier.kind = classifier_kind_from_string(k["kind"].get<std::string>());
    ParamSet ps;
    for (const char* key : {"n_trees", "max_depth", "min_samples_leaf", "n_neighbors"})
      if (k.contains(key)) ps[key] = k[key].get<std::int64_t>();
    if (k.contains("max_features")) {
      if (k["max_features"].is_string())
        ps["max_features"] = k["max_features"].get<std::string>();
      else
        ps["max_features"] = k["max_features"].get<double>();
    }
    c.classifier = apply_params(c.classifier, ps);
  }
  if (j.contains("search")) {
    const auto& s = j["search"];
    check_keys(s, {"enabled", "n_candidates", "n_folds"}, "search");
    read(s, "enabled", c.search.enabled, "search");
    read(s, "n_candidates", c.search.n_candidates, "search");
    read(s, "n_folds", c.search.n_folds, "search");
  }
  if (j.contains("selection")) {
    const auto& s = j["selection"];
    check_keys(s, {"channel_method", "alpha", "k_max", "methods", "k", "rho_thres", "rfe_step", "channels"},
               "selection");
    if (s.contains("channel_method"))
      c.selection.channel_method = rank_method_from_string(s["channel_method"].get<std::string>());
    read(s, "alpha", c.selection.alpha, "selection");
    read(s, "k_max", c.selection.k_max, "selection");
    read(s, "k", c.selection.ks, "selection");
    read(s, "rho_thres", c.selection.rho_thres, "selection");
    read(s, "rfe_step", c.selection.rfe_step, "selection");
    if (s.contains("methods")) {
      c.selection.methods.clear();
      for (const auto& m : s["methods"]) c.selection.methods.push_back(select_method_from_string(m.get<std::string>()));
    }
    c.selection.channels = read_channels(s, "channels", "selection");
  }
  if (j.contains("bench")) {
    const auto& b = j["bench"];
    check_keys(b, {"repeats", "channel_counts", "tree_counts"}, "bench");
    read(b, "repeats", c.bench.repeats, "bench");
    read(b, "channel_counts", c.bench.channel_counts, "bench");
    read(b, "tree_counts", c.bench.tree_counts, "bench");
  }
  if (c.search.n_candidates < 1 || c.search.n_folds < 2) throw invalid_argument("config: invalid search settings");
  if (c.bench.repeats < 1) throw invalid_argument("config: bench.repeats must be >= 1");
  return c;
}

}  // namespace

PipelineConfig config_from_json(const json& j) {
  try {
    return parse_config(j);
  } catch (const json::exception& ex) {
    throw invalid_argument(std::string("config: ") + ex.what());
  }
}

json config_to_json(const PipelineConfig& c) {
  json j;
  json d;
  d["manifest"] = c.manifest ? json(c.manifest->string()) : json(nullptr);
  d["features_file"] = c.features_file ? json(c.features_file->string()) : json(nullptr);
  d["synth"] = {{"n_subjects", c.synth.n_subjects},
                {"epochs_per_subject", c.synth.epochs_per_subject},
                {"n_channels", c.synth.n_channels},
                {"informative_channels", std::vector<int>(c.synth.informative_channels.begin(),
                                                          c.synth.informative_channels.end())},
                {"separation", c.synth.separation},
                {"fs", c.synth.fs},
                {"window_s", c.synth.window_s}};
  j["dataset"] = d;
  j["features"] = {{"include_mse", c.features.include_mse},
                   {"channels", c.channels ? json(*c.channels) : json(nullptr)},
                   {"sampen_m", c.features.sampen_m},
                   {"sampen_r_factor", c.features.sampen_r_factor},
                   {"perm_m", c.features.perm_m},
                   {"perm_d", c.features.perm_d},
                   {"disp_m", c.features.disp_m},
                   {"disp_c", c.features.disp_c},
                   {"disp_d", c.features.disp_d}};
  j["classifier"] = spec_to_json(c.classifier);
  j["search"] = {{"enabled", c.search.enabled}, {"n_candidates", c.search.n_candidates}, {"n_folds", c.search.n_folds}};
  std::vector<std::string> methods;
  for (auto m : c.selection.methods) methods.push_back(to_string(m));
  j["selection"] = {{"channel_method", to_string(c.selection.channel_method)},
                    {"alpha", c.selection.alpha},
                    {"k_max", c.selection.k_max},
                    {"methods", methods},
                    {"k", c.selection.ks},
                    {"rho_thres", c.selection.rho_thres},
                    {"rfe_step", c.selection.rfe_step},
                    {"channels", c.selection.channels ? json(*c.selection.channels) : json(nullptr)}};
  j["bench"] = {{"repeats", c.bench.repeats},
                {"channel_counts", c.bench.channel_counts},
                {"tree_counts", c.bench.tree_counts}};
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["out"] = c.out.string();
  return j;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw format_error("config '" + path.string() + "': " + ex.what());
  }
  return config_from_json(j);
}

Timing time_median(const std::function<void()>& fn, int repeats) {
  if (repeats < 1) throw invalid_argument("time_median: repeats must be >= 1");
  fn();  // warm-up
  std::vector<double> t;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = Clock::now();
    fn();
    t.push_back(seconds_since(t0));
  }
  std::sort(t.begin(), t.end());
  const std::size_t n = t.size();
  Timing out;
  out.median_s = n % 2 ? t[n / 2] : 0.5 * (t[n / 2 - 1] + t[n / 2]);
  out.min_s = t.front();
  out.max_s = t.back();
  out.runs = repeats;
  return out;
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  out.close();
  if (!out) throw io_error("failed writing '" + path.string() + "'");
}

SubjectDataset obtain_dataset(const PipelineConfig& c) {
  if (c.manifest) return load_dataset(*c.manifest);
  SynthSpec s = c.synth;
  s.seed = c.seed;
  return synth_dataset(s, c.threads);
}

FeatureMatrix obtain_features(const PipelineConfig& c, json* timing) {
  if (c.features_file) {
    FeatureMatrix m = read_feature_matrix(*c.features_file);
    if (c.channels) {
      check_channels(c.channels, m.channels());
      m = m.select_columns(m.columns_for_channels(*c.channels));
    }
    return m;
  }
  const SubjectDataset ds = obtain_dataset(c);
  check_channels(c.channels, ds.channels);
  const auto t0 = Clock::now();
  ExtractionResult r = extract_matrix(ds, c.channels, c.features, c.threads);
  if (timing) {
    (*timing)["extraction_s"] = seconds_since(t0);
    (*timing)["undefined_substituted"] = r.undefined_count();
  }
  return std::move(r.matrix);
}

json eval_to_json(const EvalResult& r) {
  json folds = json::array();
  for (const auto& f : r.folds)
    folds.push_back({{"test_subject", f.test_subject},
                     {"n_train", f.n_train},
                     {"n_test", f.n_test},
                     {"auc", f.auc ? json(*f.auc) : json(nullptr)},
                     {"fit_seconds", f.fit_seconds}});
  return {{"weighted_f1", r.weighted_f1},
          {"kappa", r.kappa},
          {"auc", r.auc},
          {"folds", folds},
          {"total_fit_seconds", r.total_fit_seconds()}};
}

json selection_to_json(const FeatureSelection& s) {
  json j = {{"method", to_string(s.method)},
            {"k", s.k},
            {"selected", s.selected},
            {"importance", s.importance},
            {"seconds", s.seconds},
            {"n_fits", s.n_fits}};
  if (s.rho_thres) {
    j["rho_thres"] = *s.rho_thres;
    j["n_clusters"] = s.n_clusters;
    j["cluster_seconds"] = s.cluster_seconds;
  }
  if (s.step) j["step"] = *s.step;
  return j;
}

json cmd_synth(const PipelineConfig& c) {
  SynthSpec s = c.synth;
  s.seed = c.seed;
  const SubjectDataset ds = synth_dataset(s, c.threads);
  const fs::path dir = c.out / "dataset";
  save_dataset(ds, dir);
  json rep = base_report(c, "synth");
  std::size_t mw = 0;
  for (const auto& sub : ds.subjects)
    for (const auto& e : sub.epochs) mw += e.label == Label::MW ? 1 : 0;
  rep["dataset"] = {{"manifest", (dir / "manifest.json").string()},
                    {"n_subjects", ds.subjects.size()},
                    {"n_epochs", ds.n_epochs()},
                    {"n_mw", mw},
                    {"channels", ds.channels},
                    {"provenance", ds.provenance}};
  write_json(rep, c.out / "report_synth.json");
  return rep;
}

json cmd_extract(const PipelineConfig& c) {
  ensure_dir(c.out);
  const SubjectDataset ds = obtain_dataset(c);
  check_channels(c.channels, ds.channels);
  const auto t0 = Clock::now();
  const ExtractionResult r = extract_matrix(ds, c.channels, c.features, c.threads);
  const double secs = seconds_since(t0);
  write_feature_matrix(r.matrix, c.out / "features.csv");

  json subs = json::array();
  for (const auto& s : r.substitutions) subs.push_back({{"feature", s.feature}, {"n_rows", s.n_rows}, {"value", s.value}});
  json prov = {{"features", config_to_json(c)["features"]},
               {"fs", ds.fs},
               {"window_s", ds.window_s},
               {"dataset_provenance", ds.provenance},
               {"wavelet", "db4, 7 levels, periodized, zero-padded to a multiple of 128"},
               {"wavelet_bands", {"cA7", "cD7", "cD6", "cD5", "cD4"}},
               {"ram_pairing", "cA7/cD7, cD7/cD6, cD6/cD5, cD5/cD4, cD4/cD5"},
               {"welch", {{"segment_s", c.features.welch.segment_s}, {"overlap", c.features.welch.overlap}, {"window", "hann"}}},
               {"substitution_policy", "column maximum of defined values, 0 if none"},
               {"substitutions", subs}};
  write_json(prov, c.out / "features_provenance.json");

  json rep = base_report(c, "extract");
  rep["features"] = {{"path", (c.out / "features.csv").string()},
                     {"n_rows", r.matrix.n_rows},
                     {"n_cols", r.matrix.n_cols()},
                     {"channels", r.matrix.channels()},
                     {"undefined_substituted", r.undefined_count()},
                     {"columns_with_substitution", r.substitutions.size()}};
  rep["timing"] = {{"extraction_s", secs}};
  write_json(rep, c.out / "report_extract.json");
  return rep;
}

json cmd_train(const PipelineConfig& c) {
  ensure_dir(c.out);
  json timing = json::object();
  const FeatureMatrix X = obtain_features(c, &timing);
  auto model = make_classifier(c.classifier, mix_seed(c.seed, kModelStream), c.threads);
  const auto t0 = Clock::now();
  model->fit(X, X.labels);
  timing["fit_s"] = seconds_since(t0);
  const auto p = model->predict_proba(X);
  json rep = base_report(c, "train");
  rep["n_rows"] = X.n_rows;
  rep["n_features"] = X.n_cols();
  rep["training_auc"] = roc_auc(X.labels, p);
  if (const auto imp = model->importances()) {
    std::vector<std::size_t> order(imp->size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return (*imp)[a] > (*imp)[b]; });
    json top = json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(20, order.size()); ++i)
      top.push_back({{"feature", X.names[order[i]]}, {"importance", (*imp)[order[i]]}});
    rep["top_importances"] = top;
  }
  rep["timing"] = timing;
  write_json(rep, c.out / "report_train.json");
  return rep;
}

json cmd_evaluate(const PipelineConfig& c) {
  ensure_dir(c.out);
  json timing = json::object();
  const FeatureMatrix X = obtain_features(c, &timing);
  json rep = base_report(c, "evaluate");
  ClassifierSpec spec = c.classifier;
  if (c.search.enabled) {
    const auto t0 = Clock::now();
    const SearchResult sr = random_search(default_search_space(spec.kind), spec, X, c.search.n_candidates,
                                          c.search.n_folds, mix_seed(c.seed, kSearchStream), c.threads);
    timing["search_s"] = seconds_since(t0);
    spec = apply_params(spec, sr.best);
    json degenerate = json::array();
    for (std::size_t i = 0; i < sr.candidates.size(); ++i)
      for (std::size_t f : sr.candidates[i].degenerate_folds) degenerate.push_back({{"candidate", i}, {"fold", f}});
    rep["search"] = {{"best", params_to_json(sr.best)},
                     {"best_index", sr.best_index},
                     {"best_mean_auc", sr.best_auc},
                     {"fold_subjects", sr.fold_subjects},
                     {"degenerate_folds", degenerate}};
  }
  const EvalResult r = loso_cv(X, spec, mix_seed(c.seed, kModelStream), c.threads);
  rep["classifier"] = spec_to_json(spec);
  rep["metrics"] = eval_to_json(r);
  timing["training_s"] = r.total_fit_seconds();
  rep["timing"] = timing;
  rep["n_rows"] = X.n_rows;
  rep["n_features"] = X.n_cols();
  write_json(rep, c.out / "report_evaluate.json");
  return rep;
}

json cmd_select_channels(const PipelineConfig& c) {
  ensure_dir(c.out);
  json timing = json::object();
  const FeatureMatrix X = obtain_features(c, &timing);
  const std::uint64_t seed = mix_seed(c.seed, kModelStream);
  const ChannelRanking rank = rank_channels(X, c.selection.channel_method, c.classifier, seed, c.threads, c.selection.alpha);
  const std::size_t k_max = c.selection.k_max ? c.selection.k_max : rank.entries.size();
  const auto curve = channel_curve(X, rank, k_max, c.classifier, seed, c.threads);

  auto out = open_csv(c.out / "channel_curve.csv");
  out << "k,channels,auc,weighted_f1,kappa,training_s\n";
  json pts = json::array();
  for (const auto& p : curve) {
    std::string chs;
    for (const auto& ch : p.channels) chs += (chs.empty() ? "" : ";") + ch;
    out << p.k << ',' << chs << ',' << format_number(p.eval.auc) << ',' << format_number(p.eval.weighted_f1) << ','
        << format_number(p.eval.kappa) << ',' << format_number(p.eval.total_fit_seconds()) << '\n';
    pts.push_back({{"k", p.k}, {"channels", p.channels}, {"metrics", eval_to_json(p.eval)}});
  }
  out.close();

  json ranking = json::array();
  for (const auto& e : rank.entries) ranking.push_back({{"channel", e.channel}, {"score", e.score}});
  json rep = base_report(c, "select-channels");
  rep["ranking"] = {{"method", to_string(rank.method)}, {"entries", ranking}, {"seconds", rank.seconds}};
  rep["curve"] = pts;
  rep["timing"] = timing;
  write_json(rep, c.out / "report_select_channels.json");
  return rep;
}

json cmd_select_features(const PipelineConfig& c) {
  ensure_dir(c.out);
  json timing = json::object();
  FeatureMatrix X = obtain_features(c, &timing);
  if (c.selection.channels) {
    check_channels(c.selection.channels, X.channels());
    X = X.select_columns(X.columns_for_channels(*c.selection.channels));
  }
  ForestParams fp = c.classifier.forest;
  fp.seed = mix_seed(c.seed, kModelStream);

  auto out = open_csv(c.out / "feature_selection.csv");
  out << "method,k,selection_s,auc,weighted_f1,kappa\n";
  json rows = json::array();
  for (std::size_t k : c.selection.ks) {
    for (SelectMethod m : c.selection.methods) {
      FeatureSelection s;
      switch (m) {
        case SelectMethod::Rfe: s = rfe(X, k, c.selection.rfe_step, fp, c.threads); break;
        case SelectMethod::Ife: s = ife(X, k, fp, c.threads); break;
        case SelectMethod::Cife: s = cife(X, c.selection.rho_thres, k, fp, c.threads); break;
      }
      const FeatureMatrix sub = X.select_columns(X.columns_for_names(s.selected));
      const EvalResult r = loso_cv(sub, c.classifier, fp.seed, c.threads);
      out << to_string(m) << ',' << k << ',' << format_number(s.seconds) << ',' << format_number(r.auc) << ','
          << format_number(r.weighted_f1) << ',' << format_number(r.kappa) << '\n';
      rows.push_back({{"selection", selection_to_json(s)}, {"metrics", eval_to_json(r)}});
    }
  }
  out.close();
  json rep = base_report(c, "select-features");
  rep["n_features_in"] = X.n_cols();
  rep["comparison"] = rows;
  rep["timing"] = timing;
  write_json(rep, c.out / "report_select_features.json");
  return rep;
}

json cmd_bench(const PipelineConfig& c) {
  ensure_dir(c.out);
  json timing = json::object();
  PipelineConfig cc = c;
  std::size_t max_ch = 0;
  for (std::size_t n : c.bench.channel_counts) max_ch = std::max(max_ch, n);
  if (!c.manifest && !c.features_file) cc.synth.n_channels = std::max<int>(cc.synth.n_channels, static_cast<int>(max_ch));
  const FeatureMatrix X = obtain_features(cc, &timing);
  const auto chans = X.channels();
  ForestParams fp = c.classifier.forest;
  fp.seed = mix_seed(c.seed, kModelStream);

  auto out = open_csv(c.out / "bench.csv");
  out << "kind,channels,features,trees,median_s,min_s,max_s,runs\n";
  json by_channels = json::array();
  for (std::size_t n : c.bench.channel_counts) {
    if (n < 1 || n > chans.size())
      throw invalid_argument("bench: channel count " + std::to_string(n) + " outside 1.." + std::to_string(chans.size()));
    const auto sub = X.select_columns(X.columns_for_channels(std::vector<std::string>(chans.begin(), chans.begin() + static_cast<std::ptrdiff_t>(n))));
    const Timing t = time_median([&] { train_random_forest(sub, sub.labels, fp, c.threads); }, c.bench.repeats);
    out << "channels," << n << ',' << sub.n_cols() << ',' << fp.n_trees << ',' << format_number(t.median_s) << ','
        << format_number(t.min_s) << ',' << format_number(t.max_s) << ',' << t.runs << '\n';
    by_channels.push_back({{"channels", n}, {"features", sub.n_cols()}, {"median_s", t.median_s}, {"min_s", t.min_s},
                           {"max_s", t.max_s}, {"runs", t.runs}});
  }
  json by_trees = json::array();
  for (int trees : c.bench.tree_counts) {
    ForestParams f2 = fp;
    f2.n_trees = trees;
    const Timing t = time_median([&] { train_random_forest(X, X.labels, f2, c.threads); }, c.bench.repeats);
    out << "trees," << chans.size() << ',' << X.n_cols() << ',' << trees << ',' << format_number(t.median_s) << ','
        << format_number(t.min_s) << ',' << format_number(t.max_s) << ',' << t.runs << '\n';
    by_trees.push_back({{"trees", trees}, {"features", X.n_cols()}, {"median_s", t.median_s}, {"min_s", t.min_s},
                        {"max_s", t.max_s}, {"runs", t.runs}});
  }
  out.close();
  json rep = base_report(c, "bench");
  rep["rows"] = X.n_rows;
  rep["repeats"] = c.bench.repeats;
  rep["by_channels"] = by_channels;
  rep["by_trees"] = by_trees;
  rep["timing"] = timing;
  write_json(rep, c.out / "report_bench.json");
  return rep;
}

}  // namespace mwd
