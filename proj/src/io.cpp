#include "mwd/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mwd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw io_error("cannot open '" + p.string() + "' for reading");
  return in;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open '" + p.string() + "' for writing");
  return out;
}

void close_checked(std::ofstream& out, const fs::path& p) {
  out.close();
  if (!out) throw io_error("failed writing '" + p.string() + "'");
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() ? p : base / p; }

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& raw, const std::string& context) {
  const std::string s = trim(raw);
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (!s.empty() && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  if (s.empty() || ec != std::errc() || p != e) throw format_error(context + ": not a number: '" + raw + "'");
  return v;
}

DatasetManifest read_manifest(const fs::path& path) {
  auto in = open_in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw format_error("manifest '" + path.string() + "': " + ex.what());
  }
  DatasetManifest m;
  const fs::path base = path.parent_path();
  try {
    m.fs = j.at("fs").get<double>();
    m.window_s = j.at("window_s").get<double>();
    if (j.contains("preprocess") && !j["preprocess"].is_null()) {
      const auto& p = j["preprocess"];
      if (p.contains("bandpass") && !p["bandpass"].is_null()) {
        const auto bp = p["bandpass"].get<std::vector<double>>();
        if (bp.size() != 2) throw format_error("manifest: bandpass must be [lo, hi]");
        m.preprocess.bandpass = std::array<double, 2>{bp[0], bp[1]};
      }
      if (p.contains("bandpass_order")) m.preprocess.bandpass_order = p["bandpass_order"].get<int>();
      if (p.contains("reference") && !p["reference"].is_null()) {
        const auto ref = p["reference"].get<std::vector<std::string>>();
        if (ref.size() != 2) throw format_error("manifest: reference must name two channels");
        m.preprocess.reference = std::array<std::string, 2>{ref[0], ref[1]};
      }
    }
    for (const auto& s : j.at("subjects")) {
      m.subjects.push_back({s.at("id").get<std::string>(), resolve(base, s.at("signal").get<std::string>()),
                            resolve(base, s.at("events").get<std::string>())});
    }
    if (j.contains("provenance"))
      for (const auto& [k, v] : j["provenance"].items()) m.provenance[k] = v.is_string() ? v.get<std::string>() : v.dump();
  } catch (const json::exception& ex) {
    throw format_error("manifest '" + path.string() + "': " + ex.what());
  }
  if (!(m.fs > 0.0)) throw format_error("manifest: fs must be positive");
  if (!(m.window_s > 0.0)) throw format_error("manifest: window_s must be positive");
  if (m.subjects.empty()) throw format_error("manifest: no subjects");
  return m;
}

void write_manifest(const fs::path& path, const DatasetManifest& m) {
  json j;
  j["format"] = "mwd-dataset";
  j["version"] = 1;
  j["fs"] = m.fs;
  j["window_s"] = m.window_s;
  json p;
  p["bandpass"] = m.preprocess.bandpass ? json(std::vector<double>{(*m.preprocess.bandpass)[0], (*m.preprocess.bandpass)[1]})
                                        : json(nullptr);
  p["bandpass_order"] = m.preprocess.bandpass_order;
  p["reference"] = m.preprocess.reference
                       ? json(std::vector<std::string>{(*m.preprocess.reference)[0], (*m.preprocess.reference)[1]})
                       : json(nullptr);
  j["preprocess"] = p;
  j["subjects"] = json::array();
  for (const auto& s : m.subjects)
    j["subjects"].push_back({{"id", s.id}, {"signal", s.signal.generic_string()}, {"events", s.events.generic_string()}});
  j["provenance"] = m.provenance;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  close_checked(out, path);
}

Recording read_recording(const std::string& subject_id, double fs, const fs::path& signal_csv,
                         const fs::path& events_csv) {
  Recording rec;
  rec.subject_id = subject_id;
  rec.fs = fs;
  {
    auto in = open_in(signal_csv);
    std::string line;
    if (!std::getline(in, line)) throw format_error("'" + signal_csv.string() + "': missing header");
    for (const auto& h : split_csv(line)) rec.channels.push_back(trim(h));
    rec.samples.assign(rec.channels.size(), {});
    std::size_t row = 1;
    while (std::getline(in, line)) {
      ++row;
      if (trim(line).empty()) continue;
      const auto cells = split_csv(line);
      if (cells.size() != rec.channels.size())
        throw format_error("'" + signal_csv.string() + "' row " + std::to_string(row) + ": expected " +
                           std::to_string(rec.channels.size()) + " values, found " + std::to_string(cells.size()));
      for (std::size_t c = 0; c < cells.size(); ++c)
        rec.samples[c].push_back(parse_number(cells[c], signal_csv.string() + " row " + std::to_string(row)));
    }
  }
  {
    auto in = open_in(events_csv);
    std::string line;
    if (!std::getline(in, line)) throw format_error("'" + events_csv.string() + "': missing header");
    const auto header = split_csv(line);
    if (header.size() != 2 || trim(header[0]) != "time_s" || trim(header[1]) != "rating")
      throw format_error("'" + events_csv.string() + "': header must be 'time_s,rating'");
    std::size_t row = 1;
    while (std::getline(in, line)) {
      ++row;
      if (trim(line).empty()) continue;
      const auto cells = split_csv(line);
      const std::string ctx = events_csv.string() + " row " + std::to_string(row);
      if (cells.size() != 2) throw format_error(ctx + ": expected 2 values");
      const double rating = parse_number(cells[1], ctx);
      if (std::floor(rating) != rating) throw format_error(ctx + ": rating must be an integer");
      rec.events.push_back({parse_number(cells[0], ctx), static_cast<int>(rating)});
    }
  }
  rec.validate();
  return rec;
}

void write_recording(const Recording& rec, const fs::path& signal_csv, const fs::path& events_csv) {
  rec.validate();
  {
    auto out = open_out(signal_csv);
    for (std::size_t c = 0; c < rec.channels.size(); ++c) out << (c ? "," : "") << rec.channels[c];
    out << '\n';
    for (std::size_t i = 0; i < rec.n_samples(); ++i) {
      for (std::size_t c = 0; c < rec.channels.size(); ++c) out << (c ? "," : "") << format_number(rec.samples[c][i]);
      out << '\n';
    }
    close_checked(out, signal_csv);
  }
  {
    auto out = open_out(events_csv);
    out << "time_s,rating\n";
    for (const auto& e : rec.events) out << format_number(e.time_s) << ',' << e.rating << '\n';
    close_checked(out, events_csv);
  }
}

void save_dataset(const SubjectDataset& ds, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io_error("cannot create '" + dir.string() + "': " + ec.message());
  DatasetManifest m;
  m.fs = ds.fs;
  m.window_s = ds.window_s;
  m.provenance = ds.provenance;
  for (const auto& rec : to_recordings(ds)) {
    const std::string sig = rec.subject_id + "_signal.csv";
    const std::string ev = rec.subject_id + "_events.csv";
    write_recording(rec, dir / sig, dir / ev);
    m.subjects.push_back({rec.subject_id, sig, ev});
  }
  write_manifest(dir / "manifest.json", m);
}

SubjectDataset load_dataset(const fs::path& manifest_path) {
  const DatasetManifest m = read_manifest(manifest_path);
  SubjectDataset ds;
  ds.fs = m.fs;
  ds.window_s = m.window_s;
  ds.provenance = m.provenance;
  ds.provenance["manifest"] = manifest_path.string();
  for (const auto& s : m.subjects) {
    Recording rec = read_recording(s.id, m.fs, s.signal, s.events);
    if (m.preprocess.reference) rec = rereference(rec, (*m.preprocess.reference)[0], (*m.preprocess.reference)[1]);
    if (m.preprocess.bandpass)
      rec = bandpass(rec, (*m.preprocess.bandpass)[0], (*m.preprocess.bandpass)[1], m.preprocess.bandpass_order);
    if (ds.channels.empty()) {
      ds.channels = rec.channels;
    } else if (ds.channels != rec.channels) {
      throw format_error("subject '" + s.id + "': channel list differs from the first subject");
    }
    ds.subjects.push_back({s.id, epoch_and_label(rec, m.window_s)});
  }
  return drop_single_class_subjects(ds);
}

void write_feature_matrix(const FeatureMatrix& m, const fs::path& path) {
  m.validate();
  auto out = open_out(path);
  out << "subject,label";
  for (const auto& n : m.names) out << ',' << n;
  out << '\n';
  for (std::size_t r = 0; r < m.n_rows; ++r) {
    out << m.subject_ids[r] << ',' << m.labels[r];
    for (std::size_t c = 0; c < m.n_cols(); ++c) out << ',' << format_number(m.at(r, c));
    out << '\n';
  }
  close_checked(out, path);
}

FeatureMatrix read_feature_matrix(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw format_error("'" + path.string() + "': missing header");
  const auto header = split_csv(line);
  if (header.size() < 3 || header[0] != "subject" || header[1] != "label")
    throw format_error("'" + path.string() + "': header must start with 'subject,label'");
  FeatureMatrix m;
  for (std::size_t c = 2; c < header.size(); ++c) {
    m.names.push_back(header[c]);
    m.channel_of.push_back(parse_feature_name(header[c]).channel);
  }
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    const std::string ctx = path.string() + " row " + std::to_string(row);
    if (cells.size() != header.size()) throw format_error(ctx + ": wrong number of values");
    m.subject_ids.push_back(cells[0]);
    m.labels.push_back(static_cast<int>(parse_number(cells[1], ctx)));
    for (std::size_t c = 2; c < cells.size(); ++c) m.values.push_back(parse_number(cells[c], ctx));
    ++m.n_rows;
  }
  m.validate();
  return m;
}

}  // namespace mwd
