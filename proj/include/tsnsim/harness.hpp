#pragma once

// Experiment runner: grid expansion, replications, CSV output, key=value
// configuration files and per-family summary tables.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include "tsnsim/scenario.hpp"
#include "tsnsim/simulator.hpp"
#include "tsnsim/traffic.hpp"

namespace tsn {

inline constexpr int kCsvSchemaVersion = 1;

// Seed of replication r: the scenario seed plus r, through splitmix64.
constexpr std::uint64_t replication_seed(std::uint64_t seed, int replication) {
  return splitmix64(seed + static_cast<std::uint64_t>(replication));
}

struct SweepGrid {
  Scenario base;  // every field not swept below
  std::vector<Model> models{Model::Centralized};
  std::vector<TopologyKind> topologies{TopologyKind::UniRing};
  std::vector<bool> reconfig{true};
  std::vector<double> rhos{0.1};
  std::vector<double> pis{1.0};
  std::vector<double> taus{2.0};

  std::size_t points() const {
    return models.size() * topologies.size() * reconfig.size() * rhos.size() * pis.size() * taus.size();
  }
};

// Full parameter grid over all eight model/topology/reconfig combinations.
inline SweepGrid full_grid(const Scenario& base = {}) {
  SweepGrid g;
  g.base = base;
  g.models = {Model::Centralized, Model::Distributed};
  g.topologies = {TopologyKind::UniRing, TopologyKind::BiRing};
  g.reconfig = {false, true};
  g.rhos = {0.1, 1.0, 2.0};
  g.pis = {1, 5, 10, 15, 20};
  g.taus = {2, 3, 4, 5};
  return g;
}

// Grid order: model, topology, reconfig, rho, pi, tau (last varies fastest).
inline std::vector<Scenario> expand(const SweepGrid& g) {
  if (g.points() == 0) throw std::invalid_argument("sweep grid is empty");
  std::vector<Scenario> out;
  out.reserve(g.points());
  for (auto m : g.models)
    for (auto t : g.topologies)
      for (bool rc : g.reconfig)
        for (double rho : g.rhos)
          for (double pi : g.pis)
            for (double tau : g.taus) {
              Scenario s = g.base;
              s.model = m;
              s.topology = t;
              s.reconfig = rc;
              s.rho = rho;
              s.pi = pi;
              s.tau = tau;
              out.push_back(s);
            }
  return out;
}

struct SweepRow {
  Scenario scenario;  // seed holds the scenario seed, not the replication seed
  int replication = 0;
  std::uint64_t run_seed = 0;
  MetricsReport report;
  std::vector<int> final_slot_percent;
  std::uint64_t events = 0;
  bool conservation_ok = true;
  std::size_t diagnostics = 0;
};

inline SweepRow run_cell(const Scenario& sc, int replication) {
  Scenario s = sc;
  s.seed = replication_seed(sc.seed, replication);
  SimResult r = run_simulation(s);
  SweepRow row;
  row.scenario = sc;
  row.replication = replication;
  row.run_seed = s.seed;
  row.report = r.report;
  row.final_slot_percent = std::move(r.final_slot_percent);
  row.events = r.events;
  row.conservation_ok = r.conservation_ok();
  row.diagnostics = r.diagnostics.size();
  return row;
}

// Runs every (scenario, replication) cell. Cells are independent, so `jobs`
// worker threads may run them concurrently; rows come back in grid order
// regardless.
inline std::vector<SweepRow> run_sweep(const std::vector<Scenario>& scenarios, int jobs = 1) {
  if (scenarios.empty()) throw std::invalid_argument("sweep grid is empty");
  std::vector<std::pair<std::size_t, int>> cells;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    validate(scenarios[i]);
    for (int r = 0; r < scenarios[i].replications; ++r) cells.emplace_back(i, r);
  }
  std::vector<SweepRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= cells.size()) return;
      try {
        rows[k] = run_cell(scenarios[cells[k].first], cells[k].second);
      } catch (...) {
        std::lock_guard lk(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  jobs = std::clamp(jobs, 1, static_cast<int>(cells.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
  return rows;
}

inline std::vector<SweepRow> run_sweep(const SweepGrid& g, int jobs = 1) { return run_sweep(expand(g), jobs); }

namespace detail {

// Shortest round-trip decimal; independent of the global locale.
inline std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string fmt(std::uint64_t v) { return std::to_string(v); }

}  // namespace detail

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "schema_version", "model", "topology", "reconfig", "pi", "tau", "rho", "cycle_time_us", "init_ratio_percent",
      "duration_s", "seed", "replication", "run_seed", "st_mean_delay_us", "st_max_delay_us", "st_throughput_bps",
      "st_loss_ratio", "st_offered", "st_delivered", "st_dropped", "st_in_flight", "be_mean_delay_us",
      "be_max_delay_us", "be_throughput_bps", "be_loss_ratio", "be_offered", "be_delivered", "be_dropped",
      "be_in_flight", "streams_generated", "streams_admitted", "streams_completed", "streams_rejected",
      "streams_excluded", "admission_ratio", "admission_undefined", "sig_samples", "sig_mean_delay_us",
      "sig_min_delay_us", "sig_max_delay_us", "sig_delay_variance_us2", "sig_messages", "sig_cdt_bytes",
      "sig_overhead_bps", "max_slot_percent", "events", "conservation_ok", "diagnostics"};
  return cols;
}

inline void write_csv_header(std::ostream& os) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
}

inline void write_csv_row(std::ostream& os, const SweepRow& row) {
  using detail::fmt;
  const Scenario& s = row.scenario;
  const MetricsReport& r = row.report;
  const int max_slot =
      row.final_slot_percent.empty() ? 0 : *std::max_element(row.final_slot_percent.begin(), row.final_slot_percent.end());
  const std::vector<std::string> v = {
      std::to_string(kCsvSchemaVersion),
      std::string(to_string(s.model)),
      s.topology == TopologyKind::UniRing ? "uni" : "bi",
      s.reconfig ? "on" : "off",
      fmt(s.pi),
      fmt(s.tau),
      fmt(s.rho),
      fmt(to_us(s.cycle_time)),
      std::to_string(s.init_ratio_percent),
      fmt(s.duration),
      fmt(s.seed),
      std::to_string(row.replication),
      fmt(row.run_seed),
      fmt(r.st.mean_delay_us),
      fmt(r.st.max_delay_us),
      fmt(r.st.throughput_bps),
      fmt(r.st.loss_ratio),
      fmt(r.st.offered),
      fmt(r.st.delivered),
      fmt(r.st.dropped),
      fmt(r.st.in_flight),
      fmt(r.be.mean_delay_us),
      fmt(r.be.max_delay_us),
      fmt(r.be.throughput_bps),
      fmt(r.be.loss_ratio),
      fmt(r.be.offered),
      fmt(r.be.delivered),
      fmt(r.be.dropped),
      fmt(r.be.in_flight),
      fmt(r.streams.generated),
      fmt(r.streams.admitted),
      fmt(r.streams.completed),
      fmt(r.streams.rejected),
      fmt(r.streams.excluded),
      fmt(r.streams.admission_ratio),
      r.streams.admission_undefined ? "1" : "0",
      fmt(r.signaling.samples),
      fmt(r.signaling.mean_delay_us),
      fmt(r.signaling.min_delay_us),
      fmt(r.signaling.max_delay_us),
      fmt(r.signaling.delay_variance_us2),
      fmt(r.signaling.messages),
      fmt(r.signaling.cdt_bytes),
      fmt(r.signaling.overhead_bps),
      std::to_string(max_slot),
      fmt(row.events),
      row.conservation_ok ? "1" : "0",
      std::to_string(row.diagnostics)};
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << '\n';
}

inline void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  write_csv_header(os);
  for (const auto& r : rows) write_csv_row(os, r);
}

inline std::string to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

// ---- configuration ---------------------------------------------------------

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto end = s.find(',', start);
    if (end == std::string_view::npos) end = s.size();
    std::string item(s.substr(start, end - start));
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
    start = end + 1;
  }
  return out;
}

inline double parse_double(std::string_view key, const std::string& v) {
  double d = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), d);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    throw std::invalid_argument("bad number for " + std::string(key) + ": '" + v + "'");
  }
  return d;
}

inline std::uint64_t parse_u64(std::string_view key, const std::string& v) {
  std::uint64_t x = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    throw std::invalid_argument("bad integer for " + std::string(key) + ": '" + v + "'");
  }
  return x;
}

// Applies one key=value setting to a grid. Keys are the CLI flag names
// without the leading dashes; list-valued keys accept comma-separated values.
inline void apply_setting(SweepGrid& g, std::string_view key, const std::string& value) {
  auto doubles = [&] {
    std::vector<double> out;
    for (auto& x : split_list(value)) out.push_back(parse_double(key, x));
    if (out.empty()) throw std::invalid_argument("empty list for " + std::string(key));
    return out;
  };
  if (key == "model") {
    g.models.clear();
    for (auto& x : split_list(value)) g.models.push_back(parse_model(x));
  } else if (key == "topology") {
    g.topologies.clear();
    for (auto& x : split_list(value)) g.topologies.push_back(parse_topology(x));
  } else if (key == "reconfig") {
    g.reconfig.clear();
    for (auto& x : split_list(value)) g.reconfig.push_back(parse_switch(x));
  } else if (key == "pi") {
    g.pis = doubles();
  } else if (key == "tau") {
    g.taus = doubles();
  } else if (key == "rho") {
    g.rhos = doubles();
  } else if (key == "cycle-time") {
    g.base.cycle_time = Nanos{static_cast<std::int64_t>(std::llround(parse_double(key, value) * 1e3))};
  } else if (key == "init-ratio") {
    g.base.init_ratio_percent = static_cast<int>(parse_u64(key, value));
  } else if (key == "duration") {
    g.base.duration = parse_double(key, value);
  } else if (key == "seed") {
    g.base.seed = parse_u64(key, value);
  } else if (key == "replications") {
    g.base.replications = static_cast<int>(parse_u64(key, value));
  } else if (key == "phase") {
    g.base.phase = parse_phase(value);
  } else {
    throw std::invalid_argument("unknown setting '" + std::string(key) + "'");
  }
  if (g.models.empty() || g.topologies.empty() || g.reconfig.empty()) {
    throw std::invalid_argument("empty list for " + std::string(key));
  }
}

// key=value lines; '#' starts a comment; blank lines are ignored.
inline std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line.erase(0, line.find_first_not_of(" \t\r"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    std::string k = line.substr(0, eq), v = line.substr(eq + 1);
    k.erase(k.find_last_not_of(" \t") + 1);
    v.erase(0, v.find_first_not_of(" \t"));
    out.emplace_back(k, v);
  }
  return out;
}

inline void apply_config_file(SweepGrid& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  for (auto& [k, v] : parse_config(in)) apply_setting(g, k, v);
}

// ---- summaries -------------------------------------------------------------

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::invalid_argument("missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) return t;
  t.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    t.rows.push_back(split_csv_line(line));
    if (t.rows.back().size() != t.header.size()) throw std::invalid_argument("ragged CSV row");
  }
  return t;
}

// Upper bound on the maximum ST delay for the centralized model, in µs;
// negative when none is stated.
inline double max_delay_bound_us(std::string_view model, std::string_view topology, std::string_view reconfig) {
  if (model != "centralized") return -1;
  const bool rc = reconfig == "on";
  if (topology == "uni") return rc ? 105.0 * 1.1 : 60.0 * 1.1;
  return rc ? 300.0 : 50.0 + to_us(transmission_time(64, kGigabitPerSecond));
}

inline const std::vector<std::string>& summary_families() {
  static const std::vector<std::string> f = {"delay", "maxdelay", "admission", "signaling", "throughput", "loss"};
  return f;
}

// Mean over replications per grid point, one panel per (model, topology,
// reconfig, rho) and one row per (pi, tau). The maxdelay family flags a
// point when any replication exceeds the stated bound.
inline std::string summarize(const CsvTable& t, const std::string& family) {
  std::vector<std::pair<std::string, std::string>> metrics;  // (column, label)
  if (family == "delay") {
    metrics = {{"st_mean_delay_us", "st_mean_us"}, {"be_mean_delay_us", "be_mean_us"}};
  } else if (family == "maxdelay") {
    metrics = {{"st_max_delay_us", "st_max_us"}};
  } else if (family == "admission") {
    metrics = {{"admission_ratio", "admission"}};
  } else if (family == "signaling") {
    metrics = {{"sig_mean_delay_us", "delay_us"}, {"sig_delay_variance_us2", "var_us2"}, {"sig_overhead_bps", "overhead_bps"}};
  } else if (family == "throughput") {
    metrics = {{"st_throughput_bps", "st_bps"}, {"be_throughput_bps", "be_bps"}};
  } else if (family == "loss") {
    metrics = {{"st_loss_ratio", "st_loss"}, {"be_loss_ratio", "be_loss"}};
  } else {
    throw std::invalid_argument("unknown summary family '" + family + "'");
  }

  std::ostringstream os;
  os << "pi,tau";
  for (auto& m : metrics) os << "," << m.second;
  if (family == "maxdelay") os << ",bound_us,violation";
  os << '\n';
  if (t.header.empty()) return os.str();

  const std::size_t c_model = t.column("model"), c_topo = t.column("topology"), c_rc = t.column("reconfig"),
                    c_rho = t.column("rho"), c_pi = t.column("pi"), c_tau = t.column("tau");
  std::vector<std::size_t> cols;
  for (auto& m : metrics) cols.push_back(t.column(m.first));

  using PanelKey = std::tuple<std::string, std::string, std::string, double>;
  using RowKey = std::pair<double, double>;
  struct Acc {
    std::vector<double> sum;
    double worst = 0;  // largest value of the first metric over replications
    int n = 0;
  };
  std::vector<PanelKey> panel_order;
  std::map<PanelKey, std::vector<RowKey>> row_order;
  std::map<PanelKey, std::map<RowKey, Acc>> acc;
  for (const auto& r : t.rows) {
    PanelKey pk{r[c_model], r[c_topo], r[c_rc], parse_double("rho", r[c_rho])};
    RowKey rk{parse_double("pi", r[c_pi]), parse_double("tau", r[c_tau])};
    if (!acc.count(pk)) panel_order.push_back(pk);
    auto& panel = acc[pk];
    if (!panel.count(rk)) row_order[pk].push_back(rk);
    auto& a = panel[rk];
    if (a.sum.empty()) a.sum.assign(cols.size(), 0.0);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const double v = parse_double(t.header[cols[i]], r[cols[i]]);
      a.sum[i] += v;
      if (i == 0) a.worst = a.n == 0 ? v : std::max(a.worst, v);
    }
    ++a.n;
  }

  os << std::setprecision(6);
  for (const auto& pk : panel_order) {
    const auto& [model, topo, rc, rho] = pk;
    os << "# model=" << model << " topology=" << topo << " reconfig=" << rc << " rho=" << detail::fmt(rho) << '\n';
    const double bound = max_delay_bound_us(model, topo, rc);
    for (const auto& rk : row_order[pk]) {
      const auto& a = acc[pk][rk];
      os << detail::fmt(rk.first) << "," << detail::fmt(rk.second);
      for (double s : a.sum) os << "," << s / a.n;
      if (family == "maxdelay") {
        if (bound < 0) {
          os << ",,";
        } else {
          os << "," << bound << "," << (a.worst > bound ? "VIOLATION" : "ok");
        }
      }
      os << '\n';
    }
  }
  return os.str();
}

inline std::string summarize(std::istream& csv, const std::string& family) { return summarize(read_csv(csv), family); }

}  // namespace tsn
