#include "fairloc/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace fairloc {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Splits one CSV record. Quoted fields may contain the delimiter and doubled
// quotes; unquoted fields are trimmed.
std::vector<std::string> split_record(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          cur += '"';
          ++k;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
      cur = trim(cur);
    } else if (c == delim) {
      fields.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur += c;
    }
  }
  fields.push_back(was_quoted ? cur : trim(cur));
  return fields;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool read_record(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

double sq_dist(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

}  // namespace

RawTable parse_csv(std::istream& in, const std::string& group_column, const CsvOptions& options) {
  std::string line;
  if (!read_record(in, line)) throw DataError(DataError::Kind::kFormat, "CSV has no header row");
  const std::vector<std::string> header = split_record(line, options.delimiter);
  auto find_column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw DataError(DataError::Kind::kMissingColumn, "column '" + name + "' not in header");
    }
    return static_cast<int>(it - header.begin());
  };
  const int group_col = find_column(group_column);

  std::vector<std::vector<std::string>> records;
  int line_no = 1;
  while (read_record(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_record(line, options.delimiter);
    if (fields.size() != header.size()) {
      throw DataError(DataError::Kind::kParse,
                      "row " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                          " fields, header has " + std::to_string(header.size()));
    }
    records.push_back(std::move(fields));
  }

  std::vector<int> feature_cols;
  double scratch = 0.0;
  if (options.feature_columns.empty()) {
    for (int c = 0; c < static_cast<int>(header.size()); ++c) {
      if (c == group_col) continue;
      const bool numeric = std::all_of(records.begin(), records.end(), [&](const auto& r) {
        return parse_number(r[c], scratch);
      });
      if (numeric) feature_cols.push_back(c);
    }
    if (feature_cols.empty()) {
      throw DataError(DataError::Kind::kMissingColumn, "no numeric feature columns");
    }
  } else {
    for (const auto& name : options.feature_columns) feature_cols.push_back(find_column(name));
  }

  RawTable table;
  for (int c : feature_cols) table.columns.push_back(header[c]);
  std::map<std::string, int> labels;
  for (const auto& r : records) labels.emplace(r[group_col], 0);
  for (auto& [label, index] : labels) {
    index = static_cast<int>(table.group_labels.size());
    table.group_labels.push_back(label);
  }
  // Blank lines are skipped, so report data rows by position.
  for (std::size_t r = 0; r < records.size(); ++r) {
    std::vector<double> row;
    for (int c : feature_cols) {
      double v = 0.0;
      if (!parse_number(records[r][c], v)) {
        throw DataError(DataError::Kind::kParse, "row " + std::to_string(r + 1) + ", column '" +
                                                     header[c] + "': cannot parse '" +
                                                     records[r][c] + "' as a number");
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
    table.groups.push_back(labels.at(records[r][group_col]));
  }
  return table;
}

RawTable load_csv(const std::string& path, const std::string& group_column,
                  const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError(DataError::Kind::kMissingFile, "cannot open '" + path + "'");
  return parse_csv(in, group_column, options);
}

RawTable normalize(RawTable table) {
  const std::size_t cols = table.columns.size();
  for (std::size_t c = 0; c < cols; ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& row : table.rows) {
      lo = std::min(lo, row[c]);
      hi = std::max(hi, row[c]);
    }
    for (auto& row : table.rows) row[c] = hi > lo ? (row[c] - lo) / (hi - lo) : 0.0;
  }
  return table;
}

std::vector<Client> sample_clients(const RawTable& table, int n, std::uint64_t seed) {
  if (n < 0 || n > table.num_rows()) {
    throw InputError("cannot sample " + std::to_string(n) + " of " +
                     std::to_string(table.num_rows()) + " rows");
  }
  std::vector<int> all(table.num_rows());
  for (int r = 0; r < table.num_rows(); ++r) all[r] = r;
  std::vector<int> picked;
  std::mt19937_64 rng(seed);
  std::sample(all.begin(), all.end(), std::back_inserter(picked), n, rng);
  std::vector<Client> clients;
  clients.reserve(n);
  for (int r : picked) clients.push_back({table.rows[r], table.groups[r]});
  return clients;
}

std::vector<Point> select_facilities_kmeans(const std::vector<Point>& points, int m,
                                            std::uint64_t seed) {
  const int n = static_cast<int>(points.size());
  if (m < 1 || m > n) {
    throw InputError("k-means needs 1 <= m <= n, got m = " + std::to_string(m) +
                     ", n = " + std::to_string(n));
  }
  std::mt19937_64 rng(seed);
  std::vector<Point> centers;
  std::vector<char> used(n, 0);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());

  auto add_center = [&](int idx) {
    used[idx] = 1;
    centers.push_back(points[idx]);
    for (int p = 0; p < n; ++p) d2[p] = std::min(d2[p], sq_dist(points[p], centers.back()));
  };
  add_center(std::uniform_int_distribution<int>(0, n - 1)(rng));
  while (static_cast<int>(centers.size()) < m) {
    double total = 0.0;
    for (int p = 0; p < n; ++p) total += d2[p];
    int pick = -1;
    if (total > 0.0) {
      double r = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (int p = 0; p < n; ++p) {
        if (d2[p] <= 0.0) continue;
        pick = p;
        r -= d2[p];
        if (r <= 0.0) break;
      }
    } else {
      // Every point coincides with a center: take an unused one.
      std::vector<int> free;
      for (int p = 0; p < n; ++p) {
        if (!used[p]) free.push_back(p);
      }
      pick = free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
    }
    add_center(pick);
  }

  const std::size_t dim = points.front().size();
  std::vector<int> label(n, 0);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<double> best(n);
    for (int p = 0; p < n; ++p) {
      double b = std::numeric_limits<double>::infinity();
      for (int c = 0; c < m; ++c) {
        const double d = sq_dist(points[p], centers[c]);
        if (d < b) {
          b = d;
          label[p] = c;
        }
      }
      best[p] = b;
    }
    std::vector<Point> next(m, Point(dim, 0.0));
    std::vector<int> count(m, 0);
    for (int p = 0; p < n; ++p) {
      ++count[label[p]];
      for (std::size_t k = 0; k < dim; ++k) next[label[p]][k] += points[p][k];
    }
    for (int c = 0; c < m; ++c) {
      if (count[c] == 0) {
        const int far = static_cast<int>(std::max_element(best.begin(), best.end()) - best.begin());
        next[c] = points[far];
        best[far] = 0.0;
        continue;
      }
      for (double& v : next[c]) v /= count[c];
    }
    double moved = 0.0;
    for (int c = 0; c < m; ++c) moved = std::max(moved, std::sqrt(sq_dist(next[c], centers[c])));
    centers = std::move(next);
    if (moved <= 1e-6) break;
  }
  return centers;
}

double synthetic_facility_cost(const Point& p, const SyntheticConfig& cfg) {
  double norm2 = 0.0;
  for (double c : p) norm2 += c * c;
  return std::sqrt(norm2) <= cfg.near_radius ? cfg.cost_near : cfg.cost_far;
}

LabeledInstance generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.n_in < 1 || cfg.n_out < 1 || cfg.num_facilities < 1 || cfg.dimension < 1) {
    throw InputError("synthetic counts and dimension must be positive");
  }
  if (!(cfg.in_sigma >= 0.0) || !(cfg.out_sigma >= 0.0)) {
    throw InputError("standard deviations must be non-negative");
  }
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> in_dist(cfg.in_mean, cfg.in_sigma);
  std::normal_distribution<double> out_dist(cfg.out_mean, cfg.out_sigma);
  auto draw = [&](std::normal_distribution<double>& dist) {
    Point p(cfg.dimension);
    for (double& c : p) c = dist(rng);
    return p;
  };
  std::vector<Client> clients;
  for (int j = 0; j < cfg.n_in; ++j) clients.push_back({draw(in_dist), 0});
  for (int j = 0; j < cfg.n_out; ++j) clients.push_back({draw(out_dist), 1});
  std::vector<Facility> facilities;
  for (int i = 0; i < cfg.num_facilities; ++i) {
    Point p = draw(in_dist);
    const double cost = synthetic_facility_cost(p, cfg);
    facilities.push_back({std::move(p), cost});
  }
  return {MetricInstance(std::move(clients), std::move(facilities), {.num_groups = 2}),
          {"in", "out"}};
}

LabeledInstance instance_from_table(const RawTable& table, const TableInstanceConfig& cfg) {
  const RawTable norm = normalize(table);
  std::vector<Client> clients = sample_clients(norm, cfg.num_clients, cfg.seed);
  std::vector<Point> points;
  for (const auto& c : clients) points.push_back(c.point);
  const std::vector<Point> centers =
      select_facilities_kmeans(points, cfg.num_facilities, cfg.seed + 1);
  double cost = cfg.fixed_cost;
  if (cfg.cost_policy == FacilityCostPolicy::kUniformDmax) {
    cost = 0.0;
    for (const auto& c : centers) {
      for (const auto& p : points) cost = std::max(cost, std::sqrt(sq_dist(c, p)));
    }
  }
  std::vector<Facility> facilities;
  for (const auto& c : centers) facilities.push_back({c, cost});
  const int groups = static_cast<int>(norm.group_labels.size());
  return {MetricInstance(std::move(clients), std::move(facilities), {.num_groups = groups}),
          norm.group_labels};
}

void write_instance(const LabeledInstance& inst, std::ostream& out) {
  const MetricInstance& mi = inst.instance;
  out.precision(17);
  out << "#groups=";
  for (std::size_t g = 0; g < inst.group_labels.size(); ++g) {
    out << (g ? ";" : "") << inst.group_labels[g];
  }
  out << "\nkind,group,cost";
  for (int k = 0; k < mi.dimension(); ++k) out << ",x" << k;
  out << "\n";
  auto label = [&](int g) {
    return g < static_cast<int>(inst.group_labels.size()) ? inst.group_labels[g]
                                                           : std::to_string(g);
  };
  for (const auto& c : mi.clients()) {
    out << "client," << label(c.group) << ",";
    for (double v : c.point) out << "," << v;
    out << "\n";
  }
  for (const auto& f : mi.facilities()) {
    out << "facility,," << f.open_cost;
    for (double v : f.point) out << "," << v;
    out << "\n";
  }
}

void write_instance(const LabeledInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(DataError::Kind::kMissingFile, "cannot write '" + path + "'");
  write_instance(inst, out);
}

LabeledInstance read_instance(std::istream& in) {
  std::string line;
  std::vector<std::string> labels;
  std::vector<std::string> header;
  while (read_record(in, line)) {
    if (line.rfind("#groups=", 0) == 0) {
      std::stringstream ss(line.substr(8));
      std::string item;
      while (std::getline(ss, item, ';')) labels.push_back(item);
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    header = split_record(line, ',');
    break;
  }
  if (header.size() < 4 || header[0] != "kind" || header[1] != "group" || header[2] != "cost") {
    throw DataError(DataError::Kind::kFormat, "instance header must be kind,group,cost,x0,...");
  }
  const std::size_t dim = header.size() - 3;
  std::map<std::string, int> index;
  for (std::size_t g = 0; g < labels.size(); ++g) index[labels[g]] = static_cast<int>(g);

  std::vector<Client> clients;
  std::vector<Facility> facilities;
  std::vector<std::string> client_labels;
  int row = 1;
  while (read_record(in, line)) {
    ++row;
    if (trim(line).empty() || line[0] == '#') continue;
    const auto f = split_record(line, ',');
    if (f.size() != dim + 3) {
      throw DataError(DataError::Kind::kParse, "instance row " + std::to_string(row) +
                                                   " has the wrong number of fields");
    }
    Point p(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      if (!parse_number(f[k + 3], p[k])) {
        throw DataError(DataError::Kind::kParse,
                        "instance row " + std::to_string(row) + ", column '" + header[k + 3] +
                            "': cannot parse '" + f[k + 3] + "'");
      }
    }
    if (f[0] == "client") {
      if (!labels.empty() && !index.count(f[1])) {
        throw DataError(DataError::Kind::kParse, "unknown group '" + f[1] + "'");
      }
      clients.push_back({std::move(p), 0});
      client_labels.push_back(f[1]);
    } else if (f[0] == "facility") {
      double cost = 0.0;
      if (!parse_number(f[2], cost)) {
        throw DataError(DataError::Kind::kParse,
                        "instance row " + std::to_string(row) + ": bad facility cost");
      }
      facilities.push_back({std::move(p), cost});
    } else {
      throw DataError(DataError::Kind::kParse, "instance row " + std::to_string(row) +
                                                   ": kind must be client or facility");
    }
  }
  if (labels.empty()) {
    // No group line: labels in sorted order.
    labels = client_labels;
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    for (std::size_t g = 0; g < labels.size(); ++g) index[labels[g]] = static_cast<int>(g);
  }
  for (std::size_t j = 0; j < clients.size(); ++j) clients[j].group = index.at(client_labels[j]);
  if (clients.empty() || facilities.empty()) {
    throw DataError(DataError::Kind::kFormat, "instance needs clients and facilities");
  }
  const int groups = static_cast<int>(labels.size());
  return {MetricInstance(std::move(clients), std::move(facilities), {.num_groups = groups}),
          labels};
}

LabeledInstance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(DataError::Kind::kMissingFile, "cannot open '" + path + "'");
  return read_instance(in);
}

}  // namespace fairloc
