#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fairloc/error.hpp"
#include "fairloc/metric.hpp"

namespace fairloc {

class DataError : public InputError {
 public:
  enum class Kind { kMissingFile, kMissingColumn, kParse, kFormat };
  DataError(Kind kind, const std::string& what) : InputError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Numeric feature rows with one categorical group label per row.
struct RawTable {
  std::vector<std::string> columns;        // feature column names
  std::vector<std::vector<double>> rows;   // one entry per feature column
  std::vector<int> groups;                 // index into group_labels
  std::vector<std::string> group_labels;   // sorted
  int num_rows() const { return static_cast<int>(rows.size()); }
};

struct CsvOptions {
  char delimiter = ',';
  // Empty: every column other than the group column whose cells all parse
  // as numbers. Otherwise these columns, and a non-numeric cell is an error.
  std::vector<std::string> feature_columns;
};

RawTable load_csv(const std::string& path, const std::string& group_column,
                  const CsvOptions& options = {});
RawTable parse_csv(std::istream& in, const std::string& group_column,
                   const CsvOptions& options = {});

// Per-column min-max scaling to [0, 1]; constant columns become 0.
RawTable normalize(RawTable table);

// Uniform sample of n rows without replacement (kept in table order).
std::vector<Client> sample_clients(const RawTable& table, int n, std::uint64_t seed);

// k-means++ seeding followed by Lloyd iterations (at most 100, stopping once
// no center moves more than 1e-6). Empty clusters restart at the point
// farthest from its center, so exactly m centers come back.
std::vector<Point> select_facilities_kmeans(const std::vector<Point>& points, int m,
                                            std::uint64_t seed);

struct SyntheticConfig {
  int n_in = 500;
  int n_out = 50;
  double in_mean = 0.0;
  double in_sigma = 10.0;
  double out_mean = 10.0;
  double out_sigma = 20.0;
  double cost_near = 80.0;
  double cost_far = 40.0;
  double near_radius = 10.0;
  int dimension = 2;
  int num_facilities = 100;
  std::uint64_t seed = 1;
};

// Opening cost of a facility at p: cost_near within near_radius of the
// origin (inclusive), cost_far outside.
double synthetic_facility_cost(const Point& p, const SyntheticConfig& cfg);

struct LabeledInstance {
  MetricInstance instance;
  std::vector<std::string> group_labels;
};

// Group 0 ("in") clients ~ N(in_mean, in_sigma) per coordinate, group 1
// ("out") ~ N(out_mean, out_sigma); facilities drawn like the in-group.
LabeledInstance generate_synthetic(const SyntheticConfig& cfg);

enum class FacilityCostPolicy { kUniformDmax, kFixed };

struct TableInstanceConfig {
  int num_clients = 4500;
  int num_facilities = 100;
  FacilityCostPolicy cost_policy = FacilityCostPolicy::kUniformDmax;
  double fixed_cost = 1.0;
  std::uint64_t seed = 1;
};

// Normalizes, samples clients, places facilities by k-means and prices them.
// With kUniformDmax every facility costs the largest client-facility
// distance of the sampled instance.
LabeledInstance instance_from_table(const RawTable& table, const TableInstanceConfig& cfg);

// Instance files: CSV with header kind,group,cost,x0..x{d-1}; kind is
// "client" or "facility". Group labels are written as given.
void write_instance(const LabeledInstance& inst, std::ostream& out);
void write_instance(const LabeledInstance& inst, const std::string& path);
LabeledInstance read_instance(std::istream& in);
LabeledInstance read_instance(const std::string& path);

}  // namespace fairloc
