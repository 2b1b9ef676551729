#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "modnet/estimator.hpp"
#include "modnet/types.hpp"

namespace modnet {

// Model file schema:
//   {p, column_names, alpha[], beta:[{i,j,value}], omega:[{i,j,q,value}],
//    sigma[], meta:{rule, gamma, moderators, seed, ...}}
// Canonical keys only, deterministic ordering, byte-stable for fixed inputs.
std::string model_to_json(const MnmModel& model,
                          const std::vector<std::string>& column_names,
                          const nlohmann::ordered_json& meta);

struct LoadedModel {
  MnmModel model;
  std::vector<std::string> column_names;
  nlohmann::json meta;
};
LoadedModel model_from_json(const std::string& text);

// Per-node unaggregated estimates, enough to rebuild the nodewise factor
// graph. Terms are keyed by the variables involved.
std::string nodewise_to_json(const std::vector<NodewiseFit>& fits,
                             const std::vector<std::string>& column_names,
                             const nlohmann::ordered_json& meta);
struct LoadedNodewise {
  std::vector<NodewiseFit> fits;
  std::vector<std::string> column_names;
  nlohmann::json meta;
};
LoadedNodewise nodewise_from_json(const std::string& text);

// CSV: comma-separated, decimal point, no missing values. The header row is
// optional on read; written output always carries one.
RawData read_csv(std::istream& in, bool header);
RawData read_csv_file(const std::string& path, bool header);
void write_csv(std::ostream& out, const Eigen::MatrixXd& values,
               const std::vector<std::string>& column_names);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// %.17g, the "machine format" used in CSV output.
std::string format_full(double v);

}  // namespace modnet
