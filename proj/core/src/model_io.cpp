#include "modnet/model_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace modnet {

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string model_to_json(const MnmModel& model,
                          const std::vector<std::string>& column_names,
                          const nlohmann::ordered_json& meta) {
  if (!column_names.empty() && static_cast<int>(column_names.size()) != model.p)
    throw DataError("model_to_json: column name count mismatch");
  nlohmann::ordered_json j;
  j["p"] = model.p;
  j["column_names"] = column_names;
  j["alpha"] = std::vector<double>(model.alpha.data(), model.alpha.data() + model.p);
  auto beta = nlohmann::ordered_json::array();
  for (const auto& [key, v] : model.beta) {
    nlohmann::ordered_json e;
    e["i"] = key.first;
    e["j"] = key.second;
    e["value"] = v;
    beta.push_back(std::move(e));
  }
  j["beta"] = std::move(beta);
  auto omega = nlohmann::ordered_json::array();
  for (const auto& [key, v] : model.omega) {
    nlohmann::ordered_json e;
    e["i"] = key[0];
    e["j"] = key[1];
    e["q"] = key[2];
    e["value"] = v;
    omega.push_back(std::move(e));
  }
  j["omega"] = std::move(omega);
  j["sigma"] = std::vector<double>(model.sigma.data(), model.sigma.data() + model.p);
  j["meta"] = meta;
  return j.dump(2) + "\n";
}

namespace {

nlohmann::json parse_json(const std::string& text, const char* what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

LoadedModel model_from_json(const std::string& text) {
  const nlohmann::json j = parse_json(text, "model json");
  LoadedModel out;
  try {
    const int p = j.at("p").get<int>();
    out.model = MnmModel::empty(p);
    out.column_names = j.at("column_names").get<std::vector<std::string>>();
    const auto alpha = j.at("alpha").get<std::vector<double>>();
    const auto sigma = j.at("sigma").get<std::vector<double>>();
    if (static_cast<int>(alpha.size()) != p || static_cast<int>(sigma.size()) != p)
      throw DataError("model json: alpha/sigma length mismatch");
    for (int i = 0; i < p; ++i) {
      out.model.alpha(i) = alpha[static_cast<std::size_t>(i)];
      out.model.sigma(i) = sigma[static_cast<std::size_t>(i)];
    }
    for (const auto& e : j.at("beta"))
      out.model.set_beta(e.at("i").get<int>(), e.at("j").get<int>(),
                         e.at("value").get<double>());
    for (const auto& e : j.at("omega"))
      out.model.set_omega(e.at("i").get<int>(), e.at("j").get<int>(),
                          e.at("q").get<int>(), e.at("value").get<double>());
    if (j.contains("meta")) out.meta = j.at("meta");
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model json: ") + e.what());
  }
  return out;
}

std::string nodewise_to_json(const std::vector<NodewiseFit>& fits,
                             const std::vector<std::string>& column_names,
                             const nlohmann::ordered_json& meta) {
  nlohmann::ordered_json j;
  j["p"] = static_cast<int>(fits.size());
  j["column_names"] = column_names;
  auto nodes = nlohmann::ordered_json::array();
  for (const auto& f : fits) {
    nlohmann::ordered_json jn;
    jn["node"] = f.node;
    jn["lambda"] = f.selected.lambda;
    jn["intercept"] = f.selected.intercept;
    jn["sigma"] = f.sigma_resid;
    auto terms = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < f.term_ids.size(); ++k) {
      const TermId& id = f.term_ids[k];
      nlohmann::ordered_json jt;
      auto vars = nlohmann::ordered_json::array();
      for (int i = 0; i < id.order(); ++i) vars.push_back(id.idx[i]);
      jt["kind"] = id.kind == TermKind::Main ? "main" : "threeway";
      jt["vars"] = std::move(vars);
      jt["value"] = f.coefficients(static_cast<int>(k));
      terms.push_back(std::move(jt));
    }
    jn["terms"] = std::move(terms);
    nodes.push_back(std::move(jn));
  }
  j["nodes"] = std::move(nodes);
  j["meta"] = meta;
  return j.dump(2) + "\n";
}

LoadedNodewise nodewise_from_json(const std::string& text) {
  const nlohmann::json j = parse_json(text, "nodewise json");
  LoadedNodewise out;
  try {
    out.column_names = j.at("column_names").get<std::vector<std::string>>();
    for (const auto& jn : j.at("nodes")) {
      NodewiseFit f;
      f.node = jn.at("node").get<int>();
      f.selected.lambda = jn.at("lambda").get<double>();
      f.selected.intercept = jn.at("intercept").get<double>();
      f.sigma_resid = jn.at("sigma").get<double>();
      std::vector<double> coefs;
      for (const auto& jt : jn.at("terms")) {
        const auto vars = jt.at("vars").get<std::vector<int>>();
        const std::string kind = jt.at("kind").get<std::string>();
        if (kind == "main" && vars.size() == 1)
          f.term_ids.push_back(TermId::main(vars[0]));
        else if (kind == "threeway" && vars.size() == 3)
          f.term_ids.push_back(TermId::threeway(vars[0], vars[1], vars[2]));
        else
          throw DataError("nodewise json: malformed term");
        coefs.push_back(jt.at("value").get<double>());
      }
      f.coefficients =
          Eigen::Map<Eigen::VectorXd>(coefs.data(), static_cast<int>(coefs.size()));
      f.selected.coefficients = f.coefficients;
      f.selected.df = static_cast<int>((f.coefficients.array() != 0.0).count());
      out.fits.push_back(std::move(f));
    }
    if (j.contains("meta")) out.meta = j.at("meta");
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("nodewise json: ") + e.what());
  }
  return out;
}

namespace {

double parse_field(const std::string& field, int row, int col) {
  std::size_t begin = 0, end = field.size();
  while (begin < end && (field[begin] == ' ' || field[begin] == '\t')) ++begin;
  while (end > begin && (field[end - 1] == ' ' || field[end - 1] == '\t' ||
                         field[end - 1] == '\r'))
    --end;
  if (begin == end)
    throw DataError("csv: missing value at row " + std::to_string(row) + ", column " +
                    std::to_string(col));
  double value = 0.0;
  const auto res = std::from_chars(field.data() + begin, field.data() + end, value);
  if (res.ec != std::errc() || res.ptr != field.data() + end)
    throw DataError("csv: cannot parse '" + field.substr(begin, end - begin) +
                    "' at row " + std::to_string(row) + ", column " + std::to_string(col));
  return value;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

RawData read_csv(std::istream& in, bool header) {
  RawData out;
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const auto fields = split_line(line);
    if (header && out.column_names.empty() && rows.empty()) {
      for (const auto& f : fields) out.column_names.push_back(strip_cr(f));
      width = fields.size();
      continue;
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width)
      throw DataError("csv: row " + std::to_string(lineno) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(width));
    std::vector<double> row;
    row.reserve(width);
    for (std::size_t c = 0; c < fields.size(); ++c)
      row.push_back(parse_field(fields[c], lineno, static_cast<int>(c + 1)));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("csv: no data rows");
  out.values.resize(static_cast<int>(rows.size()), static_cast<int>(width));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c)
      out.values(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
  if (out.column_names.empty())
    for (std::size_t c = 1; c <= width; ++c)
      out.column_names.push_back("X" + std::to_string(c));
  out.validate();
  return out;
}

RawData read_csv_file(const std::string& path, bool header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  return read_csv(in, header);
}

void write_csv(std::ostream& out, const Eigen::MatrixXd& values,
               const std::vector<std::string>& column_names) {
  for (std::size_t c = 0; c < column_names.size(); ++c)
    out << (c ? "," : "") << column_names[c];
  if (!column_names.empty()) out << "\n";
  for (int r = 0; r < values.rows(); ++r) {
    for (int c = 0; c < values.cols(); ++c)
      out << (c ? "," : "") << format_full(values(r, c));
    out << "\n";
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << text;
}

}  // namespace modnet
