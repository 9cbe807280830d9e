#include "funkernel/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

namespace funkernel {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

constexpr char kModelMagic[] = "FUNKERNEL";
constexpr std::uint32_t kModelVersion = 1;

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& cell, const std::string& path, std::size_t row,
                    std::size_t col) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end) {
    throw DataError(path + ": non-numeric value '" + cell + "' at row " +
                    std::to_string(row) + ", column " + std::to_string(col));
  }
  return v;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void require_header(const std::vector<std::string>& lines, const std::string& expected,
                    const std::string& path) {
  if (lines.empty() || lines[0] != expected) {
    throw DataError(path + ": expected header '" + expected + "'");
  }
}

}  // namespace

std::pair<std::vector<Eigen::VectorXd>, std::vector<std::string>> encode_discrete(
    const DiscreteTable& table, const std::vector<std::string>& categorical) {
  const auto is_categorical = [&](const std::string& col) {
    return std::find(categorical.begin(), categorical.end(), col) != categorical.end();
  };
  for (const std::string& col : categorical) {
    if (std::find(table.columns.begin(), table.columns.end(), col) ==
        table.columns.end()) {
      throw ConfigError("categorical column '" + col + "' not present in discrete data");
    }
  }

  // Category levels per categorical column, in order of first appearance.
  std::vector<std::vector<std::string>> levels(table.columns.size());
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (!is_categorical(table.columns[c])) continue;
    for (const auto& row : table.rows) {
      if (std::find(levels[c].begin(), levels[c].end(), row[c]) == levels[c].end()) {
        levels[c].push_back(row[c]);
      }
    }
  }

  std::vector<std::string> names;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (is_categorical(table.columns[c])) {
      for (const std::string& lvl : levels[c]) {
        names.push_back(table.columns[c] + "=" + lvl);
      }
    } else {
      names.push_back(table.columns[c]);
    }
  }

  std::vector<Eigen::VectorXd> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.columns.size()) {
      throw DataError("discrete row for sample '" + table.sample_ids[r] +
                      "' has wrong cell count");
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(names.size()));
    Eigen::Index pos = 0;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (is_categorical(table.columns[c])) {
        for (const std::string& lvl : levels[c]) {
          v(pos++) = table.rows[r][c] == lvl ? 1.0 : 0.0;
        }
      } else {
        v(pos++) = parse_number(table.rows[r][c], "discrete data", r + 2, c + 2);
      }
    }
    out.push_back(std::move(v));
  }
  return {std::move(out), std::move(names)};
}

namespace {

struct FunctionalData {
  std::vector<std::string> variables;
  std::vector<GridPtr> grids;
  std::vector<std::string> sample_ids;  // first-appearance order
  // values[var][sample_index_in_sample_ids]
  std::vector<std::map<std::string, Eigen::VectorXd>> values;
};

FunctionalData load_functional_csv(const std::string& path) {
  const auto lines = read_lines(path);
  require_header(lines, "sample_id,variable,s,value", path);
  if (lines.size() < 2) {
    throw DataError(path + ": no covariate rows (empty covariates file)");
  }

  struct Series {
    std::vector<double> s;
    std::vector<double> v;
  };
  std::vector<std::string> variables;
  std::map<std::string, std::map<std::string, Series>> by_var;
  std::vector<std::string> sample_ids;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].empty()) continue;
    const auto cells = split_line(lines[r]);
    if (cells.size() != 4) {
      throw DataError(path + ": expected 4 cells at row " + std::to_string(r + 1));
    }
    const std::string& id = cells[0];
    const std::string& var = cells[1];
    if (by_var.find(var) == by_var.end()) variables.push_back(var);
    Series& series = by_var[var][id];
    if (std::find(sample_ids.begin(), sample_ids.end(), id) == sample_ids.end()) {
      sample_ids.push_back(id);
    }
    series.s.push_back(parse_number(cells[2], path, r + 1, 3));
    series.v.push_back(parse_number(cells[3], path, r + 1, 4));
  }

  FunctionalData out;
  out.variables = variables;
  for (const std::string& var : variables) {
    auto& per_sample = by_var[var];
    // Grid from the first sample carrying this variable, in row order.
    const Series& ref = per_sample.begin()->second;
    GridPtr grid;
    {
      Eigen::VectorXd pts(static_cast<Eigen::Index>(ref.s.size()));
      for (std::size_t l = 0; l < ref.s.size(); ++l) pts(static_cast<Eigen::Index>(l)) = ref.s[l];
      grid = Grid::make(std::move(pts));
    }
    std::map<std::string, Eigen::VectorXd> vals;
    for (auto& [id, series] : per_sample) {
      if (series.s.size() != static_cast<std::size_t>(grid->size())) {
        throw IncompatibleError(path + ": variable '" + var + "' grid mismatch for sample '" +
                                id + "' (different point count)");
      }
      for (std::size_t l = 0; l < series.s.size(); ++l) {
        if (series.s[l] != grid->points()(static_cast<Eigen::Index>(l))) {
          throw IncompatibleError(path + ": variable '" + var +
                                  "' grid mismatch for sample '" + id +
                                  "' at coordinate s = " + format_double(series.s[l]));
        }
      }
      Eigen::VectorXd v(grid->size());
      for (std::size_t l = 0; l < series.v.size(); ++l) v(static_cast<Eigen::Index>(l)) = series.v[l];
      vals.emplace(id, std::move(v));
    }
    out.grids.push_back(grid);
    out.values.push_back(std::move(vals));
  }
  out.sample_ids = std::move(sample_ids);
  return out;
}

}  // namespace

std::pair<std::vector<std::string>, std::vector<Curve>> load_response_csv(
    const std::string& path) {
  const auto lines = read_lines(path);
  require_header(lines, "sample_id,t,value", path);
  std::vector<std::string> ids;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> series;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].empty()) continue;
    const auto cells = split_line(lines[r]);
    if (cells.size() != 3) {
      throw DataError(path + ": expected 3 cells at row " + std::to_string(r + 1));
    }
    if (series.find(cells[0]) == series.end()) ids.push_back(cells[0]);
    auto& [ts, vs] = series[cells[0]];
    ts.push_back(parse_number(cells[1], path, r + 1, 2));
    vs.push_back(parse_number(cells[2], path, r + 1, 3));
  }
  if (ids.empty()) return {{}, {}};

  const auto& ref = series[ids.front()].first;
  Eigen::VectorXd pts(static_cast<Eigen::Index>(ref.size()));
  for (std::size_t l = 0; l < ref.size(); ++l) pts(static_cast<Eigen::Index>(l)) = ref[l];
  GridPtr grid = Grid::make(std::move(pts));

  std::vector<Curve> curves;
  for (const std::string& id : ids) {
    const auto& [ts, vs] = series[id];
    if (ts.size() != static_cast<std::size_t>(grid->size())) {
      throw IncompatibleError(path + ": response grid mismatch for sample '" + id +
                              "' (different point count)");
    }
    for (std::size_t l = 0; l < ts.size(); ++l) {
      if (ts[l] != grid->points()(static_cast<Eigen::Index>(l))) {
        throw IncompatibleError(path + ": response grid mismatch for sample '" + id +
                                "' at coordinate t = " + format_double(ts[l]));
      }
    }
    Eigen::VectorXd v(grid->size());
    for (std::size_t l = 0; l < vs.size(); ++l) v(static_cast<Eigen::Index>(l)) = vs[l];
    curves.emplace_back(grid, std::move(v));
  }
  return {std::move(ids), std::move(curves)};
}

Dataset load_dataset(const DatasetBundle& bundle) {
  FunctionalData fn = load_functional_csv(bundle.covariates_path);

  std::vector<Eigen::VectorXd> xd;
  std::vector<std::string> xd_names;
  std::map<std::string, Eigen::Index> xd_index;
  if (bundle.discrete_path) {
    const auto lines = read_lines(*bundle.discrete_path);
    if (lines.empty() || lines[0].rfind("sample_id", 0) != 0) {
      throw DataError(*bundle.discrete_path + ": expected header starting with sample_id");
    }
    DiscreteTable table;
    const auto header = split_line(lines[0]);
    table.columns.assign(header.begin() + 1, header.end());
    for (std::size_t r = 1; r < lines.size(); ++r) {
      if (lines[r].empty()) continue;
      auto cells = split_line(lines[r]);
      if (cells.size() != header.size()) {
        throw DataError(*bundle.discrete_path + ": wrong cell count at row " +
                        std::to_string(r + 1));
      }
      table.sample_ids.push_back(cells[0]);
      table.rows.emplace_back(cells.begin() + 1, cells.end());
    }
    auto [vecs, names] = encode_discrete(table, bundle.categorical_columns);
    xd = std::move(vecs);
    xd_names = std::move(names);
    for (std::size_t i = 0; i < table.sample_ids.size(); ++i) {
      xd_index[table.sample_ids[i]] = static_cast<Eigen::Index>(i);
    }
    for (const std::string& id : table.sample_ids) {
      if (std::find(fn.sample_ids.begin(), fn.sample_ids.end(), id) ==
          fn.sample_ids.end()) {
        throw DataError("sample_id '" + id + "' appears in discrete data but not in covariates");
      }
    }
  }

  std::map<std::string, Eigen::Index> y_index;
  std::vector<Curve> responses;
  GridPtr t_grid;
  if (bundle.response_path) {
    auto [ids, curves] = load_response_csv(*bundle.response_path);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      y_index[ids[i]] = static_cast<Eigen::Index>(i);
      if (std::find(fn.sample_ids.begin(), fn.sample_ids.end(), ids[i]) ==
          fn.sample_ids.end()) {
        throw DataError("sample_id '" + ids[i] + "' appears in responses but not in covariates");
      }
    }
    responses = std::move(curves);
    if (!responses.empty()) t_grid = responses.front().grid;
  }

  Dataset ds;
  ds.variables = fn.variables;
  ds.s_grids = fn.grids;
  ds.t_grid = t_grid;
  ds.xd_names = xd_names;
  for (const std::string& id : fn.sample_ids) {
    Sample s;
    s.id = id;
    if (bundle.discrete_path) {
      auto it = xd_index.find(id);
      if (it == xd_index.end()) {
        throw DataError("sample_id '" + id + "' missing from discrete data");
      }
      s.xd = xd[static_cast<std::size_t>(it->second)];
    } else {
      s.xd = Eigen::VectorXd(0);
    }
    for (std::size_t q = 0; q < fn.variables.size(); ++q) {
      auto it = fn.values[q].find(id);
      if (it == fn.values[q].end()) {
        throw DataError("sample_id '" + id + "' missing variable '" + fn.variables[q] + "'");
      }
      s.xc.emplace_back(fn.grids[q], it->second);
    }
    if (bundle.response_path) {
      auto it = y_index.find(id);
      if (it == y_index.end()) {
        throw DataError("sample_id '" + id + "' missing from responses");
      }
      s.y = responses[static_cast<std::size_t>(it->second)];
    }
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

TrainingSet to_training_set(const Dataset& ds) {
  if (!ds.t_grid) throw DataError("dataset has no responses; cannot build a training set");
  TrainingSet ts{ds.samples, ds.s_grids, ds.t_grid};
  ts.validate();
  return ts;
}

void save_functional_csv(const std::string& path, const std::vector<Sample>& samples,
                         const std::vector<std::string>& variables) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "sample_id,variable,s,value\n";
  for (std::size_t q = 0; q < variables.size(); ++q) {
    for (const Sample& s : samples) {
      const Curve& c = s.xc.at(q);
      for (Eigen::Index l = 0; l < c.grid->size(); ++l) {
        out << s.id << ',' << variables[q] << ',' << format_double(c.grid->points()(l))
            << ',' << format_double(c.values(l)) << '\n';
      }
    }
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

void save_discrete_csv(const std::string& path, const DiscreteTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "sample_id";
  for (const std::string& col : table.columns) out << ',' << col;
  out << '\n';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out << table.sample_ids[r];
    for (const std::string& cell : table.rows[r]) out << ',' << cell;
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

void save_response_csv(const std::string& path, const std::vector<std::string>& ids,
                       const std::vector<Curve>& curves) {
  if (ids.size() != curves.size()) {
    throw IncompatibleError("id/curve count mismatch when writing '" + path + "'");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "sample_id,t,value\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (Eigen::Index l = 0; l < curves[i].grid->size(); ++l) {
      out << ids[i] << ',' << format_double(curves[i].grid->points()(l)) << ','
          << format_double(curves[i].values(l)) << '\n';
    }
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

Metrics evaluate(const std::vector<Curve>& pred, const std::vector<Curve>& truth) {
  if (pred.size() != truth.size()) {
    throw IncompatibleError("prediction/truth counts differ (" +
                            std::to_string(pred.size()) + " vs " +
                            std::to_string(truth.size()) + ")");
  }
  if (pred.empty()) throw DataError("nothing to evaluate");
  Metrics m;
  const GridPtr grid = truth.front().grid;
  m.per_t_mse = Eigen::VectorXd::Zero(grid->size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    require_same_grid(pred[i], truth[i]);
    if (!same_grid(*truth[i].grid, *grid)) {
      throw IncompatibleError("evaluation curves are on mixed grids");
    }
    const Eigen::ArrayXd r = pred[i].values.array() - truth[i].values.array();
    m.ise.push_back((grid->weights().array() * r * r).sum());
    m.per_t_mse.array() += r * r;
  }
  m.per_t_mse /= static_cast<double>(pred.size());
  double total = 0.0;
  for (double v : m.ise) total += v;
  m.mean_ise = total / static_cast<double>(m.ise.size());
  m.root_mean_ise = std::sqrt(m.mean_ise);
  return m;
}

Eigen::VectorXd center_responses(TrainingSet& ts) {
  ts.validate();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(ts.m());
  for (const Sample& s : ts.samples) mean += s.y->values;
  mean /= static_cast<double>(ts.n());
  for (Sample& s : ts.samples) {
    s.y = Curve(ts.t_grid, s.y->values - mean);
  }
  return mean;
}

nlohmann::json kernel_to_json(const KernelConfig& cfg) {
  return {{"sigma_d", cfg.sigma_d},
          {"functional", to_string(cfg.functional)},
          {"sigma_c", cfg.sigma_c},
          {"sigma_y", cfg.sigma_y},
          {"operator", to_string(cfg.op)}};
}

KernelConfig kernel_from_json(const nlohmann::json& j) {
  KernelConfig cfg;
  if (j.contains("sigma_d")) cfg.sigma_d = j.at("sigma_d").get<double>();
  if (j.contains("functional")) {
    cfg.functional = functional_kernel_from_string(j.at("functional").get<std::string>());
  }
  if (j.contains("sigma_c")) cfg.sigma_c = j.at("sigma_c").get<double>();
  if (j.contains("sigma_y")) cfg.sigma_y = j.at("sigma_y").get<double>();
  if (j.contains("operator")) {
    cfg.op = operator_type_from_string(j.at("operator").get<std::string>());
  }
  cfg.validate();
  return cfg;
}

namespace {

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  }
  return v;
}

template <typename T>
void write_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (!in) throw DataError("model file truncated");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(bytes[i]) << (8 * i);
  }
  return value;
}

}  // namespace

void save_model(const FittedModel& model, const std::string& path) {
  nlohmann::json j;
  j["t_grid"] = vector_to_json(model.t_grid->points());
  nlohmann::json sg = nlohmann::json::array();
  for (const GridPtr& g : model.s_grids) sg.push_back(vector_to_json(g->points()));
  j["s_grids"] = sg;
  j["kernel"] = kernel_to_json(model.kernel);
  j["lambda"] = model.lambda;
  nlohmann::json alpha = nlohmann::json::array();
  for (Eigen::Index i = 0; i < model.alpha.rows(); ++i) {
    alpha.push_back(vector_to_json(model.alpha.row(i).transpose()));
  }
  j["alpha"] = alpha;
  nlohmann::json training = nlohmann::json::array();
  for (const Sample& s : model.training) {
    nlohmann::json xc = nlohmann::json::array();
    for (const Curve& c : s.xc) xc.push_back(vector_to_json(c.values));
    training.push_back({{"id", s.id}, {"xd", vector_to_json(s.xd)}, {"xc", xc}});
  }
  j["training"] = training;
  j["y_offset"] = model.y_offset ? vector_to_json(*model.y_offset) : nlohmann::json();
  j["diagnostics"] = {{"residual_norm", model.diagnostics.residual_norm},
                      {"relative_residual", model.diagnostics.relative_residual},
                      {"iterations", model.diagnostics.iterations},
                      {"jitter_used", model.diagnostics.jitter_used},
                      {"solver", model.diagnostics.solver}};

  const std::string payload = j.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(kModelMagic, sizeof(kModelMagic) - 1);
  write_le<std::uint32_t>(out, kModelVersion);
  write_le<std::uint64_t>(out, payload.size());
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  write_le<std::uint64_t>(out, fnv1a(payload));
  if (!out) throw IoError("write failed for '" + path + "'");
}

FittedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  char magic[sizeof(kModelMagic) - 1];
  in.read(magic, sizeof(magic));
  if (!in || std::string(magic, sizeof(magic)) != kModelMagic) {
    throw DataError("'" + path + "' is not a model file (bad magic)");
  }
  const auto version = read_le<std::uint32_t>(in);
  if (version != kModelVersion) {
    throw DataError("unsupported model format version " + std::to_string(version) +
                    " (this build reads version " + std::to_string(kModelVersion) + ")");
  }
  const auto size = read_le<std::uint64_t>(in);
  std::string payload(size, '\0');
  in.read(payload.data(), static_cast<std::streamsize>(size));
  if (!in) throw DataError("model file truncated");
  const auto checksum = read_le<std::uint64_t>(in);
  if (checksum != fnv1a(payload)) {
    throw DataError("model file checksum mismatch (corrupt file)");
  }

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(payload);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model payload parse error: ") + e.what());
  }

  FittedModel model;
  model.t_grid = Grid::make(vector_from_json(j.at("t_grid")));
  for (const auto& g : j.at("s_grids")) {
    model.s_grids.push_back(Grid::make(vector_from_json(g)));
  }
  model.kernel = kernel_from_json(j.at("kernel"));
  model.lambda = j.at("lambda").get<double>();
  const auto& alpha = j.at("alpha");
  model.alpha = Eigen::MatrixXd(static_cast<Eigen::Index>(alpha.size()),
                                model.t_grid->size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    model.alpha.row(static_cast<Eigen::Index>(i)) =
        vector_from_json(alpha[i]).transpose();
  }
  for (const auto& s : j.at("training")) {
    Sample sample;
    sample.id = s.at("id").get<std::string>();
    sample.xd = vector_from_json(s.at("xd"));
    const auto& xc = s.at("xc");
    for (std::size_t q = 0; q < xc.size(); ++q) {
      sample.xc.emplace_back(model.s_grids.at(q), vector_from_json(xc[q]));
    }
    model.training.push_back(std::move(sample));
  }
  if (!j.at("y_offset").is_null()) {
    model.y_offset = vector_from_json(j.at("y_offset"));
  }
  const auto& d = j.at("diagnostics");
  model.diagnostics.residual_norm = d.at("residual_norm").get<double>();
  model.diagnostics.relative_residual = d.at("relative_residual").get<double>();
  model.diagnostics.iterations = d.at("iterations").get<int>();
  model.diagnostics.jitter_used = d.at("jitter_used").get<double>();
  model.diagnostics.solver = d.at("solver").get<std::string>();
  return model;
}

}  // namespace funkernel
