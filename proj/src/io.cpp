#include "countshrink/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "countshrink/errors.hpp"

namespace countshrink {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw ValidationError("line " + std::to_string(line) + ": " + what);
}

double parse_real(std::string_view field, std::size_t line, std::string_view column) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || end != field.data() + field.size() || !std::isfinite(v)) {
    fail(line, "column '" + std::string(column) + "' is not a finite number: '" + std::string(field) + "'");
  }
  return v;
}

std::int64_t parse_count(std::string_view field, std::size_t line) {
  std::int64_t v = 0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || end != field.data() + field.size()) {
    fail(line, "column 'y' is not an integer count: '" + std::string(field) + "'");
  }
  if (v < 0) fail(line, "negative count " + std::to_string(v));
  return v;
}

bool blank(std::string_view s) { return trim(s).empty(); }

}  // namespace

std::string_view library_version() { return COUNTSHRINK_VERSION; }

std::string format_real(double x) {
  if (std::isnan(x)) return "NA";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

CountCsv read_count_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    for (auto f : split_fields(line)) header.emplace_back(f);
    break;
  }
  if (header.empty()) throw ValidationError("input has no header row");
  if (header.size() < 2 || header[0] != "id" || header[1] != "y") {
    fail(line_no, "header must start with 'id,y'");
  }
  const bool has_offset = header.size() > 2 && header[2] == "offset";
  const std::size_t first_cov = has_offset ? 3 : 2;

  CountCsv out;
  out.covariate_names.assign(header.begin() + static_cast<std::ptrdiff_t>(first_cov), header.end());
  const std::size_t p = out.covariate_names.size();
  std::vector<std::vector<double>> cov_rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      fail(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                        std::to_string(fields.size()));
    }
    if (fields[0].empty()) fail(line_no, "empty id");
    out.data.ids.emplace_back(fields[0]);
    out.data.y.push_back(parse_count(fields[1], line_no));
    double a = 1.0;
    if (has_offset) {
      a = parse_real(fields[2], line_no, "offset");
      if (!(a > 0.0)) fail(line_no, "offset must be positive");
    }
    out.data.offset.push_back(a);
    std::vector<double> row(p);
    for (std::size_t k = 0; k < p; ++k) {
      row[k] = parse_real(fields[first_cov + k], line_no, header[first_cov + k]);
    }
    cov_rows.push_back(std::move(row));
  }
  if (out.data.y.empty()) throw ValidationError("input has no data rows");
  if (p > 0) {
    out.data.covariates.resize(static_cast<Eigen::Index>(cov_rows.size()), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < cov_rows.size(); ++i) {
      for (std::size_t k = 0; k < p; ++k) {
        out.data.covariates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = cov_rows[i][k];
      }
    }
  }
  out.data.validate();
  return out;
}

CountCsv read_count_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return read_count_csv(in);
}

void write_count_csv(std::ostream& out, const CountDataset& data,
                     const std::vector<std::string>& covariate_names) {
  const auto p = static_cast<std::size_t>(data.covariates.cols());
  out << "id,y,offset";
  for (std::size_t k = 0; k < p; ++k) {
    out << ',' << (k < covariate_names.size() ? covariate_names[k] : "x" + std::to_string(k + 1));
  }
  out << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << (data.ids.empty() ? std::to_string(i + 1) : data.ids[i]) << ',' << data.y[i] << ','
        << format_real(data.offset[i]);
    for (std::size_t k = 0; k < p; ++k) {
      out << ',' << format_real(data.covariates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
    }
    out << '\n';
  }
}

void write_draws_csv(std::ostream& out, const PosteriorDraws& draws) {
  const auto& names = draws.names();
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << '\n';
  for (std::size_t t = 0; t < draws.n_draws(); ++t) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      out << (j ? "," : "") << format_real(draws.column(j)[t]);
    }
    out << '\n';
  }
}

PosteriorDraws read_draws_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> names;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    for (auto f : split_fields(line)) names.emplace_back(f);
    break;
  }
  if (names.empty()) throw ValidationError("draws file has no header row");
  PosteriorDraws draws(names, 0);
  std::vector<double> row(names.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != names.size()) {
      fail(line_no, "expected " + std::to_string(names.size()) + " fields, found " +
                        std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < names.size(); ++j) row[j] = parse_real(fields[j], line_no, names[j]);
    draws.append_row(row);
  }
  if (draws.n_draws() == 0) throw ValidationError("draws file has no rows");
  return draws;
}

void write_summary_csv(std::ostream& out, std::span<const ParameterSummary> rows,
                       const std::vector<std::string>& ids) {
  out << "parameter,id,mean,sd,q025,q975,inefficiency_factor,n_draws\n";
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto& r = rows[j];
    std::string id;
    if (r.name.rfind("lambda_", 0) == 0) {
      const std::size_t i = std::stoul(r.name.substr(7)) - 1;
      id = i < ids.size() ? ids[i] : std::to_string(i + 1);
    }
    out << r.name << ',' << id << ',' << format_real(r.mean) << ',' << format_real(r.sd) << ','
        << format_real(r.q025) << ',' << format_real(r.q975) << ','
        << format_real(r.inefficiency_factor) << ',' << r.n_draws << '\n';
  }
}

void write_grid_csv(std::ostream& out, std::string_view x_name, std::span<const double> x,
                    std::span<const double> value) {
  if (x.size() != value.size()) throw DomainError("value", "grid and values differ in length");
  out << x_name << ",value\n";
  for (std::size_t i = 0; i < x.size(); ++i) out << format_real(x[i]) << ',' << format_real(value[i]) << '\n';
}

void write_bias_csv(std::ostream& out, const BiasCurve& curve) {
  out << "y,estimate,bias,relative\n";
  for (std::size_t i = 0; i < curve.y_values.size(); ++i) {
    out << format_real(curve.y_values[i]) << ',' << format_real(curve.estimate[i]) << ','
        << format_real(curve.bias[i]) << ',' << format_real(curve.relative[i]) << '\n';
  }
}

void write_metric_table(std::ostream& out, const MetricTable& table) {
  std::vector<Method> methods;
  for (const auto& e : table.entries) {
    if (std::find(methods.begin(), methods.end(), e.method) == methods.end()) methods.push_back(e.method);
  }
  out << "scenario,omega,metric";
  for (Method m : methods) out << ',' << to_string(m);
  out << '\n';

  using Getter = double (*)(const MetricRow&);
  const std::pair<const char*, Getter> metrics[] = {
      {"MSE-n", [](const MetricRow& r) { return r.mse_n; }},
      {"MSE-o", [](const MetricRow& r) { return r.mse_o; }},
      {"MAPE-n", [](const MetricRow& r) { return r.mape_n; }},
      {"MAPE-o", [](const MetricRow& r) { return r.mape_o; }},
      {"CP-n", [](const MetricRow& r) { return r.cp_n; }},
      {"CP-o", [](const MetricRow& r) { return r.cp_o; }},
      {"AL-n", [](const MetricRow& r) { return r.al_n; }},
      {"AL-o", [](const MetricRow& r) { return r.al_o; }},
  };
  std::vector<std::pair<ScenarioId, double>> cells;
  for (const auto& e : table.entries) {
    const std::pair<ScenarioId, double> c{e.scenario, e.omega};
    if (std::find(cells.begin(), cells.end(), c) == cells.end()) cells.push_back(c);
  }
  for (const auto& [s, omega] : cells) {
    for (const auto& [name, get] : metrics) {
      out << to_string(s) << ',' << format_real(omega) << ',' << name;
      for (Method m : methods) out << ',' << format_real(get(table.at(s, omega, m).mean));
      out << '\n';
    }
  }
}

void write_study_details(std::ostream& out, const MetricTable& table) {
  out << "scenario,omega,method,replicates,failures,mean_inefficiency,mean_fit_seconds,"
         "n_normal,n_outlier,mape_excluded,mse_all\n";
  for (const auto& e : table.entries) {
    out << to_string(e.scenario) << ',' << format_real(e.omega) << ',' << to_string(e.method) << ','
        << e.replicates << ',' << e.failures << ',' << format_real(e.mean_inefficiency) << ','
        << format_real(e.mean_fit_seconds) << ',' << e.mean.n_normal << ',' << e.mean.n_outlier
        << ',' << e.mean.mape_excluded << ',' << format_real(e.mean.mse_all) << '\n';
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw ValidationError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

}  // namespace countshrink
