#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "countshrink/data.hpp"
#include "countshrink/diagnostics.hpp"
#include "countshrink/mcmc.hpp"
#include "countshrink/oracle.hpp"
#include "countshrink/simstudy.hpp"

namespace countshrink {

std::string_view library_version();

// Shortest text that round-trips: 17 significant digits, "NA" for NaN.
std::string format_real(double x);

struct CountCsv {
  CountDataset data;
  std::vector<std::string> covariate_names;
};

// Header row required. Columns: id, y, then optional offset, then any number
// of covariate columns. Blank lines are skipped. Errors carry the line number.
CountCsv read_count_csv(std::istream& in);
CountCsv read_count_csv(const std::filesystem::path& path);

void write_count_csv(std::ostream& out, const CountDataset& data,
                     const std::vector<std::string>& covariate_names = {});

void write_draws_csv(std::ostream& out, const PosteriorDraws& draws);

// Reads a draws file back: header of parameter names, one row per draw.
PosteriorDraws read_draws_csv(std::istream& in);

void write_summary_csv(std::ostream& out, std::span<const ParameterSummary> rows,
                       const std::vector<std::string>& ids = {});

// Columns: x, value. x is lambda for density grids.
void write_grid_csv(std::ostream& out, std::string_view x_name, std::span<const double> x,
                    std::span<const double> value);

void write_bias_csv(std::ostream& out, const BiasCurve& curve);

// One block of eight metric rows (MSE-n, MSE-o, MAPE-n, MAPE-o, CP-n, CP-o,
// AL-n, AL-o) per (scenario, omega) cell, one column per method.
void write_metric_table(std::ostream& out, const MetricTable& table);

// Replicate counts, failures, inefficiency and timing per cell and method.
void write_study_details(std::ostream& out, const MetricTable& table);

// Opens for writing, creating parent directories; throws ValidationError.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace countshrink
