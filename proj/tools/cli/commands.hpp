#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "reachkit/grid.hpp"

namespace reachkit::cli {

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kUsage = 2, kModel = 3 };

struct SolveOptions {
  std::string config_path;
  unsigned threads = 0;
  /// Overrides the config's output prefix when set.
  std::optional<std::string> output;
};

struct QueryOptions {
  std::string field_path;
  std::vector<double> state;
  double horizon = 0.0;
};

struct ExportOptions {
  std::string field_path;
  std::string format;  // vtk | csv_slice
  std::optional<std::size_t> axis;
  std::optional<std::size_t> index;
  std::optional<std::string> output;
};

struct VerifyOptions {
  std::string config_path;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::optional<std::string> output;
};

int cmd_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err);
int cmd_query(const QueryOptions& opts, std::ostream& out, std::ostream& err);
int cmd_export(const ExportOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err);

/// Paths written by cmd_solve for a given prefix.
std::string field_path_for(const std::string& prefix);
std::string manifest_path_for(const std::string& prefix);

/// Legacy ASCII VTK STRUCTURED_POINTS for fields of up to three dimensions.
void write_vtk(std::ostream& out, const ValueField& field);

/// `x,y,value` rows of a 2-D slice. Three-dimensional fields fix `axis` at
/// `index`; two-dimensional fields are written whole.
void write_csv_slice(std::ostream& out, const ValueField& field, std::optional<std::size_t> axis,
                     std::optional<std::size_t> index);

}  // namespace reachkit::cli
