#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "consflow/graph.hpp"
#include "consflow/harness.hpp"
#include "consflow/linalg.hpp"

namespace consflow {

// File formats. All numeric output is printed with 17 significant digits so
// every written value re-parses to the identical double and traces are
// byte-reproducible fixtures.

/// Format a double with 17 significant digits (%.17g).
std::string format_double(double v);

// ---- Matrix Market (array and coordinate, real general) ----

DenseMatrix read_matrix_market(std::istream& in);
DenseMatrix read_matrix_market_file(const std::string& path);
void write_matrix_market(std::ostream& out, const DenseMatrix& m);
void write_matrix_market_file(const std::string& path, const DenseMatrix& m);

// ---- right-hand side: one decimal per line, '#' comments ----

DenseVector read_rhs(std::istream& in);
DenseVector read_rhs_file(const std::string& path);
void write_rhs(std::ostream& out, const DenseVector& v);
void write_rhs_file(const std::string& path, const DenseVector& v);

// ---- edge list: one "i j" pair per line, 0-based, '#' comments ----
// Vertex count is the largest endpoint + 1; a file with no edges is the
// single-vertex graph. Duplicate pairs in either orientation are rejected.

NetworkGraph read_edge_list(std::istream& in);
NetworkGraph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const NetworkGraph& g);
void write_edge_list_file(const std::string& path, const NetworkGraph& g);

// ---- trace and report documents ----

/// One JSON object per recorded step, fixed field order:
/// step, t, cost_v, spread, residual, oracle_dist (when present).
void write_trace(std::ostream& out, const SimulationTrace& trace);
void write_trace_file(const std::string& path, const SimulationTrace& trace);

/// Single flat JSON document summarizing a run.
void write_run_summary(std::ostream& out, const SimulationTrace& trace,
                       const FlowConfig& config);
void write_run_summary_file(const std::string& path, const SimulationTrace& trace,
                            const FlowConfig& config);

/// Flat key-value document combining the spectral and graph reports.
void write_analysis_report(std::ostream& out, const SpectralReport& spectral,
                           const GraphReport& graph);
void write_analysis_report_file(const std::string& path,
                                const SpectralReport& spectral,
                                const GraphReport& graph);

/// One JSON object per sweep row.
void write_sweep_rows(std::ostream& out, const std::vector<SweepRow>& rows);
void write_sweep_rows_file(const std::string& path,
                           const std::vector<SweepRow>& rows);

}  // namespace consflow
