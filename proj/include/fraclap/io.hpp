#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fraclap/estimates.hpp"
#include "fraclap/model.hpp"
#include "fraclap/potentials.hpp"
#include "fraclap/spectral.hpp"

namespace fraclap {

using Json = nlohmann::ordered_json;

/// %.17g formatting used in every CSV/plot file.
std::string format_double(double v);

Json graph_to_json(const ApproxGraph& graph);
void write_graph_json(const ApproxGraph& graph, const std::string& path);

void write_basis_binary(const SpectralBasis& basis, const std::string& path);
SpectralBasis read_basis_binary(const std::string& path);

void write_eigenvalues_csv(const SpectralBasis& basis, const std::string& path);
void write_matrix_csv(const Matrix& m, const std::string& path);  // row,col,value

void write_kernel_binary(const KernelField& kf, const std::string& path_prefix);
KernelField read_kernel_binary(const std::string& path_prefix);
void write_kernel_csv(const KernelField& kf, const std::string& path);

Json report_to_json(const BoundReport& report);
BoundReport report_from_json(const Json& j);
void write_reports_json(const Json& bundle, const std::string& path);
void write_reports_csv(const std::vector<BoundReport>& reports, const std::string& path);

/// Two-column whitespace-delimited plot data.
void write_plot_data(const std::vector<std::pair<double, double>>& rows,
                     const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace fraclap
