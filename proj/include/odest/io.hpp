#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "odest/types.hpp"

#include "json.hpp"

namespace odest::io {

using json = nlohmann::json;

/// Shortest decimal form that round-trips a double (printf %.17g).
std::string format_real(double v);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

// --- ODMatrix -------------------------------------------------------------
// CSV form is a plain S x S grid of reals; JSON form is
// {"S": ..., "alpha": [[...]]} with an optional "structural_zeros" mask.

void write_od_matrix_csv(const std::filesystem::path& path, const ODMatrix& m);
ODMatrix read_od_matrix_csv(const std::filesystem::path& path);
void write_od_matrix_json(const std::filesystem::path& path, const ODMatrix& m);
ODMatrix read_od_matrix_json(const std::filesystem::path& path);

// --- Observation tables ----------------------------------------------------
// One file per count matrix. Header row: obs_id,<station labels>; one row per
// observation. Binned sets add a bin_id column (0-based in the file, 1-based
// in memory) and carry their window metadata in a JSON sidecar.

void write_count_matrix_csv(const std::filesystem::path& path, const Mat& m,
                            const std::vector<std::string>& labels);
Mat read_count_matrix_csv(const std::filesystem::path& path, std::vector<std::string>* labels);

void write_observation_set(const std::filesystem::path& x_path,
                           const std::filesystem::path& y_path, const ObservationSet& obs);
ObservationSet read_observation_set(const std::filesystem::path& x_path,
                                    const std::filesystem::path& y_path);

void write_binned_set(const std::filesystem::path& x_path, const std::filesystem::path& y_path,
                      const std::filesystem::path& meta_path, const BinnedObservationSet& b);
BinnedObservationSet read_binned_set(const std::filesystem::path& x_path,
                                     const std::filesystem::path& y_path,
                                     const std::filesystem::path& meta_path);

// --- TravelTimeTable --------------------------------------------------------

void write_delay_table_csv(const std::filesystem::path& path, const TravelTimeTable& t);
TravelTimeTable read_delay_table_csv(const std::filesystem::path& path);

// --- PosteriorDraws ----------------------------------------------------------
// One CSV per chain (chain_1.csv, ...) with a header naming every flattened
// parameter plus divergent, tree_depth and step_size columns, and an
// adaptation.json sidecar.

void write_draws(const std::filesystem::path& dir, const PosteriorDraws& draws);
PosteriorDraws read_draws(const std::filesystem::path& dir);

}  // namespace odest::io
