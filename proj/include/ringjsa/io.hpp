#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ringjsa/measurement.hpp"

namespace ringjsa::io {

/// Binary container: "RINGJSA1", u64 LE header length, JSON header, row axis,
/// column axis, payload; all numbers little-endian float64.
struct Container {
    nlohmann::json header;
    std::vector<double> rows;
    std::vector<double> cols;
    std::vector<double> payload;
};

void write_container(const std::string& path, const Container& c);
Container read_container(const std::string& path);

void write_jsa(const std::string& path, const ComplexJSA& jsa, const nlohmann::json& extra = nlohmann::json::object());
ComplexJSA read_jsa(const std::string& path, nlohmann::json* header = nullptr);

void write_fringes(const std::string& path, const FringeScan& scan, const SpectralGrid& grid, std::uint64_t seed,
                   bool integer_counts);
FringeScan read_fringes(const std::string& path, SpectralGrid* grid = nullptr);

/// CSV with a header row of column wavelengths (nm) and a leading column of
/// row wavelengths (nm). NaN is written as "nan".
void write_map_csv(const std::string& path, const RealMatrix& map, const SpectralGrid& grid, bool integers,
                   const std::string& corner);
RealMatrix read_map_csv(const std::string& path, std::size_t rows, std::size_t cols);

void write_transfer_csv(const std::string& path, const std::vector<TransferSample>& samples);
std::vector<TransferSample> read_transfer_csv(const std::string& path);

/// Measurement directory: campaign.cfg, i_res.csv, i_spi.csv, i_int.csv,
/// fringes.bin, t_h.csv. `provenance` is stored in campaign.cfg as-is.
void write_measurement(const std::string& dir, const MeasurementSet& m,
                       const nlohmann::json& provenance = nlohmann::json::object());
MeasurementSet read_measurement(const std::string& dir, nlohmann::json* cfg = nullptr);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

/// Shortest round-trip decimal text.
std::string format_number(double x);

}  // namespace ringjsa::io
