// io.hpp — deterministic CSV/JSON writers and matrix export. Every data file
// starts with a single timestamp header line; the payload below it is
// byte-reproducible for a fixed seed.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "gsb/fock_space.hpp"
#include "gsb/types.hpp"

namespace gsb {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// 17-significant-digit decimal form, stable across runs.
std::string format_double(double x);

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string payload() const;   // header + rows, no timestamp line
};

/// Writes "# generated <timestamp>" followed by the payload.
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Serializes with "generated_at" injected as the first key so the timestamp
/// occupies exactly one line of the pretty-printed output.
std::string json_payload(const Json& summary);
void write_json(const std::filesystem::path& path, const Json& summary);

/// Basis dimension/sector table for test tooling.
Json basis_sector_table(const FockBasis& basis);

/// Coordinate text export: "rows cols nnz" then "i j re im" per entry,
/// zero-based indices, deterministic column-major order.
void export_coordinate(const std::filesystem::path& path, const SparseMatrix& m);

} // namespace gsb
