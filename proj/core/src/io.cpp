#include "gsb/io.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

namespace gsb {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string CsvTable::payload() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += columns[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

namespace {

std::string timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

} // namespace

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) throw Error("config-error", "cannot write " + path.string());
    out << "# generated " << timestamp_now() << '\n' << table.payload();
}

std::string json_payload(const Json& summary) {
    return summary.dump(2) + "\n";
}

void write_json(const std::filesystem::path& path, const Json& summary) {
    Json stamped;
    stamped["generated_at"] = timestamp_now();
    for (const auto& [key, value] : summary.items()) stamped[key] = value;
    std::ofstream out(path);
    if (!out) throw Error("config-error", "cannot write " + path.string());
    out << stamped.dump(2) << '\n';
}

Json basis_sector_table(const FockBasis& basis) {
    Json table;
    table["schema_version"] = kSchemaVersion;
    table["mode_count"] = basis.mode_count();
    table["n_max"] = basis.max_particles();
    table["dimension"] = basis.dimension();
    Json sectors = Json::array();
    for (int n = 0; n <= basis.max_particles(); ++n) {
        const auto [b, e] = basis.sector_range(n);
        Json s;
        s["n"] = n;
        s["begin"] = b;
        s["dimension"] = e - b;
        sectors.push_back(s);
    }
    table["sectors"] = sectors;
    return table;
}

void export_coordinate(const std::filesystem::path& path, const SparseMatrix& m) {
    std::ofstream out(path);
    if (!out) throw Error("config-error", "cannot write " + path.string());
    out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it)
            out << it.row() << ' ' << it.col() << ' '
                << format_double(it.value().real()) << ' '
                << format_double(it.value().imag()) << '\n';
}

} // namespace gsb
