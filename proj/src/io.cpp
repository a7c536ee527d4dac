#include "csfs/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace csfs {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw_cli("E_IO", "cannot open output file: " + path);
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) {
        while (!item.empty() && (item.back() == '\r' || item.back() == ' ')) item.pop_back();
        while (!item.empty() && item.front() == ' ') item.erase(item.begin());
        fields.push_back(item);
    }
    return fields;
}

double parse_field(const std::string& s, const std::string& path, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw_cli("E_CSV", path + ": malformed number '" + s + "' on line " +
                               std::to_string(line_no));
    }
}

}  // namespace

void throw_cli(const std::string& code, const std::string& message) {
    throw CliError{code, message};
}

int exit_code_for(const std::string& code) {
    if (code == "E_FLAGS") return 2;
    if (code == "E_KERNEL") return 3;
    if (code == "E_CONFIG") return 4;
    if (code == "E_CSV") return 5;
    if (code == "E_DIM") return 6;
    if (code == "E_IO") return 7;
    return 1;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_grid_csv(const std::string& path, const SphericalGrid& grid) {
    std::ofstream out = open_out(path);
    out << "x,y,z,area\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
        out << format_double(grid.centers[i].x) << ',' << format_double(grid.centers[i].y) << ','
            << format_double(grid.centers[i].z) << ',' << format_double(grid.areas[i]) << '\n';
}

void write_potentials_csv(const std::string& path, const std::vector<Vec3>& points,
                          const PotentialField& field) {
    std::ofstream out = open_out(path);
    out << (field.out_dim == 1 ? "x,y,z,phi" : "x,y,z,phi,phi_y,phi_z") << '\n';
    for (std::size_t i = 0; i < points.size(); ++i) {
        out << format_double(points[i].x) << ',' << format_double(points[i].y) << ','
            << format_double(points[i].z);
        for (int d = 0; d < field.out_dim; ++d) out << ',' << format_double(field.at(i)[d]);
        out << '\n';
    }
}

void write_bve_csv(const std::string& path, const BveState& state) {
    std::ofstream out = open_out(path);
    out << (state.tracer.empty() ? "x,y,z,zeta" : "x,y,z,zeta,tracer") << '\n';
    for (std::size_t i = 0; i < state.positions.size(); ++i) {
        out << format_double(state.positions[i].x) << ',' << format_double(state.positions[i].y)
            << ',' << format_double(state.positions[i].z) << ','
            << format_double(state.zeta[i]);
        if (!state.tracer.empty()) out << ',' << format_double(state.tracer[i]);
        out << '\n';
    }
}

void write_field_csv(const std::string& path, const ScalarFieldOnGrid& field) {
    std::ofstream out = open_out(path);
    out << "lon,lat,area,value\n";
    for (std::size_t i = 0; i < field.size(); ++i) {
        const Vec3& p = field.points[i];
        const double lon = std::atan2(p.y, p.x) * 180.0 / kPi;
        const double lat = std::asin(std::clamp(p.z, -1.0, 1.0)) * 180.0 / kPi;
        out << format_double(lon) << ',' << format_double(lat) << ','
            << format_double(field.areas[i]) << ',' << format_double(field.values[i]) << '\n';
    }
}

namespace {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::string& path, std::size_t n_cols) {
    std::ifstream in(path);
    if (!in) throw_cli("E_IO", "cannot open input file: " + path);
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (line_no == 1) {
            table.header = fields;
            continue;
        }
        if (fields.size() != n_cols)
            throw_cli("E_CSV", path + ": expected " + std::to_string(n_cols) +
                                   " columns on line " + std::to_string(line_no));
        std::vector<double> row(n_cols);
        for (std::size_t c = 0; c < n_cols; ++c) row[c] = parse_field(fields[c], path, line_no);
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw_cli("E_CSV", path + ": missing header line");
    return table;
}

bool header_is(const std::vector<std::string>& header, std::initializer_list<const char*> want) {
    if (header.size() != want.size()) return false;
    std::size_t i = 0;
    for (const char* w : want)
        if (header[i++] != w) return false;
    return true;
}

Vec3 from_lonlat_deg(double lon, double lat) {
    const double lo = lon * kPi / 180.0, la = lat * kPi / 180.0;
    return {std::cos(la) * std::cos(lo), std::cos(la) * std::sin(lo), std::sin(la)};
}

}  // namespace

ParticleSet read_particles_csv(const std::string& path) {
    const CsvTable table = read_csv(path, 4);
    ParticleSet p;
    p.positions.reserve(table.rows.size());
    p.weights.reserve(table.rows.size());
    if (header_is(table.header, {"x", "y", "z", "weight"})) {
        for (const auto& r : table.rows) {
            p.positions.push_back(normalized({r[0], r[1], r[2]}));
            p.weights.push_back(r[3]);
        }
    } else if (header_is(table.header, {"lon", "lat", "area", "value"})) {
        for (const auto& r : table.rows) {
            p.positions.push_back(from_lonlat_deg(r[0], r[1]));
            p.weights.push_back(r[3] * r[2]);
        }
    } else {
        throw_cli("E_CSV", path + ": header must be 'x,y,z,weight' or 'lon,lat,area,value'");
    }
    return p;
}

ScalarFieldOnGrid read_field_csv(const std::string& path) {
    const CsvTable table = read_csv(path, 4);
    if (!header_is(table.header, {"lon", "lat", "area", "value"}))
        throw_cli("E_CSV", path + ": header must be 'lon,lat,area,value'");
    ScalarFieldOnGrid f;
    for (const auto& r : table.rows) {
        f.points.push_back(from_lonlat_deg(r[0], r[1]));
        f.areas.push_back(r[2]);
        f.values.push_back(r[3]);
    }
    return f;
}

PotentialField read_potentials_csv(const std::string& path, std::size_t expected_rows) {
    std::ifstream in(path);
    if (!in) throw_cli("E_IO", "cannot open input file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw_cli("E_CSV", path + ": missing header line");
    const std::vector<std::string> header = split_csv_line(line);
    int out_dim = 0;
    if (header_is(header, {"x", "y", "z", "phi"})) out_dim = 1;
    else if (header_is(header, {"x", "y", "z", "phi", "phi_y", "phi_z"})) out_dim = 3;
    else throw_cli("E_CSV", path + ": unrecognized potentials header");

    PotentialField field;
    field.out_dim = out_dim;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (int(fields.size()) != 3 + out_dim)
            throw_cli("E_CSV", path + ": bad column count on line " + std::to_string(line_no));
        for (int d = 0; d < out_dim; ++d)
            field.values.push_back(parse_field(fields[3 + d], path, line_no));
    }
    if (field.size() != expected_rows)
        throw_cli("E_DIM", path + ": has " + std::to_string(field.size()) +
                               " rows, expected " + std::to_string(expected_rows));
    return field;
}

}  // namespace csfs
