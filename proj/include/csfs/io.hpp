#pragma once

#include <string>
#include <vector>

#include "csfs/applications.hpp"
#include "csfs/cluster_tree.hpp"
#include "csfs/geometry.hpp"
#include "csfs/summation.hpp"

namespace csfs {

/// CLI-facing error with a machine-readable code; codes map to distinct exit codes.
struct CliError {
    std::string code;
    std::string message;
};

[[noreturn]] void throw_cli(const std::string& code, const std::string& message);
int exit_code_for(const std::string& code);

/// Formats a double with 17 significant digits.
std::string format_double(double v);

/// Writes `x,y,z,area` rows for a grid.
void write_grid_csv(const std::string& path, const SphericalGrid& grid);

/// Writes `x,y,z,phi[,phi_y,phi_z]` rows for a potential field.
void write_potentials_csv(const std::string& path, const std::vector<Vec3>& points,
                          const PotentialField& field);

/// Writes `x,y,z,zeta[,tracer]` rows for a BVE snapshot.
void write_bve_csv(const std::string& path, const BveState& state);

/// Writes a scalar field as `lon,lat,area,value` rows (degrees).
void write_field_csv(const std::string& path, const ScalarFieldOnGrid& field);

/// Particle CSV with header `x,y,z,weight`, or `lon,lat,area,value` (degrees;
/// weights become value*area). The header selects the format.
ParticleSet read_particles_csv(const std::string& path);

/// Scalar-field CSV, header `lon,lat,area,value` (degrees).
ScalarFieldOnGrid read_field_csv(const std::string& path);

/// Potential CSV written by write_potentials_csv.
PotentialField read_potentials_csv(const std::string& path, std::size_t expected_rows);

}  // namespace csfs
