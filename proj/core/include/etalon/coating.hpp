#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

// Substrate/coating material database, single quarter-wave layer
// reflectivities, and loss-ratio driven coating selection.

namespace etalon {

enum class MaterialRole { substrate, coating, either };

struct MaterialEntry {
    std::string name;
    double refractive_index = 1.0;      // > 1
    double reference_wavelength = 0.0;  // m; indices are point values, no dispersion model
    MaterialRole role = MaterialRole::either;
    std::string notes;
};

// The ten stock materials (indices at 1.55 um): fused silica, YAG, ZnSe and
// Si substrates; MgF2, silica, Ta2O5, Nb2O5, TiO2 and a-Si coatings.
const std::vector<MaterialEntry>& default_materials();

// Plain-text table: one entry per line, columns
//   name  refractive_index  wavelength_um  role  [notes...]
// '#' starts a comment. Throws std::runtime_error on malformed input.
std::vector<MaterialEntry> load_materials(std::istream& in);
std::vector<MaterialEntry> load_materials_file(const std::string& path);

// Reflectivity of a single quarter-wave layer between the incident medium
// and the substrate: ((n_inc n_sub - n_coat^2) / (n_inc n_sub + n_coat^2))^2.
double quarter_wave_reflectivity(double n_substrate, double n_coating,
                                 double n_incident = 1.0);

// Simple-insertion over optimized walk-off loss at the given surface
// reflectivity; the tilt dependence cancels, leaving the coefficient ratio.
// Exactly 1 at R = self_alignment_reflectivity(n), exactly 2 at the
// uncoated Fresnel reflectivity. Rejects R = 0 (ratio diverges) and R >= 1.
double loss_ratio(double n_substrate, double reflectivity);

// Reflectivities reachable by detuning the layer thickness between "no
// coating" and the full quarter wave; returned ordered (min, max).
std::pair<double, double> accessible_range(double n_substrate, double n_coating);

struct DesignRow {
    std::string substrate;
    std::string coating;  // "uncoated" for the bare-substrate rows
    double n_substrate = 0.0;
    double n_coating = 0.0;  // 0 when uncoated
    double reflectivity = 0.0;
    double loss_ratio = 0.0;
};

struct DesignTable {
    std::vector<DesignRow> rows;
};

// Full grid over (role substrate|either) x (role coating|either), preceded by
// one uncoated row per substrate. Throws when either side of the grid is empty.
DesignTable generate_design_table(const std::vector<MaterialEntry>& materials);

struct CoatingDesign {
    MaterialEntry substrate;
    std::optional<MaterialEntry> coating;  // nullopt = uncoated
    double layer_reflectivity = 0.0;       // quarter-wave (or Fresnel) value
    double loss_ratio = 0.0;
    double optimum_reflectivity = 0.0;  // self-alignment target for the substrate
    bool self_alignment_reachable = false;
    double reachable_min = 0.0;
    double reachable_max = 0.0;
};

// Candidate coatings for one substrate, ranked by |loss_ratio - 1| (name
// breaks ties); includes the uncoated option. Throws on an empty candidate set.
std::vector<CoatingDesign> recommend_coatings(const MaterialEntry& substrate,
                                              const std::vector<MaterialEntry>& materials);

}  // namespace etalon
