#include "etalon/coating.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "etalon/analytic.hpp"
#include "etalon/units.hpp"

namespace etalon {

namespace {

MaterialRole parse_role(const std::string& token) {
    if (token == "substrate") return MaterialRole::substrate;
    if (token == "coating") return MaterialRole::coating;
    if (token == "either") return MaterialRole::either;
    throw std::runtime_error("materials: unknown role '" + token + "'");
}

bool usable_as_substrate(const MaterialEntry& m) {
    return m.role == MaterialRole::substrate || m.role == MaterialRole::either;
}

bool usable_as_coating(const MaterialEntry& m) {
    return m.role == MaterialRole::coating || m.role == MaterialRole::either;
}

}  // namespace

const std::vector<MaterialEntry>& default_materials() {
    static const std::vector<MaterialEntry> materials = {
        {"fused_silica", 1.44, units::um_to_m(1.55), MaterialRole::substrate, ""},
        {"YAG", 1.81, units::um_to_m(1.55), MaterialRole::substrate, "yttrium aluminum garnet"},
        {"ZnSe", 2.45, units::um_to_m(1.55), MaterialRole::substrate, ""},
        {"Si", 3.46, units::um_to_m(1.55), MaterialRole::substrate, ""},
        {"MgF2", 1.37, units::um_to_m(1.55), MaterialRole::coating, "AR material"},
        {"silica", 1.46, units::um_to_m(1.55), MaterialRole::coating, "deposited film"},
        {"Ta2O5", 2.06, units::um_to_m(1.55), MaterialRole::coating, ""},
        {"Nb2O5", 2.24, units::um_to_m(1.55), MaterialRole::coating, ""},
        {"TiO2", 2.43, units::um_to_m(1.55), MaterialRole::coating, ""},
        {"a-Si", 3.5, units::um_to_m(1.55), MaterialRole::coating, "amorphous silicon"},
    };
    return materials;
}

std::vector<MaterialEntry> load_materials(std::istream& in) {
    std::vector<MaterialEntry> materials;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream fields(line);
        MaterialEntry entry;
        double wavelength_um = 0.0;
        std::string role;
        if (!(fields >> entry.name)) continue;  // blank line
        if (!(fields >> entry.refractive_index >> wavelength_um >> role))
            throw std::runtime_error("materials: malformed line " + std::to_string(line_number));
        if (!(entry.refractive_index > 1.0))
            throw std::runtime_error("materials: refractive index must be > 1 on line " +
                                     std::to_string(line_number));
        if (!(wavelength_um > 0.0))
            throw std::runtime_error("materials: wavelength must be > 0 on line " +
                                     std::to_string(line_number));
        entry.reference_wavelength = units::um_to_m(wavelength_um);
        entry.role = parse_role(role);
        std::string notes;
        std::getline(fields, notes);
        const auto start = notes.find_first_not_of(" \t");
        const auto stop = notes.find_last_not_of(" \t\r");
        entry.notes = start == std::string::npos ? "" : notes.substr(start, stop - start + 1);
        materials.push_back(std::move(entry));
    }
    return materials;
}

std::vector<MaterialEntry> load_materials_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("materials: cannot open '" + path + "'");
    return load_materials(in);
}

double quarter_wave_reflectivity(double n_substrate, double n_coating, double n_incident) {
    if (!(n_substrate > 0.0 && n_coating > 0.0 && n_incident > 0.0))
        throw std::invalid_argument("quarter_wave_reflectivity: indices must be > 0");
    const double nc2 = n_coating * n_coating;
    const double r = (n_incident * n_substrate - nc2) / (n_incident * n_substrate + nc2);
    return r * r;
}

double loss_ratio(double n_substrate, double reflectivity) {
    if (!(n_substrate > 1.0)) throw std::invalid_argument("loss_ratio: requires n > 1");
    if (!(reflectivity > 0.0 && reflectivity < 1.0))
        throw std::invalid_argument("loss_ratio: requires 0 < R < 1");
    return simple_loss_coefficient(reflectivity, n_substrate) /
           optimized_loss_coefficient(reflectivity);
}

std::pair<double, double> accessible_range(double n_substrate, double n_coating) {
    const double fresnel = fresnel_reflectivity(n_substrate);
    const double quarter = quarter_wave_reflectivity(n_substrate, n_coating);
    return std::minmax(fresnel, quarter);
}

DesignTable generate_design_table(const std::vector<MaterialEntry>& materials) {
    std::vector<MaterialEntry> substrates, coatings;
    for (const auto& m : materials) {
        if (usable_as_substrate(m)) substrates.push_back(m);
        if (usable_as_coating(m)) coatings.push_back(m);
    }
    if (substrates.empty() || coatings.empty())
        throw std::invalid_argument("generate_design_table: need at least one substrate and one coating");

    DesignTable table;
    table.rows.reserve(substrates.size() * (coatings.size() + 1));
    for (const auto& s : substrates) {
        const double fresnel = fresnel_reflectivity(s.refractive_index);
        table.rows.push_back({s.name, "uncoated", s.refractive_index, 0.0, fresnel,
                              loss_ratio(s.refractive_index, fresnel)});
    }
    for (const auto& c : coatings) {
        for (const auto& s : substrates) {
            const double r = quarter_wave_reflectivity(s.refractive_index, c.refractive_index);
            // A perfect AR match makes R vanish and the ratio blow up; report it
            // as infinite rather than rejecting the pair.
            const double ratio = r > 0.0 ? loss_ratio(s.refractive_index, r)
                                         : std::numeric_limits<double>::infinity();
            table.rows.push_back(
                {s.name, c.name, s.refractive_index, c.refractive_index, r, ratio});
        }
    }
    return table;
}

std::vector<CoatingDesign> recommend_coatings(const MaterialEntry& substrate,
                                              const std::vector<MaterialEntry>& materials) {
    if (!(substrate.refractive_index > 1.0))
        throw std::invalid_argument("recommend_coatings: substrate index must be > 1");

    const double n_sub = substrate.refractive_index;
    const double r_opt = self_alignment_reflectivity(n_sub);
    const double fresnel = fresnel_reflectivity(n_sub);

    std::vector<CoatingDesign> designs;
    for (const auto& m : materials) {
        if (!usable_as_coating(m)) continue;
        CoatingDesign d;
        d.substrate = substrate;
        d.coating = m;
        d.layer_reflectivity = quarter_wave_reflectivity(n_sub, m.refractive_index);
        d.loss_ratio = d.layer_reflectivity > 0.0 ? loss_ratio(n_sub, d.layer_reflectivity)
                                                  : std::numeric_limits<double>::infinity();
        d.optimum_reflectivity = r_opt;
        std::tie(d.reachable_min, d.reachable_max) =
            accessible_range(n_sub, m.refractive_index);
        d.self_alignment_reachable = d.reachable_min <= r_opt && r_opt <= d.reachable_max;
        designs.push_back(std::move(d));
    }
    if (designs.empty())
        throw std::invalid_argument("recommend_coatings: empty candidate set");

    CoatingDesign bare;
    bare.substrate = substrate;
    bare.layer_reflectivity = fresnel;
    bare.loss_ratio = loss_ratio(n_sub, fresnel);
    bare.optimum_reflectivity = r_opt;
    bare.self_alignment_reachable = false;
    bare.reachable_min = bare.reachable_max = fresnel;
    designs.push_back(std::move(bare));

    std::sort(designs.begin(), designs.end(), [](const CoatingDesign& a, const CoatingDesign& b) {
        const double da = std::abs(a.loss_ratio - 1.0);
        const double db = std::abs(b.loss_ratio - 1.0);
        if (da != db) return da < db;
        const std::string& na = a.coating ? a.coating->name : "uncoated";
        const std::string& nb = b.coating ? b.coating->name : "uncoated";
        return na < nb;
    });
    return designs;
}

}  // namespace etalon
