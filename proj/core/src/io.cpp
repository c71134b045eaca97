#include "etalon/io.hpp"

#include <cstdio>
#include <ctime>
#include <ostream>

#include <json.hpp>

#include "etalon/units.hpp"

namespace etalon {

namespace {

using nlohmann::json;

// %.10g keeps files compact while staying far below every comparison
// tolerance used downstream; snprintf with the "C" locale is deterministic.
std::string num(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.10g", value);
    return buffer;
}

void csv_preamble(std::ostream& out, const char* kind, const OutputOptions& options) {
    out << "# etalon-walkoff " << kind << " v" << kOutputFormatVersion << "\n";
    if (options.include_timestamp) out << "# generated: " << iso8601_utc_now() << "\n";
}

json json_preamble(const char* kind, const OutputOptions& options) {
    json j;
    j["format"] = std::string("etalon-walkoff/") + kind + "/" +
                  std::to_string(kOutputFormatVersion);
    if (options.include_timestamp) j["generated"] = iso8601_utc_now();
    return j;
}

}  // namespace

std::string iso8601_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buffer;
}

void write_sweep(std::ostream& out, const SweepTable& table, const OutputOptions& options) {
    const bool with_eta_sim = table.refractive_index.has_value();
    if (options.format == OutputOptions::Format::csv) {
        csv_preamble(out, "sweep", options);
        out << "# reflectivity = " << num(table.reflectivity)
            << ", tau = " << num(table.bulk_amplitude_transmission)
            << ", eta_tol = " << num(table.eta_tolerance)
            << ", trunc_tol = " << num(table.truncation_tolerance) << "\n";
        if (with_eta_sim)
            out << "# refractive_index = " << num(*table.refractive_index) << "\n";
        out << "delta,eta_opt,loss_opt,converged";
        if (with_eta_sim) out << ",eta_sim";
        out << "\n";
        for (size_t i = 0; i < table.rows.size(); ++i) {
            const SweepRow& row = table.rows[i];
            out << num(row.delta) << ',' << num(row.eta_opt) << ',' << num(row.loss_opt)
                << ',' << (row.converged ? 1 : 0);
            if (with_eta_sim) out << ',' << num(table.eta_simple[i]);
            out << "\n";
        }
        return;
    }

    json j = json_preamble("sweep", options);
    j["reflectivity"] = table.reflectivity;
    j["tau"] = table.bulk_amplitude_transmission;
    j["tolerances"] = {{"eta", table.eta_tolerance}, {"truncation", table.truncation_tolerance}};
    if (with_eta_sim) j["refractive_index"] = *table.refractive_index;
    json rows = json::array();
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const SweepRow& row = table.rows[i];
        json r = {{"delta", row.delta},
                  {"eta_opt", row.eta_opt},
                  {"loss_opt", row.loss_opt},
                  {"converged", row.converged}};
        if (with_eta_sim) r["eta_sim"] = table.eta_simple[i];
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    out << j.dump(2) << "\n";
}

void write_design_table(std::ostream& out, const DesignTable& table,
                        const OutputOptions& options) {
    if (options.format == OutputOptions::Format::csv) {
        csv_preamble(out, "design-table", options);
        out << "substrate,coating,n_substrate,n_coating,reflectivity,loss_ratio\n";
        for (const DesignRow& row : table.rows) {
            out << row.substrate << ',' << row.coating << ',' << num(row.n_substrate) << ','
                << num(row.n_coating) << ',' << num(row.reflectivity) << ','
                << num(row.loss_ratio) << "\n";
        }
        return;
    }

    json j = json_preamble("design-table", options);
    json rows = json::array();
    for (const DesignRow& row : table.rows) {
        rows.push_back({{"substrate", row.substrate},
                        {"coating", row.coating},
                        {"n_substrate", row.n_substrate},
                        {"n_coating", row.n_coating},
                        {"reflectivity", row.reflectivity},
                        {"loss_ratio", row.loss_ratio}});
    }
    j["rows"] = std::move(rows);
    out << j.dump(2) << "\n";
}

void write_recommendations(std::ostream& out, const std::vector<CoatingDesign>& designs,
                           const OutputOptions& options) {
    if (options.format == OutputOptions::Format::csv) {
        csv_preamble(out, "recommendations", options);
        out << "rank,substrate,coating,n_coating,reflectivity,loss_ratio,"
               "r_optimum,self_alignment_reachable,reachable_min,reachable_max\n";
        int rank = 1;
        for (const CoatingDesign& d : designs) {
            out << rank++ << ',' << d.substrate.name << ','
                << (d.coating ? d.coating->name : "uncoated") << ','
                << num(d.coating ? d.coating->refractive_index : 0.0) << ','
                << num(d.layer_reflectivity) << ',' << num(d.loss_ratio) << ','
                << num(d.optimum_reflectivity) << ',' << (d.self_alignment_reachable ? 1 : 0)
                << ',' << num(d.reachable_min) << ',' << num(d.reachable_max) << "\n";
        }
        return;
    }

    json j = json_preamble("recommendations", options);
    json rows = json::array();
    int rank = 1;
    for (const CoatingDesign& d : designs) {
        rows.push_back({{"rank", rank++},
                        {"substrate", d.substrate.name},
                        {"coating", d.coating ? json(d.coating->name) : json(nullptr)},
                        {"n_coating", d.coating ? json(d.coating->refractive_index) : json(nullptr)},
                        {"reflectivity", d.layer_reflectivity},
                        {"loss_ratio", d.loss_ratio},
                        {"r_optimum", d.optimum_reflectivity},
                        {"self_alignment_reachable", d.self_alignment_reachable},
                        {"reachable_min", d.reachable_min},
                        {"reachable_max", d.reachable_max}});
    }
    j["rows"] = std::move(rows);
    out << j.dump(2) << "\n";
}

void write_tuning_curve(std::ostream& out, const TuningCurve& curve,
                        const OutputOptions& options) {
    if (options.format == OutputOptions::Format::csv) {
        csv_preamble(out, "tuning-curve", options);
        out << "# min_tilt_mrad = " << num(units::rad_to_mrad(curve.min_tilt_angle))
            << " (rows with below_min_tilt = 1 sit in the excluded region)\n";
        out << "theta_mrad,delta,loss_simple";
        if (curve.both_models) out << ",loss_optimized";
        out << ",power_simple_W";
        if (curve.both_models) out << ",power_optimized_W";
        out << ",below_min_tilt\n";
        for (const TuningCurvePoint& p : curve.points) {
            out << num(units::rad_to_mrad(p.tilt_angle)) << ',' << num(p.delta) << ','
                << num(p.loss_simple);
            if (curve.both_models) out << ',' << num(p.loss_optimized);
            out << ',' << num(p.power_simple);
            if (curve.both_models) out << ',' << num(p.power_optimized);
            out << ',' << (p.below_min_tilt ? 1 : 0) << "\n";
        }
        return;
    }

    json j = json_preamble("tuning-curve", options);
    j["min_tilt_mrad"] = units::rad_to_mrad(curve.min_tilt_angle);
    json rows = json::array();
    for (const TuningCurvePoint& p : curve.points) {
        json r = {{"theta_mrad", units::rad_to_mrad(p.tilt_angle)},
                  {"delta", p.delta},
                  {"loss_simple", p.loss_simple},
                  {"power_simple_W", p.power_simple},
                  {"below_min_tilt", p.below_min_tilt}};
        if (curve.both_models) {
            r["loss_optimized"] = p.loss_optimized;
            r["power_optimized_W"] = p.power_optimized;
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    out << j.dump(2) << "\n";
}

}  // namespace etalon
