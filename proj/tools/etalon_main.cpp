// etalon - command-line front end: single-configuration losses, delta sweeps,
// coating design tables, tilt-tuning curves, and fixed-loss fits.
//
// Exit codes: 0 success, 2 invalid parameters or input files,
//             3 numerical non-convergence.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "etalon/analytic.hpp"
#include "etalon/coating.hpp"
#include "etalon/io.hpp"
#include "etalon/laser.hpp"
#include "etalon/optimize.hpp"
#include "etalon/overlap.hpp"
#include "etalon/units.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNoConvergence = 3;

using namespace etalon;
using nlohmann::json;

struct EtalonFlags {
    double reflectivity = 0.0;
    double refractive_index = 1.0;
    double thickness_mm = 0.0;
    double tau = 1.0;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--R", reflectivity, "Surface reflectivity, in [0,1)")->required();
        cmd.add_option("--n", refractive_index, "Refractive index (>= 1)")->required();
        cmd.add_option("--d-mm", thickness_mm, "Etalon thickness (mm)")->required();
        cmd.add_option("--tau", tau, "Bulk amplitude transmission")->capture_default_str();
    }
    EtalonDesign build() const {
        EtalonDesign etalon{reflectivity, refractive_index, units::mm_to_m(thickness_mm), tau};
        etalon.validate();
        return etalon;
    }
};

struct CavityFlags {
    double psat_w = 0.0;
    double g0 = 0.0;
    double tout = 0.0;
    double l0 = 0.0;
    double fsr_ghz = 1.0;

    void add_to(CLI::App& cmd, bool with_l0) {
        cmd.add_option("--psat-W", psat_w, "Saturation power (W)")->required();
        cmd.add_option("--g0", g0, "Small-signal gain per round trip")->required();
        cmd.add_option("--tout", tout, "Output coupler transmission")->required();
        if (with_l0)
            cmd.add_option("--l0", l0, "Fixed round-trip loss (excludes walk-off)")->required();
        cmd.add_option("--fsr-ghz", fsr_ghz, "Laser cavity free spectral range (GHz)")->capture_default_str();
    }
    LaserCavityParams build() const {
        LaserCavityParams cavity{psat_w, g0, tout, l0, units::ghz_to_hz(fsr_ghz)};
        cavity.validate();
        return cavity;
    }
};

std::ostream& open_output(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
    return file;
}

// --- loss ------------------------------------------------------------------

int run_loss(const EtalonFlags& etalon_flags, double w0_um, double theta_mrad,
             const std::string& model, std::optional<double> eta_override, bool exact_walkoff,
             const std::string& format) {
    const EtalonDesign etalon = etalon_flags.build();
    const BeamGeometry beam{1e-6 /* unused by walk-off */, units::um_to_m(w0_um)};
    const WalkoffState state = normalized_walkoff(
        etalon, beam, units::mrad_to_rad(theta_mrad),
        exact_walkoff ? WalkoffMode::exact : WalkoffMode::small_angle);
    const double delta = state.normalized_walkoff;

    double eta = 0.0;
    if (model == "simple")
        eta = simple_insertion_offset(etalon.refractive_index, delta);
    else if (model == "optimized" || model == "series")
        eta = optimal_offset(etalon.reflectivity, delta);
    if (eta_override) eta = *eta_override;

    double loss = 0.0;
    int terms_used = 0;
    bool converged = true;
    if (model == "generic") {
        loss = generic_loss(etalon.reflectivity, delta, eta);
    } else if (model == "simple") {
        loss = eta_override ? generic_loss(etalon.reflectivity, delta, eta)
                            : simple_insertion_loss(etalon.reflectivity,
                                                    etalon.refractive_index, delta);
    } else if (model == "optimized") {
        loss = eta_override ? generic_loss(etalon.reflectivity, delta, eta)
                            : optimized_loss(etalon.reflectivity, delta);
    } else {  // series
        SeriesParams params;
        params.reflectivity = etalon.reflectivity;
        params.bulk_amplitude_transmission = etalon.bulk_amplitude_transmission;
        const OverlapResult result = overlap_series(params, delta, eta);
        loss = result.loss;
        terms_used = result.terms_used;
        converged = result.converged;
    }

    if (model != "series" && !quadratic_limit_valid(delta, eta))
        std::cerr << "warning: |delta| or |eta| exceeds " << kQuadraticValidityLimit
                  << "; the quadratic loss models are unreliable here (use --model series)\n";

    if (format == "json") {
        json j = {{"model", model},       {"theta_mrad", theta_mrad},
                  {"delta", delta},       {"eta", eta},
                  {"loss", loss},         {"internal_angle_mrad",
                                           units::rad_to_mrad(state.internal_angle)}};
        if (model == "series") {
            j["terms_used"] = terms_used;
            j["converged"] = converged;
        }
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "model:  " << model << "\n"
                  << "theta:  " << theta_mrad << " mrad\n"
                  << "delta:  " << delta << "\n"
                  << "eta:    " << eta << "\n"
                  << "loss:   " << loss << "\n";
        if (model == "series")
            std::cout << "terms:  " << terms_used << (converged ? "" : " (not converged)")
                      << "\n";
    }
    return converged ? 0 : kExitNoConvergence;
}

// --- sweep -----------------------------------------------------------------

std::string suffixed_path(const std::string& path, double reflectivity) {
    std::ostringstream tag;
    tag << "_R" << reflectivity;
    const auto dot = path.rfind('.');
    if (dot == std::string::npos || dot == 0) return path + tag.str();
    return path.substr(0, dot) + tag.str() + path.substr(dot);
}

int run_sweep(std::vector<double> reflectivities, double delta_min, double delta_max,
              int points, std::optional<double> refractive_index, double tau, int threads,
              const std::string& output, const OutputOptions& options) {
    if (reflectivities.empty()) reflectivities = {0.05, 0.27, 0.5, 0.9};
    if (points < 2) throw std::runtime_error("sweep: need at least 2 grid points");
    if (!(delta_min > 0.0 && delta_max > delta_min))
        throw std::runtime_error("sweep: need 0 < delta-min < delta-max");

    std::vector<double> grid(points);
    const double log_min = std::log10(delta_min), log_max = std::log10(delta_max);
    for (int i = 0; i < points; ++i)
        grid[i] = std::pow(10.0, log_min + (log_max - log_min) * i / (points - 1));

    bool all_converged = true;
    for (const double reflectivity : reflectivities) {
        SeriesParams params;
        params.reflectivity = reflectivity;
        params.bulk_amplitude_transmission = tau;
        const SweepTable table = sweep_delta(params, grid, refractive_index, threads);
        for (const SweepRow& row : table.rows) all_converged &= row.converged;

        std::ofstream file;
        const std::string path =
            output.empty() || reflectivities.size() == 1 ? output
                                                         : suffixed_path(output, reflectivity);
        std::ostream& out = open_output(file, path);
        write_sweep(out, table, options);
        if (!path.empty()) std::cerr << "wrote " << path << "\n";
    }
    return all_converged ? 0 : kExitNoConvergence;
}

// --- design-table ----------------------------------------------------------

int run_design_table(const std::string& materials_path, const std::string& recommend,
                     const std::string& output, const OutputOptions& options) {
    const std::vector<MaterialEntry> materials =
        materials_path.empty() ? default_materials() : load_materials_file(materials_path);

    std::ofstream file;
    std::ostream& out = open_output(file, output);
    if (recommend.empty()) {
        write_design_table(out, generate_design_table(materials), options);
    } else {
        const MaterialEntry* substrate = nullptr;
        for (const auto& m : materials)
            if (m.name == recommend) substrate = &m;
        if (!substrate)
            throw std::runtime_error("no material named '" + recommend + "' in the database");
        write_recommendations(out, recommend_coatings(*substrate, materials), options);
    }
    if (!output.empty()) std::cerr << "wrote " << output << "\n";
    return 0;
}

// --- tune ------------------------------------------------------------------

int run_tune(const EtalonFlags& etalon_flags, const CavityFlags& cavity_flags, double w0_um,
             double lambda_nm, double theta_max_mrad, int points, bool simple_only,
             const std::string& output, const OutputOptions& options) {
    const EtalonDesign etalon = etalon_flags.build();
    const BeamGeometry beam{units::nm_to_m(lambda_nm), units::um_to_m(w0_um)};
    beam.validate();
    const LaserCavityParams cavity = cavity_flags.build();
    if (points < 2) throw std::runtime_error("tune: need at least 2 grid points");

    std::vector<double> grid(points);
    const double theta_max = units::mrad_to_rad(theta_max_mrad);
    for (int i = 0; i < points; ++i)  // symmetric, exact zero at the center
        grid[i] = theta_max * (2.0 * i - (points - 1)) / (points - 1);

    const TuningCurve curve = tuning_curve(cavity, etalon, beam, grid, !simple_only);
    std::ofstream file;
    std::ostream& out = open_output(file, output);
    write_tuning_curve(out, curve, options);
    if (!output.empty()) std::cerr << "wrote " << output << "\n";
    return 0;
}

// --- fit -------------------------------------------------------------------

int run_fit(const EtalonFlags& etalon_flags, const CavityFlags& cavity_flags, double w0_um,
            const std::string& data_path, const std::string& model_name,
            double mrad_per_turn, double theta0_mrad, bool unconstrained,
            const std::string& format) {
    const EtalonDesign etalon = etalon_flags.build();
    const BeamGeometry beam{1e-6, units::um_to_m(w0_um)};
    LaserCavityParams cavity = cavity_flags.build();
    const LossModel model =
        model_name == "optimized" ? LossModel::optimized : LossModel::simple;

    std::ifstream in(data_path);
    if (!in) throw std::runtime_error("cannot open data file '" + data_path + "'");
    const TiltCalibration calibration{units::mrad_to_rad(mrad_per_turn),
                                      units::mrad_to_rad(theta0_mrad)};
    const std::vector<TuningDataPoint> data = load_tuning_data(in, calibration);

    const FitResult fit = fit_fixed_loss(cavity, model, etalon, beam, data);

    json j = {{"model", model_name},
              {"points", data.size()},
              {"L0", fit.fixed_loss},
              {"L0_stderr", fit.standard_error},
              {"residual_sum", fit.residual_sum},
              {"evaluations", fit.evaluations},
              {"converged", fit.converged}};
    if (unconstrained) {
        cavity.fixed_roundtrip_loss = fit.fixed_loss;
        const UnconstrainedFitResult u = fit_unconstrained(cavity, model, etalon, beam, data);
        j["unconstrained"] = {{"L0", u.fixed_loss},
                              {"Psat_W", u.saturation_power},
                              {"G0", u.small_signal_gain},
                              {"Tout", u.output_coupler_transmission},
                              {"residual_sum", u.residual_sum},
                              {"converged", u.converged}};
    }

    if (format == "json") {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "fitted L0:      " << fit.fixed_loss << " +/- " << fit.standard_error
                  << "\nresidual sum:   " << fit.residual_sum << "\npoints:         "
                  << data.size() << "\nconverged:      " << (fit.converged ? "yes" : "no")
                  << "\n";
        if (unconstrained)
            std::cout << "unconstrained:  L0 = " << j["unconstrained"]["L0"].get<double>()
                      << ", Psat = " << j["unconstrained"]["Psat_W"].get<double>()
                      << " W, G0 = " << j["unconstrained"]["G0"].get<double>()
                      << ", Tout = " << j["unconstrained"]["Tout"].get<double>() << "\n";
    }
    return fit.converged ? 0 : kExitNoConvergence;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Walk-off loss toolkit for tilted intracavity etalons"};
    app.set_version_flag("--version", "0.1.0");
    app.set_config("--config", "", "Read options from an INI file (flags win)");
    app.require_subcommand(1);

    std::string format = "csv";
    bool no_timestamp = false;

    // loss
    auto* loss_cmd = app.add_subcommand("loss", "Walk-off loss of one configuration");
    loss_cmd->configurable()->fallthrough();
    EtalonFlags loss_etalon;
    loss_etalon.add_to(*loss_cmd);
    double loss_w0 = 0.0, loss_theta = 0.0;
    std::string loss_model = "simple", loss_format = "text";
    bool loss_exact = false;
    std::optional<double> loss_eta;
    loss_cmd->add_option("--w0-um", loss_w0, "Beam waist radius (um)")->required();
    loss_cmd->add_option("--theta-mrad", loss_theta, "Tilt angle (mrad)")->required();
    loss_cmd->add_option("--model", loss_model, "Loss model")->capture_default_str()
        ->check(CLI::IsMember({"generic", "simple", "optimized", "series"}));
    loss_cmd->add_option("--eta", loss_eta,
                         "Normalized mode offset (default: the model's own offset)");
    loss_cmd->add_flag("--exact-walkoff", loss_exact,
                       "Use the exact tilt relation instead of the small-angle form");
    loss_cmd->add_option("--format", loss_format, "text or json")->capture_default_str()
        ->check(CLI::IsMember({"text", "json"}));

    // sweep
    auto* sweep_cmd =
        app.add_subcommand("sweep", "Optimized loss and offset across a delta grid");
    sweep_cmd->configurable()->fallthrough();
    std::vector<double> sweep_r;
    double sweep_min = 1e-3, sweep_max = 10.0, sweep_tau = 1.0;
    int sweep_points = 200, sweep_threads = 1;
    std::optional<double> sweep_n;
    std::string sweep_output;
    sweep_cmd->add_option("--R", sweep_r, "Reflectivities (default 0.05 0.27 0.5 0.9)");
    sweep_cmd->add_option("--delta-min", sweep_min, "Grid start")->capture_default_str();
    sweep_cmd->add_option("--delta-max", sweep_max, "Grid end")->capture_default_str();
    sweep_cmd->add_option("--points", sweep_points, "Log-spaced grid points")->capture_default_str();
    sweep_cmd->add_option("--n", sweep_n, "Refractive index; adds the eta_sim column");
    sweep_cmd->add_option("--tau", sweep_tau, "Bulk amplitude transmission")->capture_default_str();
    sweep_cmd->add_option("--threads", sweep_threads, "Worker threads")->capture_default_str();
    sweep_cmd->add_option("-o,--output", sweep_output,
                          "Output file (multiple R values get _R<value> suffixes)");
    sweep_cmd->add_option("--format", format, "csv or json")->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));
    sweep_cmd->add_flag("--no-timestamp", no_timestamp, "Omit the generated-at header");

    // design-table
    auto* table_cmd =
        app.add_subcommand("design-table", "Quarter-wave reflectivities and loss ratios");
    table_cmd->configurable()->fallthrough();
    std::string table_materials, table_recommend, table_output;
    table_cmd->add_option("-m,--materials", table_materials,
                          "Material database file (default: built-in table)");
    table_cmd->add_option("--recommend", table_recommend,
                          "Rank coatings for this substrate instead of printing the grid");
    table_cmd->add_option("-o,--output", table_output, "Output file (default stdout)");
    table_cmd->add_option("--format", format, "csv or json")->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));
    table_cmd->add_flag("--no-timestamp", no_timestamp, "Omit the generated-at header");

    // tune
    auto* tune_cmd = app.add_subcommand("tune", "Output power vs tilt angle");
    tune_cmd->configurable()->fallthrough();
    EtalonFlags tune_etalon;
    CavityFlags tune_cavity;
    tune_etalon.add_to(*tune_cmd);
    tune_cavity.add_to(*tune_cmd, /*with_l0=*/true);
    double tune_w0 = 0.0, tune_lambda = 0.0, tune_theta_max = 12.0;
    int tune_points = 241;
    bool tune_simple_only = false;
    std::string tune_output;
    tune_cmd->add_option("--w0-um", tune_w0, "Beam waist radius (um)")->required();
    tune_cmd->add_option("--lambda-nm", tune_lambda, "Wavelength (nm)")->required();
    tune_cmd->add_option("--theta-max-mrad", tune_theta_max, "Symmetric grid edge")->capture_default_str();
    tune_cmd->add_option("--points", tune_points, "Grid points")->capture_default_str();
    tune_cmd->add_flag("--simple-only", tune_simple_only, "Omit the realigned-model columns");
    tune_cmd->add_option("-o,--output", tune_output, "Output file (default stdout)");
    tune_cmd->add_option("--format", format, "csv or json")->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));
    tune_cmd->add_flag("--no-timestamp", no_timestamp, "Omit the generated-at header");

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "Fit the fixed round-trip loss to data");
    fit_cmd->configurable()->fallthrough();
    EtalonFlags fit_etalon;
    CavityFlags fit_cavity;
    fit_etalon.add_to(*fit_cmd);
    fit_cavity.add_to(*fit_cmd, /*with_l0=*/false);
    double fit_w0 = 0.0, fit_mrad_per_turn = 9.7, fit_theta0 = 0.0;
    std::string fit_data, fit_model = "simple", fit_format = "text";
    bool fit_unconstrained_flag = false;
    fit_cmd->add_option("--w0-um", fit_w0, "Beam waist radius (um)")->required();
    fit_cmd->add_option("--data", fit_data, "CSV measurement file")->required();
    fit_cmd->add_option("--model", fit_model, "Walk-off loss model")->capture_default_str()
        ->check(CLI::IsMember({"simple", "optimized"}));
    fit_cmd->add_option("--mrad-per-turn", fit_mrad_per_turn,
                        "Screw calibration for 'turns' data")->capture_default_str();
    fit_cmd->add_option("--theta0-mrad", fit_theta0, "Tilt offset for 'turns' data")->capture_default_str();
    fit_cmd->add_flag("--unconstrained", fit_unconstrained_flag,
                      "Also report the fit with Psat, G0, Tout freed");
    fit_cmd->add_option("--format", fit_format, "text or json")->capture_default_str()
        ->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    OutputOptions options;
    options.format =
        format == "json" ? OutputOptions::Format::json : OutputOptions::Format::csv;
    options.include_timestamp = !no_timestamp;

    try {
        if (loss_cmd->parsed())
            return run_loss(loss_etalon, loss_w0, loss_theta, loss_model, loss_eta,
                            loss_exact, loss_format);
        if (sweep_cmd->parsed())
            return run_sweep(sweep_r, sweep_min, sweep_max, sweep_points, sweep_n, sweep_tau,
                             sweep_threads, sweep_output, options);
        if (table_cmd->parsed())
            return run_design_table(table_materials, table_recommend, table_output, options);
        if (tune_cmd->parsed())
            return run_tune(tune_etalon, tune_cavity, tune_w0, tune_lambda, tune_theta_max,
                            tune_points, tune_simple_only, tune_output, options);
        if (fit_cmd->parsed())
            return run_fit(fit_etalon, fit_cavity, fit_w0, fit_data, fit_model,
                           fit_mrad_per_turn, fit_theta0, fit_unconstrained_flag, fit_format);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return 0;
}
