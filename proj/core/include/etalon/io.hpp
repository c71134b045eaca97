#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "etalon/coating.hpp"
#include "etalon/laser.hpp"
#include "etalon/optimize.hpp"

// CSV/JSON emitters for the table-like results. Every file starts with a
// versioned header (comment lines in CSV, a "format" field in JSON); the
// timestamp can be suppressed to make outputs byte-reproducible.

namespace etalon {

inline constexpr int kOutputFormatVersion = 1;

struct OutputOptions {
    enum class Format { csv, json };

    Format format = Format::csv;
    bool include_timestamp = true;
};

std::string iso8601_utc_now();

void write_sweep(std::ostream& out, const SweepTable& table, const OutputOptions& options);
void write_design_table(std::ostream& out, const DesignTable& table,
                        const OutputOptions& options);
void write_recommendations(std::ostream& out, const std::vector<CoatingDesign>& designs,
                           const OutputOptions& options);
void write_tuning_curve(std::ostream& out, const TuningCurve& curve,
                        const OutputOptions& options);

}  // namespace etalon
