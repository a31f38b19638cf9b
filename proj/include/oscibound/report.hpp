// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "oscibound/experiments.hpp"

namespace oscibound {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

/// Log-log SVG on a fixed 640x480 viewport. Ticks sit at powers of 2 on x and
/// powers of 10 on y. Coordinates are printed with fixed precision so that
/// equal input gives byte-identical output. Throws InputError on empty input
/// or nonpositive values.
std::string emit_plot(const std::vector<PlotSeries>& series, const std::string& x_label,
                      const std::string& y_label, const std::string& title = "");

/// Measured norms plus the predicted power law through the first point.
std::string plot_decay(const DecayFit& fit, const std::string& title);

/// One row per lambda: lambda, m, norm kind and value, bounds.
std::string decay_csv(const DecayFit& fit);

/// Lowercase hex SHA-256 of the compact dump of `config`.
std::string config_hash(const nlohmann::json& config);

/// {"config", "config_hash", "result"}.
nlohmann::json make_report(const nlohmann::json& config, nlohmann::json result);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace oscibound
