// SPDX-License-Identifier: Apache-2.0
#include "oscibound/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "oscibound/errors.hpp"

namespace oscibound {

namespace {

constexpr double kWidth = 640, kHeight = 480;
constexpr double kLeft = 80, kRight = 610, kTop = 50, kBottom = 420;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string emit_plot(const std::vector<PlotSeries>& series, const std::string& x_label,
                      const std::string& y_label, const std::string& title) {
  if (series.empty()) throw InputError("plot needs at least one series");
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series) {
    if (s.x.empty() || s.x.size() != s.y.size()) {
      throw InputError("plot series '" + s.name + "' is empty or ragged");
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0) || !std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        throw InputError("log-log plot needs positive finite values");
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  const int x0 = static_cast<int>(std::floor(std::log2(xmin) + 1e-9));
  int x1 = static_cast<int>(std::ceil(std::log2(xmax) - 1e-9));
  if (x1 <= x0) x1 = x0 + 1;
  const int y0 = static_cast<int>(std::floor(std::log10(ymin) + 1e-9));
  int y1 = static_cast<int>(std::ceil(std::log10(ymax) - 1e-9));
  if (y1 <= y0) y1 = y0 + 1;

  auto px = [&](double x) { return kLeft + (std::log2(x) - x0) / (x1 - x0) * (kRight - kLeft); };
  auto py = [&](double y) { return kBottom - (std::log10(y) - y0) / (y1 - y0) * (kBottom - kTop); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  if (!title.empty()) {
    os << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"28\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(title) << "</text>\n";
  }
  os << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(kRight - kLeft)
     << "\" height=\"" << fmt(kBottom - kTop) << "\" fill=\"none\" stroke=\"black\"/>\n";

  const int xstep = std::max(1, (x1 - x0 + 11) / 12);
  for (int e = x0; e <= x1; e += xstep) {
    const std::string X = fmt(px(std::ldexp(1.0, e)));
    os << "<line x1=\"" << X << "\" y1=\"" << fmt(kBottom) << "\" x2=\"" << X << "\" y2=\""
       << fmt(kBottom + 5) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << X << "\" y=\"" << fmt(kBottom + 20) << "\" text-anchor=\"middle\">2^" << e
       << "</text>\n";
  }
  for (int e = y0; e <= y1; ++e) {
    const std::string Y = fmt(py(std::pow(10.0, e)));
    os << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << Y << "\" x2=\"" << fmt(kLeft) << "\" y2=\""
       << Y << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << Y << "\" text-anchor=\"end\" dy=\"4\">1e"
       << e << "</text>\n";
  }
  os << "<text x=\"" << fmt((kLeft + kRight) / 2) << "\" y=\"" << fmt(kHeight - 15)
     << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  os << "<text x=\"20\" y=\"" << fmt((kTop + kBottom) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
     << fmt((kTop + kBottom) / 2) << ")\">" << escape(y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % std::size(kColors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (series[s].dashed) os << " stroke-dasharray=\"6 4\"";
    os << " points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (i) os << ' ';
      os << fmt(px(series[s].x[i])) << ',' << fmt(py(series[s].y[i]));
    }
    os << "\"/>\n";
    if (!series[s].dashed) {
      for (std::size_t i = 0; i < series[s].x.size(); ++i) {
        os << "<circle cx=\"" << fmt(px(series[s].x[i])) << "\" cy=\"" << fmt(py(series[s].y[i]))
           << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
    }
    const double ly = kTop + 16 + 16 * static_cast<double>(s);
    os << "<text x=\"" << fmt(kRight - 10) << "\" y=\"" << fmt(ly) << "\" text-anchor=\"end\" fill=\""
       << color << "\">" << escape(series[s].name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string plot_decay(const DecayFit& fit, const std::string& title) {
  std::vector<PlotSeries> series;
  char name[64];
  std::snprintf(name, sizeof name, "measured (slope %.4f)", fit.fit.slope);
  series.push_back({name, fit.lambdas(), fit.norms(), false});
  if (fit.predicted && !fit.points.empty()) {
    PlotSeries pred;
    std::snprintf(name, sizeof name, "predicted (slope %.4f)", *fit.predicted);
    pred.name = name;
    pred.dashed = true;
    const double l0 = fit.points.front().lambda, n0 = fit.points.front().norm.value;
    for (const auto& pt : fit.points) {
      pred.x.push_back(pt.lambda);
      pred.y.push_back(n0 * std::pow(pt.lambda / l0, *fit.predicted));
    }
    series.push_back(std::move(pred));
  }
  return emit_plot(series, "lambda", "operator norm", title);
}

std::string decay_csv(const DecayFit& fit) {
  std::ostringstream os;
  os.precision(17);
  os << "lambda,m,requested_m,cap_hit,kind,norm,upper,testfn,schur\n";
  for (const auto& pt : fit.points) {
    os << pt.lambda << ',' << pt.m << ',' << pt.requested_m << ',' << (pt.cap_hit ? 1 : 0) << ','
       << to_string(pt.norm.kind) << ',' << pt.norm.value << ',';
    if (pt.upper) os << pt.upper->value;
    os << ',';
    if (pt.testfn) os << pt.testfn->value;
    os << ',' << pt.schur.value << '\n';
  }
  return os.str();
}

std::string config_hash(const nlohmann::json& config) {
  const std::string text = config.dump();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

nlohmann::json make_report(const nlohmann::json& config, nlohmann::json result) {
  return {{"config", config}, {"config_hash", config_hash(config)}, {"result", std::move(result)}};
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw InputError("write to '" + path + "' failed");
}

}  // namespace oscibound
