#include "tvstokes/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "tvstokes/errors.hpp"

namespace tvs {

namespace {

void check_pair(const ScalarField& d, const ScalarField& gt) {
  if (d.rows() != gt.rows() || d.cols() != gt.cols()) {
    throw ShapeError("metric inputs differ in size: " + to_string(d.grid()) + " vs " +
                     to_string(gt.grid()));
  }
}

// quote only when needed
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

double mse(const ScalarField& d, const ScalarField& gt) {
  check_pair(d, gt);
  const auto a = d.values();
  const auto b = gt.values();
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s / static_cast<double>(a.size());
}

double psnr(const ScalarField& d, const ScalarField& gt) {
  const double e = mse(d, gt);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(e);
}

double mssim(const ScalarField& d, const ScalarField& gt) {
  check_pair(d, gt);
  constexpr double c1 = 0.01 * 0.01;
  constexpr double c2 = 0.03 * 0.03;
  const auto a = d.values();
  const auto b = gt.values();
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ma += a[k];
    mb += b[k];
  }
  ma /= n;
  mb /= n;
  double va = 0.0, vb = 0.0, cov = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    va += (a[k] - ma) * (a[k] - ma);
    vb += (b[k] - mb) * (b[k] - mb);
    cov += (a[k] - ma) * (b[k] - mb);
  }
  va /= n;
  vb /= n;
  cov /= n;
  return (2.0 * ma * mb + c1) * (2.0 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
}

double perf_tau(const VectorField2& tau, const VectorField2& tau_gt) {
  tau.check_same_grid(tau_gt);
  double s = 0.0;
  for (std::size_t c = 0; c < 2; ++c) {
    const ScalarField a = component(tau, c);
    const ScalarField b = component(tau_gt, c);
    s += 0.5 * psnr(a, b) + 20.0 * 0.5 * mssim(a, b);
  }
  return s;
}

bool MetricReport::psnr_infinite() const noexcept { return std::isinf(psnr); }

MetricReport image_metrics(const ScalarField& d, const ScalarField& gt) {
  return {psnr(d, gt), mssim(d, gt), 0.0};
}

std::size_t argmax(const std::vector<double>& values) {
  if (values.empty()) throw ShapeError("argmax of an empty list");
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] > values[best]) best = k;
  return best;
}

void write_metrics_header(std::ostream& os) { os << "image,noise_variance,method,params,psnr,mssim\n"; }

void write_metrics_row(std::ostream& os, const MetricRow& row) {
  os << csv_field(row.image_id) << ',' << row.noise_variance << ',' << csv_field(row.method) << ','
     << csv_field(row.params) << ',';
  if (row.report.psnr_infinite())
    os << "inf";
  else
    os << row.report.psnr;
  os << ',' << row.report.mssim << '\n';
}

double loglog_slope(const std::vector<double>& gaps, std::size_t first, std::size_t last) {
  if (first < 1 || last > gaps.size() || first >= last) throw ConfigError("bad fit range");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t k = first; k <= last; ++k) {
    if (!(gaps[k - 1] > 0.0)) continue;
    const double x = std::log(static_cast<double>(k));
    const double y = std::log(gaps[k - 1]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw ConfigError("not enough positive gaps to fit a slope");
  const double m = static_cast<double>(n);
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace tvs
