#pragma once

// Image quality measures. Images are assumed to live in [0, 1] (peak R = 1).

#include <iosfwd>
#include <string>
#include <vector>

#include "tvstokes/field.hpp"

namespace tvs {

// Plain pixel mean of squared differences (no h weighting).
double mse(const ScalarField& d, const ScalarField& gt);

// -10 log10(MSE); +infinity for identical images (check with std::isinf).
double psnr(const ScalarField& d, const ScalarField& gt);

// Single-window SSIM over the whole image, population variances,
// c1 = 0.01^2, c2 = 0.03^2.
double mssim(const ScalarField& d, const ScalarField& gt);

// sum over both components of PSNR / 2 + 20 * MSSIM / 2. +infinity when a
// component is reproduced exactly.
double perf_tau(const VectorField2& tau, const VectorField2& tau_gt);

struct MetricReport {
  double psnr = 0.0;
  double mssim = 0.0;
  double perf = 0.0;  // tangent fields only, 0 otherwise

  bool psnr_infinite() const noexcept;
};

MetricReport image_metrics(const ScalarField& d, const ScalarField& gt);

// Index of the largest value; infinities win, the first one on ties.
std::size_t argmax(const std::vector<double>& values);

struct MetricRow {
  std::string image_id;
  double noise_variance = 0.0;
  std::string method;
  std::string params;
  MetricReport report;
};

// "image,noise_variance,method,params,psnr,mssim"
void write_metrics_header(std::ostream& os);
void write_metrics_row(std::ostream& os, const MetricRow& row);

// Least-squares slope of log(gap) against log(n) for n in [first, last]
// (1-based iteration numbers into `gaps`); non-positive gaps are skipped.
double loglog_slope(const std::vector<double>& gaps, std::size_t first, std::size_t last);

}  // namespace tvs
