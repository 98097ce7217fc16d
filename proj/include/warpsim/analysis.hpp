#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "warpsim/rng.hpp"
#include "warpsim/warp.hpp"

namespace warpsim {

// Piecewise-linear quantile function. Boundary convention: prob 0 carries the
// infimum of the interior values and prob 1 the supremum.
class QuantileFunction {
  public:
    QuantileFunction(std::vector<double> probs, std::vector<double> values);

    double operator()(double prob) const;
    const std::vector<double>& probs() const { return probs_; }
    const std::vector<double>& values() const { return values_; }
    double min_value() const { return values_.front(); }
    double max_value() const { return values_.back(); }

  private:
    std::vector<double> probs_;
    std::vector<double> values_;
};

// Sorted-data quantile function: interior knots at k/(len+1) carrying the k-th
// order statistic, so evaluation at k/(len+1) returns that order statistic.
QuantileFunction empirical_quantile(const std::vector<double>& data);

struct PeriodDataset {
    std::string label;
    std::vector<double> observations;
    std::size_t count() const { return observations.size(); }
};

// Rescaled quantile warp: with gamma = F0 o Q_sample (F0 the numerical inverse
// of the reference quantile function), returns (gamma - gamma(0)) /
// (gamma(1) - gamma(0)) sampled on a uniform grid as a strictly increasing
// piecewise-linear warp. Throws DegenerateWarpError for a constant sample.
WarpPath warp_from_quantiles(const QuantileFunction& reference,
                             const QuantileFunction& sample_q,
                             std::size_t grid_size = 1001);

// Pointwise mean of m >= 2 warps on a common grid.
std::vector<double> estimate_phi(const std::vector<WarpPath>& warps,
                                 const std::vector<double>& grid);

struct ThetaEstimate {
    double value = 0.0;
    bool negative_flagged = false;  // raw estimate was <= 0 (returned as-is)
};

// theta_hat = int phi_hat (1 - phi_hat) / int v_hat - 1, trapezoid on the grid.
ThetaEstimate estimate_theta(const std::vector<WarpPath>& warps,
                             const std::vector<double>& phi_hat,
                             const std::vector<double>& grid);

struct ThetaStudyRow {
    std::size_t n = 0;
    double mean_ratio = 0.0;  // mean over B runs of theta_hat / theta
    double sd_ratio = 0.0;    // unbiased standard deviation of the ratios
};

// Estimator study: B runs of (m CDF paths with identity target, p = 0.5).
std::vector<ThetaStudyRow> theta_study(double theta, const std::vector<std::size_t>& n_values,
                                       std::size_t m, std::size_t B,
                                       std::uint64_t master_seed);

struct BandResult {
    std::vector<double> grid;      // probs
    std::vector<double> phi_hat;
    std::vector<double> centered;  // phi_hat - identity
    double half_width = 0.0;       // h
    double alpha = 0.0;
    double theta_hat = 0.0;
    std::size_t replicates_used = 0;  // B
    bool theta_clamped = false;       // raw theta_hat <= 0 was clamped to 1e-6
};

// ceil((1-alpha) * B)-th order statistic of the sup-norm sample.
double sup_norm_quantile(std::vector<double> sups, double alpha);

// Parametric bootstrap: B replicate means of m CDF paths with the empirical
// target phi_hat; h is the (1-alpha) empirical quantile of sup distances.
BandResult bootstrap_bands(const std::vector<double>& phi_hat, double theta_hat, double p,
                           std::size_t n_i, std::size_t m, std::size_t B, double alpha,
                           const std::vector<double>& grid, std::uint64_t master_seed);

struct Record {
    std::int64_t timestamp = 0;  // seconds since the Unix epoch, UTC
    double value = 0.0;
};

struct CsvSchema {
    std::string timestamp_column = "timestamp";
    std::string value_column = "value";
};

struct IngestResult {
    std::vector<Record> records;
    std::size_t skipped = 0;  // rows with missing or non-numeric values
};

IngestResult load_observations_csv(const std::string& path, const CsvSchema& schema = {});
void write_observations_csv(const std::string& path, const std::vector<Record>& records);

// "YYYY-MM-DD[THH:MM[:SS]]" (UTC) <-> epoch seconds.
std::int64_t parse_iso8601(const std::string& text);
std::string format_iso8601(std::int64_t ts);

struct PeriodSpec {
    std::string label;
    std::int64_t start = 0;  // inclusive
    std::int64_t end = 0;    // exclusive
};

// Half-open assignment [start, end); periods may leave gaps; a record exactly
// at a shared boundary belongs to the later period. Empty periods allowed.
std::vector<PeriodDataset> split_periods(const std::vector<Record>& records,
                                         const std::vector<PeriodSpec>& periods);

// Uniformly random partition into m near-equal parts (sizes differ by <= 1);
// the union reproduces the original multiset.
std::vector<std::vector<double>> random_split(const PeriodDataset& dataset, std::size_t m,
                                              RngStream& rng);

struct SynthPeriodSpec {
    std::string label;
    std::int64_t start = 0;        // first hourly timestamp
    std::size_t count = 0;         // number of hourly records
    double location_shift = 0.0;   // additive drift
    double scale = 1.0;            // noise scale factor
};

// Seasonal-plus-noise hourly series whose per-period distributions shift by
// the configured drift; stands in for the proprietary station data.
std::vector<Record> synthesize_temperature(const std::vector<SynthPeriodSpec>& periods,
                                           RngStream& rng);

struct AnalyzeOptions {
    std::size_t m = 50;
    std::size_t B = 100;
    double alpha = 0.05;
    double p = 0.5;
    std::size_t grid_size = 1001;
    std::uint64_t master_seed = 0;
};

struct PeriodAnalysis {
    std::string label;
    std::size_t count = 0;
    std::size_t n_i = 0;      // count / m (floor)
    ThetaEstimate theta;
    BandResult band;
};

// Full quantile-warp drift pipeline: reference quantile function from the
// pooled reference range, per-period random split, warp construction,
// (phi_hat, theta_hat) estimation and bootstrap bands.
std::vector<PeriodAnalysis> analyze_periods(const std::vector<Record>& records,
                                            std::int64_t reference_start,
                                            std::int64_t reference_end,
                                            const std::vector<PeriodSpec>& periods,
                                            const AnalyzeOptions& options);

// CSV (prob, phi_hat, centered, lower, upper) and JSON metadata for a band.
void write_band_csv(std::ostream& os, const BandResult& band);
std::string band_metadata_json(const BandResult& band, std::uint64_t master_seed);

}  // namespace warpsim
