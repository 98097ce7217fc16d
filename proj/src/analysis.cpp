#include "warpsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "warpsim/errors.hpp"
#include "warpsim/samplers.hpp"

namespace warpsim {

QuantileFunction::QuantileFunction(std::vector<double> probs, std::vector<double> values)
    : probs_(std::move(probs)), values_(std::move(values)) {
    if (probs_.size() != values_.size() || probs_.size() < 2)
        throw InvalidParameterError("QuantileFunction: need matching probs/values, >= 2 knots");
    if (probs_.front() != 0.0 || probs_.back() != 1.0)
        throw InvalidParameterError("QuantileFunction: probs must span [0,1]");
    for (std::size_t i = 0; i + 1 < probs_.size(); ++i) {
        if (!(probs_[i] < probs_[i + 1]))
            throw InvalidParameterError("QuantileFunction: probs must be strictly increasing");
        if (values_[i + 1] < values_[i])
            throw InvalidParameterError("QuantileFunction: values must be non-decreasing");
    }
}

double QuantileFunction::operator()(double prob) const {
    if (prob < 0.0 || prob > 1.0) throw DomainError("QuantileFunction: prob outside [0,1]");
    if (prob <= probs_.front()) return values_.front();
    if (prob >= probs_.back()) return values_.back();
    auto it = std::upper_bound(probs_.begin(), probs_.end(), prob);
    std::size_t hi = static_cast<std::size_t>(it - probs_.begin());
    std::size_t lo = hi - 1;
    double w = (prob - probs_[lo]) / (probs_[hi] - probs_[lo]);
    return values_[lo] + w * (values_[hi] - values_[lo]);
}

QuantileFunction empirical_quantile(const std::vector<double>& data) {
    if (data.empty()) throw IngestionError("empirical_quantile: empty data");
    std::vector<double> sorted = data;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    std::vector<double> probs, values;
    probs.reserve(n + 2);
    values.reserve(n + 2);
    probs.push_back(0.0);
    values.push_back(sorted.front());  // inf of interior values
    for (std::size_t k = 1; k <= n; ++k) {
        double pk = static_cast<double>(k) / static_cast<double>(n + 1);
        if (pk <= probs.back()) continue;  // collapse float-equal probs
        probs.push_back(pk);
        values.push_back(sorted[k - 1]);
    }
    probs.push_back(1.0);
    values.push_back(sorted.back());  // sup of interior values
    return QuantileFunction(std::move(probs), std::move(values));
}

namespace {

// CDF of the reference period: numerical inverse of its quantile function on
// the value axis, clamped to [0,1] outside the observed range.
double reference_cdf(const QuantileFunction& q, double y) {
    const auto& vals = q.values();
    const auto& probs = q.probs();
    if (y <= vals.front()) return 0.0;
    if (y >= vals.back()) return 1.0;
    auto it = std::upper_bound(vals.begin(), vals.end(), y);
    std::size_t hi = static_cast<std::size_t>(it - vals.begin());
    std::size_t lo = hi - 1;
    double dv = vals[hi] - vals[lo];
    if (dv <= 0.0) return probs[hi];  // flat stretch: right end
    return probs[lo] + (y - vals[lo]) / dv * (probs[hi] - probs[lo]);
}

}  // namespace

WarpPath warp_from_quantiles(const QuantileFunction& reference,
                             const QuantileFunction& sample_q, std::size_t grid_size) {
    if (grid_size < 3) throw InvalidParameterError("warp_from_quantiles: grid too small");
    double g0 = reference_cdf(reference, sample_q.min_value());
    double g1 = reference_cdf(reference, sample_q.max_value());
    if (!(g1 > g0))
        throw DegenerateWarpError("warp_from_quantiles: sample is constant under the reference");

    std::vector<double> xs(grid_size), ys(grid_size);
    for (std::size_t i = 0; i < grid_size; ++i) {
        double x = static_cast<double>(i) / static_cast<double>(grid_size - 1);
        xs[i] = x;
        double g = reference_cdf(reference, sample_q(x));
        ys[i] = (g - g0) / (g1 - g0);
    }
    xs.front() = 0.0;
    xs.back() = 1.0;
    ys.front() = 0.0;
    ys.back() = 1.0;
    // membership in the derivative-bounded class needs strictly positive
    // slopes; lift flat stretches by a hair and renormalize
    const double min_slope = 1e-9 / static_cast<double>(grid_size);
    for (std::size_t i = 1; i < grid_size; ++i) {
        double dx = xs[i] - xs[i - 1];
        if (ys[i] - ys[i - 1] < min_slope * dx) ys[i] = ys[i - 1] + min_slope * dx;
    }
    double total = ys.back();
    for (auto& y : ys) y /= total;
    ys.back() = 1.0;
    return WarpPath(std::move(xs), std::move(ys));
}

std::vector<double> estimate_phi(const std::vector<WarpPath>& warps,
                                 const std::vector<double>& grid) {
    if (warps.size() < 2)
        throw InsufficientSampleError("estimate_phi: need at least 2 warps");
    std::vector<double> phi(grid.size(), 0.0);
    for (const auto& w : warps)
        for (std::size_t i = 0; i < grid.size(); ++i) phi[i] += w(grid[i]);
    for (auto& x : phi) x /= static_cast<double>(warps.size());
    return phi;
}

namespace {

double trapz_on(const std::vector<double>& grid, const std::vector<double>& f) {
    double sum = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        sum += 0.5 * (f[i] + f[i - 1]) * (grid[i] - grid[i - 1]);
    return sum;
}

}  // namespace

ThetaEstimate estimate_theta(const std::vector<WarpPath>& warps,
                             const std::vector<double>& phi_hat,
                             const std::vector<double>& grid) {
    if (warps.size() < 2)
        throw InsufficientSampleError("estimate_theta: need at least 2 warps");
    if (phi_hat.size() != grid.size())
        throw InvalidParameterError("estimate_theta: phi_hat/grid size mismatch");
    const double m = static_cast<double>(warps.size());
    std::vector<double> var(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double s = 0.0, s2 = 0.0;
        for (const auto& w : warps) {
            double x = w(grid[i]);
            s += x;
            s2 += x * x;
        }
        double mean = s / m;
        var[i] = std::max((s2 - m * mean * mean) / (m - 1.0), 0.0);
    }
    double denom = trapz_on(grid, var);
    if (denom <= 0.0)
        throw DegenerateEstimateError("estimate_theta: zero integrated variance (identical paths)");
    std::vector<double> num(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) num[i] = phi_hat[i] * (1.0 - phi_hat[i]);
    ThetaEstimate est;
    est.value = trapz_on(grid, num) / denom - 1.0;
    est.negative_flagged = est.value <= 0.0;
    return est;
}

namespace {

std::vector<double> uniform_probs(std::size_t size) {
    std::vector<double> g(size);
    for (std::size_t i = 0; i < size; ++i)
        g[i] = static_cast<double>(i) / static_cast<double>(size - 1);
    g.back() = 1.0;
    return g;
}

}  // namespace

std::vector<ThetaStudyRow> theta_study(double theta, const std::vector<std::size_t>& n_values,
                                       std::size_t m, std::size_t B,
                                       std::uint64_t master_seed) {
    if (m < 2 || B < 2) throw InvalidParameterError("theta_study: need m >= 2 and B >= 2");
    const auto grid = uniform_probs(1001);
    RngStream root(master_seed);
    std::vector<ThetaStudyRow> rows;
    rows.reserve(n_values.size());
    for (std::size_t ni = 0; ni < n_values.size(); ++ni) {
        const std::size_t n = n_values[ni];
        RngStream row_root = root.split(ni);
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t b = 0; b < B; ++b) {
            RngStream bs = row_root.split(b);
            std::vector<WarpPath> warps;
            warps.reserve(m);
            CdfConfig cfg{n, theta, 0.5, TargetWarp::phi1()};
            for (std::size_t j = 0; j < m; ++j) {
                RngStream ps = bs.split(j);
                warps.push_back(simulate_cdf(cfg, ps));
            }
            auto phi_hat = estimate_phi(warps, grid);
            double ratio = estimate_theta(warps, phi_hat, grid).value / theta;
            sum += ratio;
            sum2 += ratio * ratio;
        }
        const double Bd = static_cast<double>(B);
        ThetaStudyRow row;
        row.n = n;
        row.mean_ratio = sum / Bd;
        row.sd_ratio = std::sqrt(std::max((sum2 - Bd * row.mean_ratio * row.mean_ratio) /
                                              (Bd - 1.0),
                                          0.0));
        rows.push_back(row);
    }
    return rows;
}

double sup_norm_quantile(std::vector<double> sups, double alpha) {
    if (sups.empty()) throw InvalidParameterError("sup_norm_quantile: empty sample");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InvalidParameterError("sup_norm_quantile: alpha must be in (0,1)");
    std::sort(sups.begin(), sups.end());
    const std::size_t B = sups.size();
    std::size_t k = static_cast<std::size_t>(
        std::ceil((1.0 - alpha) * static_cast<double>(B)));
    if (k == 0) k = 1;
    if (k > B) k = B;
    return sups[k - 1];
}

BandResult bootstrap_bands(const std::vector<double>& phi_hat, double theta_hat, double p,
                           std::size_t n_i, std::size_t m, std::size_t B, double alpha,
                           const std::vector<double>& grid, std::uint64_t master_seed) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InvalidParameterError("bootstrap_bands: alpha must be in (0,1)");
    if (B < 20) throw InvalidParameterError("bootstrap_bands: need B >= 20");
    if (m < 2 || n_i < 1) throw InvalidParameterError("bootstrap_bands: need m >= 2, n_i >= 1");
    if (phi_hat.size() != grid.size())
        throw InvalidParameterError("bootstrap_bands: phi_hat/grid size mismatch");

    BandResult band;
    band.theta_hat = theta_hat;
    if (theta_hat <= 0.0) {
        theta_hat = 1e-6;
        band.theta_clamped = true;
    }

    // phi_hat as a target for the polygonal sampler
    std::vector<double> xs = grid;
    std::vector<double> ys = phi_hat;
    xs.front() = 0.0;
    xs.back() = 1.0;
    ys.front() = 0.0;
    ys.back() = 1.0;
    for (std::size_t i = 1; i + 1 < ys.size(); ++i) ys[i] = std::max(ys[i], ys[i - 1]);
    TargetWarp target = TargetWarp::empirical(WarpPath(xs, ys), "phi_hat");

    RngStream root(master_seed);
    std::vector<double> sups(B, 0.0);
    CdfConfig cfg{n_i, theta_hat, p, target};
    for (std::size_t b = 0; b < B; ++b) {
        RngStream bs = root.split(b);
        std::vector<double> mean(grid.size(), 0.0);
        for (std::size_t j = 0; j < m; ++j) {
            RngStream ps = bs.split(j);
            WarpPath w = simulate_cdf(cfg, ps);
            for (std::size_t i = 0; i < grid.size(); ++i) mean[i] += w(grid[i]);
        }
        double sup = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            sup = std::max(sup, std::abs(mean[i] / static_cast<double>(m) - phi_hat[i]));
        sups[b] = sup;
    }

    band.grid = grid;
    band.phi_hat = phi_hat;
    band.centered.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) band.centered[i] = phi_hat[i] - grid[i];
    band.half_width = sup_norm_quantile(sups, alpha);
    band.alpha = alpha;
    band.replicates_used = B;
    return band;
}

namespace {

// Howard Hinnant's days-from-civil algorithm.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

}  // namespace

std::int64_t parse_iso8601(const std::string& text) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    int matched = std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d", &y, &mo, &d, &h, &mi, &s);
    if (matched < 3) {
        if (std::sscanf(text.c_str(), "%d", &y) == 1 && text.size() == 4) {
            mo = 1;
            d = 1;
        } else {
            throw IngestionError("bad ISO-8601 timestamp: " + text);
        }
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 ||
        s < 0 || s > 60)
        throw IngestionError("bad ISO-8601 timestamp: " + text);
    return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

std::string format_iso8601(std::int64_t ts) {
    std::int64_t days = ts / 86400;
    std::int64_t rem = ts % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d", y, m, d,
                  static_cast<int>(rem / 3600), static_cast<int>((rem % 3600) / 60),
                  static_cast<int>(rem % 60));
    return buf;
}

IngestResult load_observations_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream is(path);
    if (!is) throw IngestionError("cannot open: " + path);
    std::string line;
    if (!std::getline(is, line)) throw IngestionError("empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    // locate the schema's columns in the header
    std::vector<std::string> cols;
    {
        std::istringstream hs(line);
        std::string c;
        while (std::getline(hs, c, ',')) cols.push_back(c);
    }
    std::size_t ts_idx = cols.size(), val_idx = cols.size();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] == schema.timestamp_column) ts_idx = i;
        if (cols[i] == schema.value_column) val_idx = i;
    }
    if (ts_idx >= cols.size() || val_idx >= cols.size())
        throw IngestionError(path + ": header must contain columns '" +
                             schema.timestamp_column + "' and '" + schema.value_column + "'");

    IngestResult out;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field, ts_field, val_field;
        std::size_t idx = 0;
        while (std::getline(ls, field, ',')) {
            if (idx == ts_idx) ts_field = field;
            if (idx == val_idx) val_field = field;
            ++idx;
        }
        try {
            if (ts_field.empty() || val_field.empty()) throw IngestionError("missing field");
            std::size_t pos = 0;
            double v = std::stod(val_field, &pos);
            if (pos != val_field.size() || !std::isfinite(v)) throw IngestionError("bad value");
            out.records.push_back({parse_iso8601(ts_field), v});
        } catch (const std::exception&) {
            ++out.skipped;
        }
    }
    if (out.records.empty()) throw IngestionError(path + ": no valid rows");
    return out;
}

void write_observations_csv(const std::string& path, const std::vector<Record>& records) {
    std::ofstream os(path);
    if (!os) throw IngestionError("cannot open for writing: " + path);
    os << "timestamp,value\n";
    os.precision(17);
    for (const auto& r : records) os << format_iso8601(r.timestamp) << ',' << r.value << '\n';
}

std::vector<PeriodDataset> split_periods(const std::vector<Record>& records,
                                         const std::vector<PeriodSpec>& periods) {
    for (const auto& p : periods)
        if (!(p.start < p.end)) throw InvalidParameterError("split_periods: start must precede end");
    std::vector<PeriodDataset> out;
    out.reserve(periods.size());
    for (const auto& p : periods) out.push_back({p.label, {}});
    for (const auto& r : records) {
        for (std::size_t i = 0; i < periods.size(); ++i) {
            if (r.timestamp >= periods[i].start && r.timestamp < periods[i].end) {
                out[i].observations.push_back(r.value);
                break;
            }
        }
    }
    return out;
}

std::vector<std::vector<double>> random_split(const PeriodDataset& dataset, std::size_t m,
                                              RngStream& rng) {
    const std::size_t count = dataset.count();
    if (m < 1) throw InvalidParameterError("random_split: m must be >= 1");
    if (m > count) throw InvalidParameterError("random_split: m exceeds the dataset size");
    std::vector<double> shuffled = dataset.observations;
    for (std::size_t i = count - 1; i > 0; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
        std::swap(shuffled[i], shuffled[j]);
    }
    const std::size_t base = count / m;
    const std::size_t extra = count % m;  // first `extra` parts get one more
    std::vector<std::vector<double>> parts(m);
    std::size_t pos = 0;
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t len = base + (k < extra ? 1 : 0);
        parts[k].assign(shuffled.begin() + pos, shuffled.begin() + pos + len);
        pos += len;
    }
    return parts;
}

std::vector<Record> synthesize_temperature(const std::vector<SynthPeriodSpec>& periods,
                                           RngStream& rng) {
    std::vector<Record> records;
    for (const auto& p : periods) {
        records.reserve(records.size() + p.count);
        for (std::size_t k = 0; k < p.count; ++k) {
            std::int64_t ts = p.start + static_cast<std::int64_t>(k) * 3600;
            double day_of_year = std::fmod(static_cast<double>(ts) / 86400.0, 365.25);
            double hour = std::fmod(static_cast<double>(ts) / 3600.0, 24.0);
            double seasonal = 6.0 - 14.0 * std::cos(2.0 * M_PI * (day_of_year - 15.0) / 365.25);
            double diurnal = 4.0 * std::cos(2.0 * M_PI * (hour - 15.0) / 24.0);
            double noise = 3.5 * p.scale * rng.normal();
            records.push_back({ts, seasonal + diurnal + p.location_shift + noise});
        }
    }
    return records;
}

std::vector<PeriodAnalysis> analyze_periods(const std::vector<Record>& records,
                                            std::int64_t reference_start,
                                            std::int64_t reference_end,
                                            const std::vector<PeriodSpec>& periods,
                                            const AnalyzeOptions& options) {
    if (!(reference_start < reference_end))
        throw InvalidParameterError("analyze_periods: bad reference range");
    std::vector<double> reference_data;
    for (const auto& r : records)
        if (r.timestamp >= reference_start && r.timestamp < reference_end)
            reference_data.push_back(r.value);
    if (reference_data.size() < 2)
        throw IngestionError("analyze_periods: reference period has too few observations");
    QuantileFunction reference = empirical_quantile(reference_data);

    auto datasets = split_periods(records, periods);
    const auto grid = uniform_probs(options.grid_size);

    RngStream root(options.master_seed);
    std::vector<PeriodAnalysis> results;
    results.reserve(datasets.size());
    for (std::size_t i = 0; i < datasets.size(); ++i) {
        const auto& ds = datasets[i];
        if (ds.count() < options.m)
            throw InsufficientSampleError("analyze_periods: period '" + ds.label +
                                          "' has fewer observations than m");
        RngStream period_stream = root.split(i);
        RngStream split_stream = period_stream.split(0);
        auto samples = random_split(ds, options.m, split_stream);

        std::vector<WarpPath> warps;
        warps.reserve(options.m);
        for (const auto& sample : samples) {
            try {
                warps.push_back(
                    warp_from_quantiles(reference, empirical_quantile(sample), options.grid_size));
            } catch (const Error& e) {
                throw DegenerateWarpError("period '" + ds.label + "': " + e.what());
            }
        }

        PeriodAnalysis pa;
        pa.label = ds.label;
        pa.count = ds.count();
        pa.n_i = ds.count() / options.m;
        auto phi_hat = estimate_phi(warps, grid);
        pa.theta = estimate_theta(warps, phi_hat, grid);
        pa.band = bootstrap_bands(phi_hat, pa.theta.value, options.p, pa.n_i, options.m,
                                  options.B, options.alpha, grid,
                                  period_stream.split(1).stream_id());
        results.push_back(std::move(pa));
    }
    return results;
}

void write_band_csv(std::ostream& os, const BandResult& band) {
    os << "prob,phi_hat,centered,lower,upper\n";
    os.precision(17);
    for (std::size_t i = 0; i < band.grid.size(); ++i)
        os << band.grid[i] << ',' << band.phi_hat[i] << ',' << band.centered[i] << ','
           << band.centered[i] - band.half_width << ',' << band.centered[i] + band.half_width
           << '\n';
}

std::string band_metadata_json(const BandResult& band, std::uint64_t master_seed) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"theta_hat\":" << band.theta_hat << ",\"h\":" << band.half_width
       << ",\"alpha\":" << band.alpha << ",\"B\":" << band.replicates_used
       << ",\"seed\":" << master_seed << ",\"theta_clamped\":"
       << (band.theta_clamped ? "true" : "false") << "}";
    return os.str();
}

}  // namespace warpsim
