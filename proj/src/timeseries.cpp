#include "tsgad/timeseries.hpp"

#include "tsgad/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace tsgad {

namespace {

bool parse_double(const std::string& tok, double& out) {
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
    if (begin == end) return false;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

TimeSeries parse_signal_csv(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto toks = split_csv_line(line);
        if (toks.size() < 2)
            throw DataError(origin + ":" + std::to_string(lineno) +
                            ": expected at least 2 columns");
        std::vector<double> row(toks.size());
        // a header is recognized by a non-numeric timestamp column on the
        // first content line; a bad value elsewhere is always an error
        if (rows.empty() && names.empty() && !parse_double(toks[0], row[0])) {
            names.assign(toks.begin() + 1, toks.end());
            continue;
        }
        for (std::size_t i = 0; i < toks.size(); ++i)
            if (!parse_double(toks[i], row[i]))
                throw DataError(origin + ":" + std::to_string(lineno) +
                                ": cannot parse value '" + toks[i] + "'");
        if (width == 0) width = row.size();
        if (row.size() != width)
            throw DataError(origin + ":" + std::to_string(lineno) + ": inconsistent column count");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError(origin + ": no data rows");

    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a[0] < b[0]; });
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i][0] == rows[i - 1][0])
            throw DataError(origin + ": duplicate timestamp " + std::to_string(rows[i][0]));

    TimeSeries ts;
    const auto T = static_cast<Eigen::Index>(rows.size());
    const auto M = static_cast<Eigen::Index>(width - 1);
    ts.timestamps.resize(rows.size());
    ts.values.resize(T, M);
    for (Eigen::Index i = 0; i < T; ++i) {
        ts.timestamps[i] = rows[i][0];
        for (Eigen::Index j = 0; j < M; ++j) {
            const double v = rows[i][j + 1];
            if (!std::isfinite(v))
                throw DataError(origin + ": non-finite value at timestamp " +
                                std::to_string(rows[i][0]));
            ts.values(i, j) = v;
        }
    }
    ts.channel_names = std::move(names);
    return ts;
}

TimeSeries load_signal(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open signal file: " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_signal_csv(buf.str(), path);
}

void save_signal(const TimeSeries& ts, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write signal file: " + path);
    f.precision(17);
    for (Eigen::Index i = 0; i < ts.length(); ++i) {
        f << ts.timestamps[i];
        for (Eigen::Index j = 0; j < ts.channels(); ++j) f << ',' << ts.values(i, j);
        f << '\n';
    }
}

GroundTruthWindows load_labels(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open labels file: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("labels " + path + ": " + e.what());
    }
    if (!j.is_array()) throw DataError("labels " + path + ": expected a JSON array");
    GroundTruthWindows gt;
    for (const auto& w : j) {
        if (!w.is_array() || w.size() != 2)
            throw DataError("labels " + path + ": each entry must be [start, end]");
        double s = w[0].get<double>(), e = w[1].get<double>();
        if (s > e) throw DataError("labels " + path + ": start > end");
        gt.windows.emplace_back(s, e);
    }
    std::sort(gt.windows.begin(), gt.windows.end());
    return gt;
}

void save_labels(const GroundTruthWindows& gt, const std::string& path) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& [s, e] : gt.windows) j.push_back({s, e});
    std::ofstream f(path);
    if (!f) throw DataError("cannot write labels file: " + path);
    f << j.dump(2) << '\n';
}

TimeSeries aggregate(const TimeSeries& ts, int target_length) {
    const Eigen::Index T = ts.length();
    if (target_length < 2) throw ConfigError("aggregate: target_length must be >= 2");
    if (target_length > T) throw ConfigError("aggregate: target_length exceeds series length");

    const double t0 = ts.timestamps.front();
    const double span = ts.timestamps.back() - t0;
    const double h = span / (target_length - 1);
    const Eigen::Index M = ts.channels();

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(target_length, M);
    std::vector<int> counts(target_length, 0);
    for (Eigen::Index i = 0; i < T; ++i) {
        auto bin = static_cast<Eigen::Index>(std::llround((ts.timestamps[i] - t0) / h));
        bin = std::clamp<Eigen::Index>(bin, 0, target_length - 1);
        sums.row(bin) += ts.values.row(i);
        ++counts[bin];
    }
    if (std::all_of(counts.begin(), counts.end(), [](int c) { return c == 0; }))
        throw DataError("aggregate: no samples fell into any interval");

    TimeSeries out;
    out.channel_names = ts.channel_names;
    out.timestamps.resize(target_length);
    out.values.resize(target_length, M);
    for (Eigen::Index b = 0; b < target_length; ++b) {
        out.timestamps[b] = t0 + b * h;
        if (counts[b] > 0) out.values.row(b) = sums.row(b) / counts[b];
    }
    // fill empty grid points: linear interpolation between populated
    // neighbours, nearest value at the edges
    for (Eigen::Index b = 0; b < target_length; ++b) {
        if (counts[b] > 0) continue;
        Eigen::Index lo = b, hi = b;
        while (lo >= 0 && counts[lo] == 0) --lo;
        while (hi < target_length && counts[hi] == 0) ++hi;
        if (lo < 0 && hi >= target_length)
            throw DataError("aggregate: degenerate input, all intervals empty");
        if (lo < 0)
            out.values.row(b) = out.values.row(hi);
        else if (hi >= target_length)
            out.values.row(b) = out.values.row(lo);
        else {
            const double w = double(b - lo) / double(hi - lo);
            out.values.row(b) = (1.0 - w) * out.values.row(lo) + w * out.values.row(hi);
        }
    }
    return out;
}

std::pair<TimeSeries, NormParams> normalize(const TimeSeries& ts) {
    NormParams p;
    p.min = ts.values.colwise().minCoeff();
    p.max = ts.values.colwise().maxCoeff();
    for (Eigen::Index j = 0; j < ts.channels(); ++j)
        if (p.max(j) <= p.min(j))
            throw DataError("normalize: channel " + std::to_string(j) +
                            " is constant (zero range)");
    return {apply_normalization(ts, p), p};
}

TimeSeries apply_normalization(const TimeSeries& ts, const NormParams& params) {
    TimeSeries out = ts;
    for (Eigen::Index j = 0; j < ts.channels(); ++j) {
        const double range = params.max(j) - params.min(j);
        out.values.col(j) =
            2.0 * (ts.values.col(j).array() - params.min(j)) / range - 1.0;
    }
    return out;
}

TimeSeries denormalize(const TimeSeries& ts, const NormParams& params) {
    TimeSeries out = ts;
    for (Eigen::Index j = 0; j < ts.channels(); ++j) {
        const double range = params.max(j) - params.min(j);
        out.values.col(j) =
            (ts.values.col(j).array() + 1.0) * 0.5 * range + params.min(j);
    }
    return out;
}

TimeSeries detrend(const TimeSeries& ts) {
    const Eigen::Index T = ts.length();
    if (T < 2) throw DataError("detrend: need at least 2 points");
    TimeSeries out = ts;
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(T, 0, double(T - 1));
    const double xm = x.mean();
    const double sxx = (x.array() - xm).square().sum();
    for (Eigen::Index j = 0; j < ts.channels(); ++j) {
        const double ym = ts.values.col(j).mean();
        const double sxy = ((x.array() - xm) * (ts.values.col(j).array() - ym)).sum();
        const double slope = sxy / sxx;
        const double intercept = ym - slope * xm;
        out.values.col(j) = ts.values.col(j).array() - (slope * x.array() + intercept);
    }
    return out;
}

WindowSet make_windows(const TimeSeries& ts, const WindowConfig& cfg) {
    const Eigen::Index T = ts.length();
    if (cfg.window_size < 1 || cfg.step_size < 1)
        throw ConfigError("make_windows: window_size and step_size must be positive");
    if (cfg.window_size > T)
        throw ConfigError("make_windows: window_size " + std::to_string(cfg.window_size) +
                          " exceeds series length " + std::to_string(T));
    WindowSet ws;
    const auto N = static_cast<std::size_t>((T - cfg.window_size) / cfg.step_size + 1);
    ws.windows.reserve(N);
    ws.start_indices.reserve(N);
    for (std::size_t i = 0; i < N; ++i) {
        const auto start = static_cast<Eigen::Index>(i) * cfg.step_size;
        ws.windows.push_back(ts.values.middleRows(start, cfg.window_size));
        ws.start_indices.push_back(static_cast<int>(start));
    }
    return ws;
}

}  // namespace tsgad
