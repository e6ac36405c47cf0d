#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kreg/coreset.hpp"
#include "kreg/dataset.hpp"
#include "kreg/text.hpp"

namespace kreg {

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Column mapping for foreign CSV files. When date_time_cols is set, the two
/// columns (date d/m/yyyy, time hh:mm:ss) combine into minutes since the
/// first valid record as the single x coordinate and x_cols is ignored.
struct ColumnSchema {
    std::vector<std::size_t> x_cols{0};
    std::size_t y_col = 1;
    std::optional<std::size_t> w_col;
    char delim = ',';
    std::string missing_token = "?";
    std::optional<std::pair<std::size_t, std::size_t>> date_time_cols;
};

struct CsvLoad {
    Dataset data;
    std::size_t skipped_rows = 0;
};

namespace detail {

inline void split_fields(std::string_view line, char delim,
                         std::vector<std::string_view>& out) {
    out.clear();
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == delim) {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
}

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

/// "d/m/yyyy" + "hh:mm:ss" -> absolute minutes; nullopt on malformed input.
inline std::optional<double> parse_date_time_minutes(std::string_view date,
                                                     std::string_view time) {
    std::vector<std::string_view> dp, tp;
    split_fields(date, '/', dp);
    split_fields(time, ':', tp);
    if (dp.size() != 3 || tp.size() != 3) return std::nullopt;
    auto day = parse_int(dp[0]), mon = parse_int(dp[1]), year = parse_int(dp[2]);
    auto hh = parse_int(tp[0]), mm = parse_int(tp[1]), ss = parse_int(tp[2]);
    if (!day || !mon || !year || !hh || !mm || !ss) return std::nullopt;
    if (*mon < 1 || *mon > 12 || *day < 1 || *day > 31) return std::nullopt;
    std::int64_t days = days_from_civil(*year, static_cast<unsigned>(*mon),
                                        static_cast<unsigned>(*day));
    return static_cast<double>(days) * 1440.0 + static_cast<double>(*hh) * 60.0 +
           static_cast<double>(*mm) + static_cast<double>(*ss) / 60.0;
}

}  // namespace detail

/// Load a CSV under an explicit schema. Comment lines (#) are ignored; a
/// first line whose mapped columns fail to parse is treated as a header.
/// Rows with missing or unparseable mapped values are skipped and counted.
inline CsvLoad load_csv(const std::filesystem::path& path, const ColumnSchema& schema) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open " + path.string());

    const bool use_datetime = schema.date_time_cols.has_value();
    const std::size_t d = use_datetime ? 1 : schema.x_cols.size();
    if (d == 0) throw CsvError("schema maps no x columns");

    std::size_t needed = schema.y_col;
    for (std::size_t c : schema.x_cols) needed = std::max(needed, c);
    if (schema.w_col) needed = std::max(needed, *schema.w_col);
    if (use_datetime)
        needed = std::max({needed, schema.date_time_cols->first,
                           schema.date_time_cols->second});

    std::vector<double> xs, ys, ws;
    std::size_t skipped = 0;
    bool first_content_line = true;
    std::optional<double> t0;
    std::string line;
    std::vector<std::string_view> fields;
    std::vector<double> row_x(d);

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const bool was_first = first_content_line;
        first_content_line = false;

        detail::split_fields(line, schema.delim, fields);
        bool ok = fields.size() > needed;
        bool saw_missing = false;
        if (ok) {
            auto usable = [&](std::string_view s) {
                if (s.empty() || s == schema.missing_token) {
                    saw_missing = true;
                    return false;
                }
                return true;
            };
            auto number_at = [&](std::size_t c) -> std::optional<double> {
                return usable(fields[c]) ? parse_double(fields[c]) : std::nullopt;
            };
            double y = 0.0, w = 1.0;
            if (auto v = number_at(schema.y_col)) y = *v; else ok = false;
            if (ok && schema.w_col) {
                auto v = number_at(*schema.w_col);
                ok = v.has_value() && *v > 0.0;
                if (ok) w = *v;
            }
            if (ok && use_datetime) {
                auto [dc, tc] = *schema.date_time_cols;
                auto mins = (usable(fields[dc]) && usable(fields[tc]))
                                ? detail::parse_date_time_minutes(fields[dc], fields[tc])
                                : std::nullopt;
                ok = mins.has_value();
                if (ok) {
                    if (!t0) t0 = *mins;
                    row_x[0] = *mins - *t0;
                }
            } else if (ok) {
                for (std::size_t j = 0; ok && j < d; ++j) {
                    auto v = number_at(schema.x_cols[j]);
                    ok = v.has_value();
                    if (ok) row_x[j] = *v;
                }
            }
            if (ok) {
                xs.insert(xs.end(), row_x.begin(), row_x.end());
                ys.push_back(y);
                ws.push_back(w);
                continue;
            }
        }
        // A first line that fails for reasons other than a missing-value
        // marker is a column header, not a data row.
        if (was_first && !saw_missing) continue;
        ++skipped;
    }
    if (in.bad()) throw CsvError("read error on " + path.string());
    if (ys.empty())
        throw CsvError("no valid rows in " + path.string() +
                       " (check schema/column mapping)");
    return {Dataset(d, std::move(xs), std::move(ys), std::move(ws)), skipped};
}

/// Load the library's own format: optional # comments, a header
/// x1,...,xd,y[,w], then numeric rows. A headerless numeric file is read as
/// x1..xd,y with unit weights.
inline CsvLoad load_points(const std::filesystem::path& path) {
    std::ifstream probe(path);
    if (!probe) throw CsvError("cannot open " + path.string());
    std::string line;
    std::size_t columns = 0;
    bool has_w = false;
    while (std::getline(probe, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string_view> fields;
        detail::split_fields(line, ',', fields);
        columns = fields.size();
        has_w = !fields.empty() && fields.back() == "w";
        break;
    }
    if (columns < 2) throw CsvError("not a point file: " + path.string());
    ColumnSchema schema;
    schema.delim = ',';
    const std::size_t d = columns - 1 - (has_w ? 1 : 0);
    if (d < 1) throw CsvError("not a point file: " + path.string());
    schema.x_cols.clear();
    for (std::size_t j = 0; j < d; ++j) schema.x_cols.push_back(j);
    schema.y_col = d;
    if (has_w) schema.w_col = d + 1;
    return load_csv(path, schema);
}

/// Write points as x1,...,xd,y,w rows at 17 significant digits, preceded by
/// the given comment lines (without the leading "# ").
inline void write_points(const Dataset& ds, std::ostream& out,
                         const std::vector<std::string>& comments = {}) {
    for (const auto& c : comments) out << "# " << c << '\n';
    for (std::size_t j = 0; j < ds.dim(); ++j) out << 'x' << (j + 1) << ',';
    out << "y,w\n";
    std::string row;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        row.clear();
        auto xi = ds.x(i);
        for (std::size_t j = 0; j < ds.dim(); ++j) {
            row += format_double(xi[j]);
            row += ',';
        }
        row += format_double(ds.y(i));
        row += ',';
        row += format_double(ds.w(i));
        row += '\n';
        out << row;
    }
}

inline void save_points(const Dataset& ds, const std::filesystem::path& path,
                        const std::vector<std::string>& comments = {}) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot write " + path.string());
    write_points(ds, out, comments);
    if (!out) throw CsvError("write error on " + path.string());
}

inline std::string coreset_metadata_line(const Coreset& cs) {
    std::string s = "method=";
    s += method_name(cs.method);
    for (const auto& [k, v] : cs.params) {
        s += ' ';
        s += k;
        s += '=';
        s += v;
    }
    return s;
}

/// Persist a coreset with its provenance record as comment lines.
inline void save_coreset(const Coreset& cs, const std::filesystem::path& path) {
    char hex[32];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(cs.source_hash));
    save_points(cs.data, path,
                {coreset_metadata_line(cs), "seed=" + std::to_string(cs.seed),
                 std::string("source=fnv1a:") + hex});
}

}  // namespace kreg
