#include "gtecon/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gtecon {

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, delim)) fields.push_back(cur);
    if (!line.empty() && line.back() == delim) fields.push_back("");
    return fields;
}

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

char detect_delimiter(const std::string& header) {
    auto commas = std::count(header.begin(), header.end(), ',');
    auto semis = std::count(header.begin(), header.end(), ';');
    return semis > commas ? ';' : ',';
}

std::optional<double> parse_double(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<int> parse_int(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) return std::nullopt;
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

bool valid_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    int month = (s[5] - '0') * 10 + (s[6] - '0');
    int day = (s[8] - '0') * 10 + (s[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

struct CsvFile {
    char delim = ',';
    std::vector<std::string> header;
    std::ifstream stream;
};

CsvFile open_csv(const std::string& path) {
    CsvFile csv;
    csv.stream.open(path);
    if (!csv.stream) throw DataError("cannot open file: " + path);
    std::string header_line;
    if (!std::getline(csv.stream, header_line)) {
        throw DataError("empty file: " + path);
    }
    if (!header_line.empty() && header_line.back() == '\r') header_line.pop_back();
    csv.delim = detect_delimiter(header_line);
    for (auto& col : split(header_line, csv.delim)) csv.header.push_back(trim(col));
    return csv;
}

std::size_t column_index(const CsvFile& csv, const std::string& name,
                         const std::string& path) {
    auto it = std::find(csv.header.begin(), csv.header.end(), name);
    if (it == csv.header.end()) {
        throw DataError("missing column '" + name + "' in " + path);
    }
    return static_cast<std::size_t>(it - csv.header.begin());
}

}  // namespace

void IngestReport::note(std::int64_t line, const std::string& what) {
    if (diagnostics.size() < 20) {
        diagnostics.push_back("line " + std::to_string(line) + ": " + what);
    }
}

std::string IngestReport::to_json() const {
    nlohmann::json j{{"rows_in", rows_in},
                     {"parsed", parsed},
                     {"rejected", rejected},
                     {"filtered", filtered},
                     {"warnings", warnings},
                     {"diagnostics", diagnostics}};
    return j.dump(2);
}

double prevalence_from_incidence(double incidence_7day, double duration_days,
                                 bool* clamped) {
    if (incidence_7day < 0.0) throw ValidationError("incidence must be >= 0");
    if (!(duration_days > 0.0)) throw ValidationError("duration must be > 0");
    double p = (incidence_7day / 7.0) * duration_days / 100000.0;
    bool clip = p > 1.0 - 1e-9;
    if (clamped) *clamped = clip;
    return clip ? 1.0 - 1e-9 : p;
}

double daily_income(double monthly_gross, double weekly_hours, DailyIncomeRule rule) {
    if (!(monthly_gross > 0.0)) throw ValidationError("monthly income must be > 0");
    if (!(weekly_hours > 0.0)) throw ValidationError("weekly hours must be > 0");
    const double weekly_income = monthly_gross / 4.345;
    switch (rule) {
        case DailyIncomeRule::hours_based:
            return weekly_income / (weekly_hours / 5.0);
        case DailyIncomeRule::five_day_week:
            return weekly_income / 5.0;
    }
    throw ValidationError("unknown daily income rule");
}

std::vector<IncidenceRecord> load_incidence_csv(const std::string& path,
                                                const IncidenceFormat& format,
                                                IngestReport& report) {
    CsvFile csv = open_csv(path);
    const std::size_t id_idx = column_index(csv, format.location_col, path);
    const std::size_t date_idx = column_index(csv, format.date_col, path);
    const std::size_t inc_idx = column_index(csv, format.incidence_col, path);
    const std::size_t need = std::max({id_idx, date_idx, inc_idx}) + 1;

    std::vector<IncidenceRecord> records;
    std::map<std::pair<std::string, std::string>, std::size_t> seen;
    std::string line;
    std::int64_t lineno = 1;
    while (std::getline(csv.stream, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        ++report.rows_in;
        auto fields = split(line, csv.delim);
        if (fields.size() < need) {
            ++report.rejected;
            report.note(lineno, "too few columns");
            continue;
        }
        IncidenceRecord rec;
        rec.location_id = trim(fields[id_idx]);
        rec.date = trim(fields[date_idx]);
        auto incidence = parse_double(fields[inc_idx]);
        if (rec.location_id.empty() || !valid_iso_date(rec.date) || !incidence) {
            ++report.rejected;
            report.note(lineno, "malformed id, date or incidence");
            continue;
        }
        if (*incidence < 0.0) {
            ++report.rejected;
            report.note(lineno, "negative incidence");
            continue;
        }
        rec.incidence_7day = *incidence;

        auto key = std::make_pair(rec.location_id, rec.date);
        auto it = seen.find(key);
        if (it != seen.end()) {
            // Last wins; the replaced row is counted as filtered so that
            // rows_in == parsed + rejected + filtered still holds.
            records[it->second] = rec;
            ++report.warnings;
            ++report.filtered;
            report.note(lineno, "duplicate (location, date), keeping last");
            continue;
        }
        seen.emplace(key, records.size());
        records.push_back(std::move(rec));
        ++report.parsed;
    }
    return records;
}

std::vector<IncomeRecord> load_income_csv(const std::string& path,
                                          const IncomeFormat& format,
                                          IngestReport& report) {
    CsvFile csv = open_csv(path);
    const std::size_t region_idx = column_index(csv, format.region_col, path);
    const std::size_t year_idx = column_index(csv, format.year_col, path);
    const std::size_t gross_idx = column_index(csv, format.monthly_gross_col, path);
    const std::size_t hours_idx = column_index(csv, format.weekly_hours_col, path);
    const std::size_t need =
        std::max({region_idx, year_idx, gross_idx, hours_idx}) + 1;

    std::vector<IncomeRecord> records;
    std::string line;
    std::int64_t lineno = 1;
    while (std::getline(csv.stream, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        ++report.rows_in;
        auto fields = split(line, csv.delim);
        if (fields.size() < need) {
            ++report.rejected;
            report.note(lineno, "too few columns");
            continue;
        }
        IncomeRecord rec;
        rec.region = trim(fields[region_idx]);
        auto year = parse_int(fields[year_idx]);
        auto gross = parse_double(fields[gross_idx]);
        auto hours = parse_double(fields[hours_idx]);
        if (rec.region.empty() || !year || !gross || !hours) {
            ++report.rejected;
            report.note(lineno, "malformed region, year, income or hours");
            continue;
        }
        if (!(*gross > 0.0) || !(*hours > 0.0)) {
            ++report.rejected;
            report.note(lineno, "income and hours must be positive");
            continue;
        }
        if (*year < format.year_min || *year > format.year_max) {
            ++report.filtered;
            report.note(lineno, "year outside configured window");
            continue;
        }
        rec.year = *year;
        rec.monthly_gross = *gross;
        rec.weekly_hours = *hours;
        records.push_back(std::move(rec));
        ++report.parsed;
    }
    return records;
}

std::vector<PrevalencePoint> to_prevalence(const std::vector<IncidenceRecord>& records,
                                           double duration_days,
                                           IngestReport* report) {
    std::vector<PrevalencePoint> points;
    points.reserve(records.size());
    for (const auto& rec : records) {
        bool clamped = false;
        PrevalencePoint pt;
        pt.location_id = rec.location_id;
        pt.date = rec.date;
        pt.prevalence =
            prevalence_from_incidence(rec.incidence_7day, duration_days, &clamped);
        if (clamped && report) {
            ++report->warnings;
            report->note(0, "prevalence clamped to < 1 for " + rec.location_id +
                                " " + rec.date);
        }
        points.push_back(std::move(pt));
    }
    std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
        return std::tie(a.location_id, a.date) < std::tie(b.location_id, b.date);
    });
    return points;
}

std::vector<EmpiricalIncomeDistribution> to_income_distributions(
    const std::vector<IncomeRecord>& records, DailyIncomeRule rule) {
    std::map<std::string, std::vector<double>> by_region;
    for (const auto& rec : records) {
        by_region[rec.region].push_back(
            daily_income(rec.monthly_gross, rec.weekly_hours, rule));
    }
    std::vector<EmpiricalIncomeDistribution> out;
    for (auto& [region, incomes] : by_region) {
        out.push_back({region, std::move(incomes)});
    }
    return out;
}

EmpiricalIncomeDistribution synthesize_incomes(const std::string& region,
                                               std::int64_t count,
                                               double location_param,
                                               double scale_param,
                                               std::uint64_t seed) {
    if (count < 1) throw ValidationError("count must be >= 1");
    if (scale_param < 0.0) throw ValidationError("scale must be >= 0");
    EmpiricalIncomeDistribution dist;
    dist.region = region;
    dist.daily_incomes.reserve(static_cast<std::size_t>(count));
    auto gen = rng::make_engine(seed);
    if (scale_param == 0.0) {
        dist.daily_incomes.assign(static_cast<std::size_t>(count),
                                  std::exp(location_param));
        return dist;
    }
    std::lognormal_distribution<double> draw(location_param, scale_param);
    for (std::int64_t i = 0; i < count; ++i) {
        dist.daily_incomes.push_back(draw(gen));
    }
    return dist;
}

}  // namespace gtecon
