#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gtecon/gt_core.hpp"

namespace gtecon {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IncidenceRecord {
    std::string location_id;  // district identifier, e.g. AGS code
    std::string date;         // ISO-8601 calendar date
    double incidence_7day = 0.0;  // cases per 100k per 7 days
};

struct PrevalencePoint {
    std::string location_id;
    std::string date;
    double prevalence = 0.0;
};

struct IncomeRecord {
    std::string region;
    int year = 0;
    double monthly_gross = 0.0;  // EUR/month
    double weekly_hours = 0.0;
};

struct EmpiricalIncomeDistribution {
    std::string region;
    std::vector<double> daily_incomes;  // EUR/day
};

/// Header-name mapping so upstream schema changes stay configurable.
/// Defaults follow the RKI 7-day incidence repository layout.
struct IncidenceFormat {
    std::string location_col = "Landkreis_id";
    std::string date_col = "Meldedatum";
    std::string incidence_col = "Inzidenz_7-Tage";
};

struct IncomeFormat {
    std::string region_col = "region";
    std::string year_col = "year";
    std::string monthly_gross_col = "monthly_gross_eur";
    std::string weekly_hours_col = "weekly_hours";
    int year_min = 2019;
    int year_max = 2021;
};

struct IngestReport {
    std::int64_t rows_in = 0;   // data rows, excluding the header
    std::int64_t parsed = 0;
    std::int64_t rejected = 0;  // malformed or invalid values
    std::int64_t filtered = 0;  // valid but outside the configured window
    std::vector<std::string> diagnostics;  // first 20, with line numbers
    std::int64_t warnings = 0;  // e.g. duplicate keys resolved last-wins

    void note(std::int64_t line, const std::string& what);
    std::string to_json() const;
};

/// Point-prevalence approximation: incidence/7 per day times the infectious
/// duration, per 100k. Clamped to [0, 1 - 1e-9]; a clamp is reported, never
/// silent.
double prevalence_from_incidence(double incidence_7day, double duration_days = 14.0,
                                 bool* clamped = nullptr);

enum class DailyIncomeRule {
    hours_based,    // weekly income / (weekly hours / 5)
    five_day_week,  // weekly income / 5, for robustness comparisons
};

/// Daily income from monthly gross pay: weekly income is monthly/4.345,
/// daily hours assume a five-day work week.
double daily_income(double monthly_gross, double weekly_hours,
                    DailyIncomeRule rule = DailyIncomeRule::hours_based);

std::vector<IncidenceRecord> load_incidence_csv(const std::string& path,
                                                const IncidenceFormat& format,
                                                IngestReport& report);

std::vector<IncomeRecord> load_income_csv(const std::string& path,
                                          const IncomeFormat& format,
                                          IngestReport& report);

/// Convert incidence records to prevalence points for one duration.
std::vector<PrevalencePoint> to_prevalence(const std::vector<IncidenceRecord>& records,
                                           double duration_days,
                                           IngestReport* report = nullptr);

/// Group income records by region and convert each to daily incomes.
std::vector<EmpiricalIncomeDistribution> to_income_distributions(
    const std::vector<IncomeRecord>& records,
    DailyIncomeRule rule = DailyIncomeRule::hours_based);

/// Log-normal stand-in for restricted income microdata.
EmpiricalIncomeDistribution synthesize_incomes(const std::string& region,
                                               std::int64_t count,
                                               double location_param,
                                               double scale_param,
                                               std::uint64_t seed);

}  // namespace gtecon
