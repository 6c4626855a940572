#include "gtecon/report.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "gtecon/ingest.hpp"

namespace gtecon {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

nlohmann::json plan_sizes(const ScenarioResult& res) {
    nlohmann::json sizes = nlohmann::json::array();
    for (int s : res.plan.pool_sizes) sizes.push_back(s);
    return sizes;
}

}  // namespace

std::string results_to_csv(const std::vector<ScenarioResult>& results) {
    std::string out =
        "location,date,prevalence,k,mean_eci,min_eci,max_eci,"
        "range_per_individual,mean_tests,mean_economic_loss,s1,s2,s3,s4\n";
    for (const auto& res : results) {
        out += res.location + "," + res.date + "," + fmt(res.prevalence) + "," +
               std::to_string(res.k) + "," + fmt(res.mean_eci) + "," +
               fmt(res.min_eci) + "," + fmt(res.max_eci) + "," +
               fmt(res.range_per_individual) + "," + fmt(res.mean_total_tests) +
               "," + fmt(res.mean_economic_loss);
        for (std::size_t i = 0; i < 4; ++i) {
            out += ",";
            if (i < res.plan.pool_sizes.size()) {
                out += std::to_string(res.plan.pool_sizes[i]);
            }
        }
        out += "\n";
    }
    return out;
}

std::string results_to_json(const std::vector<ScenarioResult>& results) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& res : results) {
        j.push_back({{"location", res.location},
                     {"date", res.date},
                     {"prevalence", res.prevalence},
                     {"k", res.k},
                     {"pool_sizes", plan_sizes(res)},
                     {"mean_eci", res.mean_eci},
                     {"min_eci", res.min_eci},
                     {"max_eci", res.max_eci},
                     {"range_per_individual", res.range_per_individual},
                     {"mean_tests", res.mean_total_tests},
                     {"mean_economic_loss", res.mean_economic_loss}});
    }
    return j.dump(2) + "\n";
}

std::string choices_to_csv(const std::vector<OptimalChoice>& choices) {
    std::string out = "location,date,prevalence,chosen_k,mean_eci\n";
    for (const auto& c : choices) {
        out += c.location + "," + c.date + "," + fmt(c.prevalence) + "," +
               std::to_string(c.k) + "," + fmt(c.mean_eci) + "\n";
    }
    return out;
}

std::string choices_to_json(const std::vector<OptimalChoice>& choices) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& c : choices) {
        j.push_back({{"location", c.location},
                     {"date", c.date},
                     {"prevalence", c.prevalence},
                     {"chosen_k", c.k},
                     {"mean_eci", c.mean_eci}});
    }
    return j.dump(2) + "\n";
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file for digest: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

}  // namespace gtecon
