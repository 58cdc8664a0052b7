#ifndef ADAPLUS_BENCH_RECORD_IO_HPP
#define ADAPLUS_BENCH_RECORD_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "adaplus/bench/runner.hpp"

namespace adaplus::bench {

enum class Format { csv, json };

inline std::optional<Format> parse_format(const std::string& name) {
    if (name == "csv") return Format::csv;
    if (name == "json") return Format::json;
    return std::nullopt;
}

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* csv_header = "seed,epoch,step,lr,loss,grad_norm,param_norm";

/// Rows only, 17 significant digits. Aborted records are refused: the CSV
/// has no column to carry the flag.
inline void write_csv(std::ostream& out, const RunRecord& record) {
    if (record.aborted) throw IoError("aborted record cannot be written as CSV; use JSON");
    out << csv_header << '\n';
    char buf[160];
    for (const auto& r : record.rows) {
        std::snprintf(buf, sizeof buf, "%llu,%llu,%llu,%.17g,%.17g,%.17g,%.17g\n",
                      static_cast<unsigned long long>(r.seed), static_cast<unsigned long long>(r.epoch),
                      static_cast<unsigned long long>(r.step), r.lr, r.loss, r.grad_norm, r.param_norm);
        out << buf;
    }
}

inline nlohmann::json to_json(const RunRecord& record) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : record.rows) {
        rows.push_back({{"seed", r.seed},
                        {"epoch", r.epoch},
                        {"step", r.step},
                        {"lr", r.lr},
                        {"loss", r.loss},
                        {"grad_norm", r.grad_norm},
                        {"param_norm", r.param_norm}});
    }
    return {{"config_hash", record.config_hash},
            {"problem", record.problem},
            {"optimizer", record.optimizer},
            {"aborted", record.aborted},
            {"abort_reason", record.abort_reason},
            {"summary",
             {{"final_loss", record.summary.final_loss},
              {"best_loss", record.summary.best_loss},
              {"wall_time_seconds", record.summary.wall_time_seconds}}},
            {"rows", std::move(rows)}};
}

inline RunRecord record_from_json(const nlohmann::json& j) {
    try {
        RunRecord record;
        record.config_hash = j.at("config_hash").get<std::string>();
        record.problem = j.at("problem").get<std::string>();
        record.optimizer = j.at("optimizer").get<std::string>();
        record.aborted = j.at("aborted").get<bool>();
        record.abort_reason = j.at("abort_reason").get<std::string>();
        const auto& s = j.at("summary");
        record.summary.final_loss = s.at("final_loss").get<double>();
        record.summary.best_loss = s.at("best_loss").get<double>();
        record.summary.wall_time_seconds = s.at("wall_time_seconds").get<double>();
        for (const auto& r : j.at("rows")) {
            record.rows.push_back(RunRow{r.at("seed").get<std::uint64_t>(), r.at("epoch").get<std::uint64_t>(),
                                         r.at("step").get<std::uint64_t>(), r.at("lr").get<double>(),
                                         r.at("loss").get<double>(), r.at("grad_norm").get<double>(),
                                         r.at("param_norm").get<double>()});
        }
        return record;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed run record: ") + e.what());
    }
}

/// Reads rows back from CSV. Provenance fields are left empty.
inline RunRecord read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != csv_header) throw IoError("CSV header mismatch");
    RunRecord record;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        RunRow r;
        unsigned long long seed = 0, epoch = 0, step = 0;
        if (std::sscanf(line.c_str(), "%llu,%llu,%llu,%lf,%lf,%lf,%lf", &seed, &epoch, &step, &r.lr, &r.loss,
                        &r.grad_norm, &r.param_norm) != 7) {
            throw IoError("malformed CSV row on line " + std::to_string(lineno));
        }
        r.seed = seed;
        r.epoch = epoch;
        r.step = step;
        record.rows.push_back(r);
    }
    return record;
}

inline void emit(const RunRecord& record, Format format, const std::filesystem::path& path) {
    if (format == Format::csv && record.aborted) {
        throw IoError("aborted record cannot be written as CSV; use JSON");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    if (format == Format::csv) {
        write_csv(out, record);
    } else {
        out << to_json(record).dump(2) << '\n';
    }
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

/// Loads a record; the format is chosen by extension (.csv, otherwise JSON).
/// CSV records take the file stem as their optimizer label.
inline RunRecord load_record(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    if (path.extension() == ".csv") {
        RunRecord r = read_csv(in);
        r.optimizer = path.stem().string();
        return r;
    }
    try {
        return record_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("'" + path.string() + "': " + e.what());
    }
}

} // namespace adaplus::bench

#endif
