#include "vigil/records_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "vigil/errors.hpp"

namespace vigil {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, sep)) fields.push_back(field);
    if (!line.empty() && line.back() == sep) fields.emplace_back();
    return fields;
}

long parse_long(const std::string& text, long row, const std::string& what) {
    try {
        std::size_t used = 0;
        const long v = std::stol(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ParseError(row, "cannot parse " + what + " from '" + text + "'");
    }
}

std::vector<int> parse_levels(const std::string& text, long row, const std::string& what) {
    std::vector<int> levels;
    if (text.empty()) return levels;
    for (const std::string& item : split(text, ';')) {
        const long v = parse_long(item, row, what);
        if (v < 0 || v >= kHurtLevels) {
            throw ParseError(row, what + " value " + item + " outside {0..5}");
        }
        levels.push_back(static_cast<int>(v));
    }
    return levels;
}

}  // namespace

std::vector<DayBatch> ingest_records(std::istream& in, const std::string& source_name) {
    std::string line;
    if (!std::getline(in, line)) return {};  // empty file, empty batch list

    const std::vector<std::string> header = split(line, ',');
    if (header.size() < 5 || header[0] != "day" || header[1] != "vuln" ||
        header[2] != "n_e" || header[3] != "ahl" || header[4] != "phl") {
        throw ParseError(1, source_name + ": header must start with day,vuln,n_e,ahl,phl");
    }
    if ((header.size() - 5) % 2 != 0) {
        throw ParseError(1, "observation-type columns must come in total_/neg_ pairs");
    }
    std::vector<std::string> types;
    for (std::size_t i = 5; i < header.size(); i += 2) {
        const std::string& total_col = header[i];
        const std::string& neg_col = header[i + 1];
        if (total_col.rfind("total_", 0) != 0 || neg_col.rfind("neg_", 0) != 0 ||
            total_col.substr(6) != neg_col.substr(4)) {
            throw ParseError(1, "expected total_<T>,neg_<T> column pair, got " + total_col +
                                    "," + neg_col);
        }
        types.push_back(total_col.substr(6));
    }

    std::vector<DayBatch> batches;
    std::set<std::pair<long, std::string>> seen;
    long row = 1;
    long last_day = 0;
    bool first = true;

    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split(line, ',');
        if (fields.size() != 5 + 2 * types.size()) {
            throw ParseError(row, "expected " + std::to_string(5 + 2 * types.size()) +
                                      " fields, got " + std::to_string(fields.size()));
        }

        DailyRecord rec;
        rec.day = parse_long(fields[0], row, "day");
        rec.vuln_id = fields[1];
        if (rec.vuln_id.empty()) throw ParseError(row, "empty vulnerability id");

        const long n_e = parse_long(fields[2], row, "n_e");
        if (n_e < 0) throw ParseError(row, "n_e must be non-negative");
        const std::vector<int> ahl = parse_levels(fields[3], row, "ahl");
        const std::vector<int> phl = parse_levels(fields[4], row, "phl");
        if (static_cast<long>(ahl.size()) != n_e || static_cast<long>(phl.size()) != n_e) {
            throw ParseError(row, "ahl/phl lists must have length n_e");
        }
        rec.incidents.emplace();
        for (long e = 0; e < n_e; ++e) {
            if (phl[e] < ahl[e]) {
                throw ParseError(row, "PHL must be >= AHL (incident " + std::to_string(e) +
                                          ")");
            }
            rec.incidents->push_back(
                Incident{HurtLevel{ahl[e]}, HurtLevel{phl[e]}});
        }

        for (std::size_t t = 0; t < types.size(); ++t) {
            ObsCounts counts;
            counts.n_total = parse_long(fields[5 + 2 * t], row, "total_" + types[t]);
            counts.n_neg = parse_long(fields[6 + 2 * t], row, "neg_" + types[t]);
            if (counts.n_neg < 0 || counts.n_neg > counts.n_total) {
                throw ParseError(row, "need 0 <= n_neg <= n_total for type " + types[t]);
            }
            rec.obs[types[t]] = counts;
        }

        if (!first && rec.day < last_day) {
            throw ParseError(row, "rows must be sorted by day");
        }
        if (!seen.insert({rec.day, rec.vuln_id}).second) {
            throw ParseError(row, "duplicate (day, vuln) pair");
        }

        if (first || rec.day != last_day) {
            batches.push_back(DayBatch{rec.day, {}});
        }
        batches.back().records.push_back(std::move(rec));
        last_day = batches.back().day;
        first = false;
    }
    return batches;
}

std::vector<DayBatch> ingest_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open record file: " + path);
    return ingest_records(in, path);
}

std::vector<std::string> record_file_types(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open record file: " + path);
    std::string line;
    if (!std::getline(in, line)) return {};
    std::vector<std::string> types;
    const std::vector<std::string> header = split(line, ',');
    for (std::size_t i = 5; i < header.size(); i += 2) {
        if (header[i].rfind("total_", 0) == 0) types.push_back(header[i].substr(6));
    }
    return types;
}

void write_records(std::ostream& out, const std::vector<std::string>& obs_types,
                   const std::vector<DayBatch>& batches) {
    out << "day,vuln,n_e,ahl,phl";
    for (const std::string& t : obs_types) out << ",total_" << t << ",neg_" << t;
    out << "\n";
    for (const DayBatch& batch : batches) {
        for (const DailyRecord& rec : batch.records) {
            out << rec.day << ',' << rec.vuln_id << ',' << rec.n_incidents() << ',';
            const auto levels = [&](bool potential) {
                std::string s;
                if (rec.incidents) {
                    for (std::size_t e = 0; e < rec.incidents->size(); ++e) {
                        if (e) s += ';';
                        const Incident& inc = (*rec.incidents)[e];
                        s += std::to_string(potential ? inc.phl.level : inc.ahl.level);
                    }
                }
                return s;
            };
            out << levels(false) << ',' << levels(true);
            for (const std::string& t : obs_types) {
                ObsCounts counts;
                auto it = rec.obs.find(t);
                if (it != rec.obs.end()) counts = it->second;
                out << ',' << counts.n_total << ',' << counts.n_neg;
            }
            out << "\n";
        }
    }
}

void write_records_file(const std::string& path, const std::vector<std::string>& obs_types,
                        const std::vector<DayBatch>& batches) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write record file: " + path);
    write_records(out, obs_types, batches);
}

}  // namespace vigil
