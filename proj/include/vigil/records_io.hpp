#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vigil/types.hpp"

// Record files are comma-separated text with a header line:
//
//   day,vuln,n_e,ahl,phl,total_<TYPE>,neg_<TYPE>[,total_<TYPE2>,neg_<TYPE2>...]
//
// ahl/phl are semicolon-joined severity lists of length n_e (empty when
// n_e = 0). Rows are sorted by day and each (day, vuln) pair appears at most
// once. The header defines the observation-type set. docs/formats.md carries
// the grammar.

namespace vigil {

struct DayBatch {
    long day = 0;
    std::vector<DailyRecord> records;
};

// Parses and validates a record file. Malformed rows raise ParseError with
// the 1-based row number; invariant violations raise DataError citing the
// rule and row.
std::vector<DayBatch> ingest_records(const std::string& path);
std::vector<DayBatch> ingest_records(std::istream& in, const std::string& source_name);

// Observation types declared by a record-file header, in header order.
std::vector<std::string> record_file_types(const std::string& path);

void write_records(std::ostream& out, const std::vector<std::string>& obs_types,
                   const std::vector<DayBatch>& batches);
void write_records_file(const std::string& path, const std::vector<std::string>& obs_types,
                        const std::vector<DayBatch>& batches);

}  // namespace vigil
