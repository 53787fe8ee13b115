#pragma once

#include <map>
#include <string>
#include <vector>

#include "tdn/noise_lab.hpp"

namespace tdn {

inline constexpr int kRecordSchemaVersion = 1;
inline constexpr const char* kLibraryVersion = "0.1.0";

/// Line-delimited record persistence: a self-describing JSON header line
/// (schema version, config echo, library version) followed by one JSON
/// record per line. Appendable and diffable.
struct RecordFile {
    std::map<std::string, std::string> config;
    std::vector<ExperimentRecord> records;
};

std::string serialize_record(const ExperimentRecord& rec);
ExperimentRecord parse_record(const std::string& line);

void write_record_file(const std::string& path, const RecordFile& file);
RecordFile read_record_file(const std::string& path);

/// File content with volatile fields (wall time) removed; the region that
/// determinism comparisons and hashes operate on.
std::string canonical_content(const std::string& path);

}  // namespace tdn
