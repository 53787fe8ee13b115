#include "tdn/records.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tdn {

namespace {

using nlohmann::json;

json record_to_json(const ExperimentRecord& rec) {
    json j;
    j["format"] = to_string(rec.format);
    j["shape"] = rec.shape;
    j["rank"] = rec.rank;
    j["seed"] = rec.seed;
    j["trial_index"] = rec.trial_index;
    j["noise_ratio"] = rec.noise_ratio;
    j["epsilon"] = rec.epsilon;
    j["noise_norm"] = rec.noise_norm;
    j["residual"] = rec.residual;
    j["hypothesis_holds"] = rec.hypothesis_holds;
    j["wall_time_ms"] = rec.wall_time_ms;
    if (rec.knorm_estimate >= 0.0) j["knorm_estimate"] = rec.knorm_estimate;
    return j;
}

ExperimentRecord record_from_json(const json& j) {
    ExperimentRecord rec;
    rec.format = format_from_string(j.at("format").get<std::string>());
    rec.shape = j.at("shape").get<std::vector<std::int64_t>>();
    rec.rank = j.at("rank").get<int>();
    rec.seed = j.at("seed").get<std::uint64_t>();
    rec.trial_index = j.at("trial_index").get<std::int64_t>();
    rec.noise_ratio = j.at("noise_ratio").get<double>();
    rec.epsilon = j.at("epsilon").get<double>();
    rec.noise_norm = j.at("noise_norm").get<double>();
    rec.residual = j.at("residual").get<double>();
    rec.hypothesis_holds = j.at("hypothesis_holds").get<bool>();
    rec.wall_time_ms = j.at("wall_time_ms").get<double>();
    if (j.contains("knorm_estimate")) rec.knorm_estimate = j.at("knorm_estimate").get<double>();
    return rec;
}

}  // namespace

std::string serialize_record(const ExperimentRecord& rec) { return record_to_json(rec).dump(); }

ExperimentRecord parse_record(const std::string& line) {
    return record_from_json(json::parse(line));
}

void write_record_file(const std::string& path, const RecordFile& file) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open record file for writing: " + path);
    json header;
    header["kind"] = "header";
    header["schema_version"] = kRecordSchemaVersion;
    header["library_version"] = kLibraryVersion;
    header["config"] = file.config;
    out << header.dump() << '\n';
    for (const auto& rec : file.records) out << serialize_record(rec) << '\n';
    if (!out) throw std::runtime_error("write failure on record file: " + path);
}

RecordFile read_record_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open record file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty record file: " + path);
    const json header = json::parse(line);
    if (header.value("kind", "") != "header") {
        throw std::runtime_error("record file missing header line: " + path);
    }
    if (header.at("schema_version").get<int>() != kRecordSchemaVersion) {
        throw std::runtime_error("unsupported record schema version in: " + path);
    }
    RecordFile file;
    if (header.contains("config")) {
        file.config = header.at("config").get<std::map<std::string, std::string>>();
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        file.records.push_back(parse_record(line));
    }
    return file;
}

std::string canonical_content(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open record file: " + path);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        j.erase("wall_time_ms");
        out << j.dump() << '\n';
    }
    return out.str();
}

}  // namespace tdn
