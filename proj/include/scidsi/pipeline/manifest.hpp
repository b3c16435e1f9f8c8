#pragma once

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace scidsi::pipeline {

inline constexpr const char* kToolVersion = "0.3.0";

struct StageRecord {
    std::string name;
    std::map<std::string, std::size_t> counts;
    double seconds = 0.0;
    std::string status = "ok";  // "ok" | "aborted"
    std::string note;
};

/// manifest.json in the output directory. Every command loads it, replaces
/// its own stage entry and output hashes, and saves it back.
class RunManifest {
public:
    static RunManifest load_or_create(const std::filesystem::path& out_dir);

    void set_config(nlohmann::ordered_json config) { config_ = std::move(config); }
    void record_input(const std::string& label, const std::filesystem::path& path);
    /// Hashes `out_dir / relative`; the file must exist.
    void record_output(const std::string& relative);
    void forget_output(const std::string& relative);
    void record_stage(StageRecord stage);

    const std::map<std::string, std::string>& outputs() const { return outputs_; }
    const std::vector<StageRecord>& stages() const { return stages_; }
    const StageRecord* stage(const std::string& name) const;

    nlohmann::ordered_json to_json() const;
    void save() const;

private:
    std::filesystem::path dir_;
    nlohmann::ordered_json config_;
    std::map<std::string, std::map<std::string, std::string>> inputs_;  // label -> {path, sha256}
    std::map<std::string, std::string> outputs_;                       // relative path -> sha256
    std::vector<StageRecord> stages_;
};

/// Exclusive ownership of an output directory through a `.lock` file
/// created with O_EXCL. Throws IoError when another run holds it.
class OutputLock {
public:
    explicit OutputLock(const std::filesystem::path& out_dir);
    ~OutputLock();
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;

private:
    std::filesystem::path path_;
};

}  // namespace scidsi::pipeline
