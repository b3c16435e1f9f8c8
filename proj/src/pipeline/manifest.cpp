#include "scidsi/pipeline/manifest.hpp"

#include "scidsi/errors.hpp"
#include "scidsi/util/format.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <fstream>

namespace scidsi::pipeline {

namespace fs = std::filesystem;

RunManifest RunManifest::load_or_create(const fs::path& out_dir) {
    RunManifest m;
    m.dir_ = out_dir;
    const auto path = out_dir / "manifest.json";
    if (!fs::exists(path)) return m;
    std::ifstream in(path);
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(in);
        m.config_ = j.value("config", nlohmann::ordered_json::object());
        for (const auto& [label, entry] : j.at("inputs").items()) {
            m.inputs_[label] = entry.get<std::map<std::string, std::string>>();
        }
        for (const auto& [rel, hash] : j.at("outputs").items()) m.outputs_[rel] = hash.get<std::string>();
        for (const auto& s : j.at("stages")) {
            StageRecord r;
            r.name = s.at("name").get<std::string>();
            r.counts = s.at("counts").get<std::map<std::string, std::size_t>>();
            r.seconds = s.at("seconds").get<double>();
            r.status = s.value("status", "ok");
            r.note = s.value("note", "");
            m.stages_.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw IntegrityError("manifest " + path.string() + " is unreadable: " + e.what());
    }
    return m;
}

void RunManifest::record_input(const std::string& label, const fs::path& path) {
    inputs_[label] = {{"path", path.string()}, {"sha256", util::sha256_file(path)}};
}

void RunManifest::record_output(const std::string& relative) {
    outputs_[relative] = util::sha256_file(dir_ / relative);
}

void RunManifest::forget_output(const std::string& relative) { outputs_.erase(relative); }

void RunManifest::record_stage(StageRecord stage) {
    const auto it = std::find_if(stages_.begin(), stages_.end(), [&](const StageRecord& s) { return s.name == stage.name; });
    if (it != stages_.end()) {
        *it = std::move(stage);
    } else {
        stages_.push_back(std::move(stage));
    }
}

const StageRecord* RunManifest::stage(const std::string& name) const {
    for (const auto& s : stages_) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

nlohmann::ordered_json RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = "scidsi";
    j["tool_version"] = kToolVersion;
    j["config"] = config_;
    j["inputs"] = nlohmann::ordered_json::object();
    for (const auto& [label, entry] : inputs_) j["inputs"][label] = entry;
    j["outputs"] = nlohmann::ordered_json::object();
    for (const auto& [rel, hash] : outputs_) j["outputs"][rel] = hash;
    j["stages"] = nlohmann::ordered_json::array();
    for (const auto& s : stages_) {
        nlohmann::ordered_json e;
        e["name"] = s.name;
        e["status"] = s.status;
        e["counts"] = s.counts;
        e["seconds"] = s.seconds;
        if (!s.note.empty()) e["note"] = s.note;
        j["stages"].push_back(std::move(e));
    }
    return j;
}

void RunManifest::save() const { util::write_file_atomic(dir_ / "manifest.json", to_json().dump(2) + "\n"); }

OutputLock::OutputLock(const fs::path& out_dir) : path_(out_dir / ".lock") {
    fs::create_directories(out_dir);
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        throw IoError("output directory " + out_dir.string() + " is locked (remove " + path_.string() +
                      " if no other run is active)");
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] const auto written = ::write(fd, pid.data(), pid.size());
    ::close(fd);
}

OutputLock::~OutputLock() {
    std::error_code ec;
    fs::remove(path_, ec);
}

}  // namespace scidsi::pipeline
