#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cibound/version.hpp"

namespace cibound {

/// Canonical serialization used for hashing: nlohmann objects already keep
/// keys sorted and print doubles with the shortest round-trip form, so the
/// compact dump is a stable canonical form.
inline std::string canonical_dump(const nlohmann::json& j) { return j.dump(); }

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hash_hex(const nlohmann::json& j) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical_dump(j))));
    return buf;
}

/// Identity of one CLI run: command, canonical config and its hash, tool
/// version, seed, and the files written. Deliberately holds no wall-clock
/// field so that outputs embedding it are byte-identical across reruns;
/// the cache layer records creation times separately.
struct RunManifest {
    std::string command;
    nlohmann::json config;
    std::string config_hash;
    std::string tool_version = std::string(kVersion);
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;

    static RunManifest make(std::string command, nlohmann::json config, std::uint64_t seed) {
        RunManifest m;
        m.command = std::move(command);
        m.config = std::move(config);
        m.config_hash = hash_hex(m.config);
        m.seed = seed;
        return m;
    }

    nlohmann::json to_json() const {
        return {{"command", command}, {"config", config},   {"configHash", config_hash},
                {"toolVersion", tool_version}, {"seed", seed}, {"outputs", outputs}};
    }
};

/// Directory of manifest-named JSON records, one per computed result.
/// Writes go to a temp file first and are renamed into place.
class ResultCache {
  public:
    explicit ResultCache(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    std::optional<nlohmann::json> load(const std::string& hash) const {
        const auto path = dir_ / (hash + ".json");
        std::ifstream in(path);
        if (!in) return std::nullopt;
        nlohmann::json j;
        in >> j;
        return j;
    }

    void store(const std::string& hash, const nlohmann::json& record) const {
        const auto tmp = dir_ / (hash + ".json.tmp");
        const auto path = dir_ / (hash + ".json");
        {
            std::ofstream out(tmp);
            if (!out) throw std::runtime_error("ResultCache: cannot write " + tmp.string());
            out << record.dump(2) << '\n';
        }
        std::filesystem::rename(tmp, path);
    }

    const std::filesystem::path& dir() const { return dir_; }

  private:
    std::filesystem::path dir_;
};

/// Write a file atomically (temp + rename).
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace cibound
