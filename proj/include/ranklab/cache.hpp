#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "ranklab/config.hpp"
#include "ranklab/construction.hpp"

namespace ranklab {

inline constexpr const char* kCacheEnv = "RANKLAB_CACHE_DIR";

namespace detail {

inline std::string join(const std::vector<BigInt>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += v[i].str();
    }
    return out;
}

inline std::vector<BigInt> split_bigints(const std::string& s) {
    std::vector<BigInt> out;
    if (s.empty()) return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_bigint(item));
    return out;
}

}  // namespace detail

/// Exact text form of a stage record; the last line is a CRC-64 of the rest.
inline std::string serialize_geometry(const StageGeometry& g) {
    std::string body = "j=" + std::to_string(g.j) + "\nh=" + g.h.str() + "\nw=" + to_string(g.w) +
                       "\nspacers=" + detail::join(g.spacers) + "\noffsets=" + detail::join(g.offsets) + "\n";
    return body + "checksum=" + crc64_hex(body) + "\n";
}

inline StageGeometry parse_geometry(const std::string& text) {
    auto pos = text.rfind("checksum=");
    if (pos == std::string::npos) throw Error(ErrorCode::cache_corrupt, "stage record lacks a checksum");
    std::string body = text.substr(0, pos);
    std::string sum = text.substr(pos + 9);
    while (!sum.empty() && (sum.back() == '\n' || sum.back() == '\r')) sum.pop_back();
    if (crc64_hex(body) != sum) throw Error(ErrorCode::cache_corrupt, "stage record checksum mismatch");

    StageGeometry g;
    std::stringstream ss(body);
    std::string line;
    int seen = 0;
    try {
        while (std::getline(ss, line)) {
            auto eq = line.find('=');
            if (eq == std::string::npos) throw Error(ErrorCode::cache_corrupt, "malformed stage record");
            std::string key = line.substr(0, eq), val = line.substr(eq + 1);
            if (key == "j") g.j = std::stoull(val), seen |= 1;
            else if (key == "h") g.h = parse_bigint(val), seen |= 2;
            else if (key == "w") g.w = parse_rational(val), seen |= 4;
            else if (key == "spacers") g.spacers = detail::split_bigints(val), seen |= 8;
            else if (key == "offsets") g.offsets = detail::split_bigints(val), seen |= 16;
            else throw Error(ErrorCode::cache_corrupt, "unknown key in stage record");
        }
    } catch (const Error& e) {
        throw Error(ErrorCode::cache_corrupt, e.what());
    } catch (const std::exception& e) {
        throw Error(ErrorCode::cache_corrupt, e.what());
    }
    if (seen != 31 || g.spacers.size() != g.offsets.size())
        throw Error(ErrorCode::cache_corrupt, "incomplete stage record");
    return g;
}

enum class CachePolicy { off, read_only, read_write };

/// Content-addressed stage records under <root>/<spec hash>/stage-<j>.txt.
/// Writes go to a temporary file and are renamed into place, so concurrent
/// writers of the same record never expose a partial file.
class DiskStageStore : public StageStore {
public:
    DiskStageStore(std::filesystem::path root, std::string spec_hash, CachePolicy policy = CachePolicy::read_write)
        : dir_(std::move(root) / spec_hash), policy_(policy) {}

    std::optional<StageGeometry> load(std::uint64_t j) override {
        if (policy_ == CachePolicy::off) return std::nullopt;
        std::ifstream in(path(j), std::ios::binary);
        if (!in) {
            ++misses_;
            return std::nullopt;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        try {
            StageGeometry g = parse_geometry(buf.str());
            if (g.j != j) throw Error(ErrorCode::cache_corrupt, "record is for another stage");
            ++hits_;
            return g;
        } catch (const Error& e) {
            ++corrupt_;
            std::lock_guard lock(mu_);
            problems_.push_back("stage " + std::to_string(j) + ": " + e.what());
            return std::nullopt;
        }
    }

    void store(const StageGeometry& g) override {
        if (policy_ != CachePolicy::read_write) return;
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        auto final_path = path(g.j);
        auto tmp = final_path;
        tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter_++);
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) return;
            out << serialize_geometry(g);
        }
        std::filesystem::rename(tmp, final_path, ec);
        if (ec) std::filesystem::remove(tmp, ec);
        ++writes_;
    }

    void reject(std::uint64_t j, const std::string& why) override {
        --hits_;
        ++corrupt_;
        std::lock_guard lock(mu_);
        problems_.push_back("stage " + std::to_string(j) + ": " + why);
    }

    std::filesystem::path path(std::uint64_t j) const { return dir_ / ("stage-" + std::to_string(j) + ".txt"); }

    std::uint64_t hits() const { return hits_; }
    std::uint64_t misses() const { return misses_; }
    std::uint64_t writes() const { return writes_; }
    std::uint64_t corrupt() const { return corrupt_; }
    std::vector<std::string> problems() const {
        std::lock_guard lock(mu_);
        return problems_;
    }

private:
    std::filesystem::path dir_;
    CachePolicy policy_;
    std::atomic<std::uint64_t> hits_{0}, misses_{0}, writes_{0}, corrupt_{0}, counter_{0};
    mutable std::mutex mu_;
    std::vector<std::string> problems_;
};

inline std::optional<std::filesystem::path> cache_dir_from_env() {
    if (const char* v = std::getenv(kCacheEnv); v && *v) return std::filesystem::path(v);
    return std::nullopt;
}

}  // namespace ranklab
