#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>

#include "simregress/error.hpp"

namespace testing {

namespace fs = std::filesystem;

inline fs::path fixtures() { return fs::path(SIMREGRESS_FIXTURES_DIR); }
inline fs::path registry() { return fs::path(SIMREGRESS_REGISTRY_DIR); }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::string pattern = (fs::temp_directory_path() / "simregress-test-XXXXXX").string();
        if (!mkdtemp(pattern.data())) {
            throw std::runtime_error("mkdtemp failed");
        }
        path_ = pattern;
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void spit(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

/// |a - b| <= rel * max(|a|, |b|); equal values always match.
inline bool rel_close(double a, double b, double rel) {
    return a == b || std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

/// Code of the simregress::Error thrown by `f`, or nullopt when it returns.
template <class F>
std::optional<simregress::ErrorCode> error_code_of(F&& f) {
    try {
        f();
    } catch (const simregress::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

}  // namespace testing

#define CHECK_ERROR(expr, code) CHECK(testing::error_code_of([&] { (void)(expr); }) == (code))
