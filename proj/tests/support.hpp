#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "cohortkm/random.hpp"

namespace support {

namespace fs = std::filesystem;

/// Fresh empty directory under the system temp dir.
inline fs::path scratch_dir(const std::string& tag) {
    static std::uint64_t counter = 0;
    const auto stamp = cohortkm::derive_seed(static_cast<std::uint64_t>(fs::file_time_type::clock::now().time_since_epoch().count()),
                                             ++counter);
    auto dir = fs::temp_directory_path() / ("cohortkm_" + tag + "_" + std::to_string(stamp % 1000000007ULL));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

/// Relative path → file bytes for every regular file under dir.
inline std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        out[fs::relative(entry.path(), dir).generic_string()] = ss.str();
    }
    return out;
}

}  // namespace support
