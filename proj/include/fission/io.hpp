#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fission/error.hpp"

namespace fission::io {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
    return buffer.str();
}

using FileContent = std::pair<std::filesystem::path, std::string>;

/// Writes every file to a sibling temp file first and renames them into place
/// only after all temp files are complete. If any write fails, the temp files
/// are removed and no target is touched.
inline void write_files_atomic(const std::vector<FileContent>& files) {
    std::vector<std::filesystem::path> temps;
    auto discard = [&temps] {
        std::error_code ignored;
        for (const auto& t : temps) std::filesystem::remove(t, ignored);
    };
    for (const auto& [path, content] : files) {
        std::filesystem::path tmp = path;
        tmp += ".tmp";
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            discard();
            throw IoError("cannot open '" + tmp.string() + "' for writing");
        }
        temps.push_back(tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            discard();
            throw IoError("write failure on '" + tmp.string() + "'");
        }
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
        std::error_code ec;
        std::filesystem::rename(temps[i], files[i].first, ec);
        if (ec) {
            temps.erase(temps.begin(), temps.begin() + static_cast<std::ptrdiff_t>(i));
            discard();
            throw IoError("cannot move output into place at '" + files[i].first.string() + "'");
        }
    }
}

/// Readers never observe a half-written file.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    write_files_atomic({{path, std::string(content)}});
}

/// 17 significant digits: always reads back to the same double.
inline std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

} // namespace fission::io
