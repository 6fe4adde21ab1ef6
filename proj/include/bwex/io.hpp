#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bwex/density_field.hpp"

namespace bwex::io {

/// Shortest round-trip representation ("%.17g").
[[nodiscard]] std::string format_double(double v);

/// Header `time,cell_0,...,cell_{K-1}` followed by one row per time.
[[nodiscard]] std::string trajectory_csv(const std::vector<double>& times, const std::vector<DensityField>& fields);

/// Trajectory CSV with the extra columns `stderr_0,...,stderr_{K-1}`.
[[nodiscard]] std::string ensemble_csv(const std::vector<double>& times, const std::vector<DensityField>& mean,
                                       const std::vector<DensityField>& std_error);

/// Ordered `key=value` lines.
class KeyValueReport {
public:
    void add(std::string key, std::string value);
    void add(std::string key, double value);
    void add(std::string key, std::int64_t value);
    void add(std::string key, std::uint64_t value);
    void add(std::string key, int value) { add(std::move(key), static_cast<std::int64_t>(value)); }

    [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }
    [[nodiscard]] std::string str() const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Writes `content` to `path`, creating parent directories. Throws IoError
/// naming the path on failure.
void write_file(const std::filesystem::path& path, std::string_view content);
[[nodiscard]] std::string read_file(const std::filesystem::path& path);

[[nodiscard]] std::string sha256_hex(std::string_view bytes);

/// Metadata sidecars (`*.meta.txt`) and benchmark timings carry wall-clock
/// values and are left out of the manifest.
[[nodiscard]] bool is_volatile(const std::filesystem::path& file);

inline constexpr std::string_view kManifestName = "MANIFEST.sha256";

/// Writes `<sha256>  <relative path>` lines (sha256sum format) for every
/// non-volatile regular file under `dir`, sorted by path.
void write_manifest(const std::filesystem::path& dir);

}  // namespace bwex::io
