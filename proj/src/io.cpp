#include "bwex/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "bwex/errors.hpp"

namespace bwex::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trajectory_csv(const std::vector<double>& times, const std::vector<DensityField>& fields) {
    return ensemble_csv(times, fields, {});
}

std::string ensemble_csv(const std::vector<double>& times, const std::vector<DensityField>& mean,
                         const std::vector<DensityField>& std_error) {
    if (mean.size() != times.size() || (!std_error.empty() && std_error.size() != times.size())) {
        throw DomainError("csv: one field per time is required");
    }
    const std::size_t k = mean.empty() ? 0 : mean.front().size();
    std::ostringstream out;
    out << "time";
    for (std::size_t i = 0; i < k; ++i) {
        out << ",cell_" << i;
    }
    if (!std_error.empty()) {
        for (std::size_t i = 0; i < k; ++i) {
            out << ",stderr_" << i;
        }
    }
    out << '\n';
    for (std::size_t t = 0; t < times.size(); ++t) {
        if (mean[t].size() != k || (!std_error.empty() && std_error[t].size() != k)) {
            throw DomainError("csv: fields change size along the trajectory");
        }
        out << format_double(times[t]);
        for (double v : mean[t].cells()) {
            out << ',' << format_double(v);
        }
        if (!std_error.empty()) {
            for (double v : std_error[t].cells()) {
                out << ',' << format_double(v);
            }
        }
        out << '\n';
    }
    return out.str();
}

void KeyValueReport::add(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }
void KeyValueReport::add(std::string key, double value) { add(std::move(key), format_double(value)); }
void KeyValueReport::add(std::string key, std::int64_t value) { add(std::move(key), std::to_string(value)); }
void KeyValueReport::add(std::string key, std::uint64_t value) { add(std::move(key), std::to_string(value)); }

std::string KeyValueReport::str() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

void write_file(const fs::path& path, std::string_view content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string sha256_hex(std::string_view bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
        throw std::runtime_error("sha256: OpenSSL digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(2 * len, '0');
    for (unsigned int i = 0; i < len; ++i) {
        out[2 * i] = kHex[digest[i] >> 4];
        out[2 * i + 1] = kHex[digest[i] & 15];
    }
    return out;
}

bool is_volatile(const fs::path& file) {
    const std::string name = file.filename().string();
    const std::string_view suffix = ".meta.txt";
    return name == kManifestName || name == "bench.csv" ||
           (name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0);
}

void write_manifest(const fs::path& dir) {
    std::vector<fs::path> files;
    std::error_code ec;
    for (fs::recursive_directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) {
        if (it->is_regular_file() && !is_volatile(it->path())) {
            files.push_back(fs::relative(it->path(), dir));
        }
    }
    if (ec) {
        throw IoError("cannot list " + dir.string() + ": " + ec.message());
    }
    std::sort(files.begin(), files.end());
    std::string out;
    for (const auto& f : files) {
        out += sha256_hex(read_file(dir / f));
        out += "  ";
        out += f.generic_string();
        out += '\n';
    }
    write_file(dir / kManifestName, out);
}

}  // namespace bwex::io
