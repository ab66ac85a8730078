// Little-endian binary readers/writers and small text helpers shared by the
// on-disk formats (mesh, sample records, masks, checkpoints).
#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace eitc {

class BinaryWriter {
  public:
    explicit BinaryWriter(const std::string& path) : f_(std::fopen(path.c_str(), "wb")) {
        if (!f_) throw std::runtime_error("cannot open for writing: " + path);
    }
    ~BinaryWriter() {
        if (f_) std::fclose(f_);
    }
    BinaryWriter(const BinaryWriter&) = delete;
    BinaryWriter& operator=(const BinaryWriter&) = delete;

    void write_bytes(const void* p, size_t n) {
        if (std::fwrite(p, 1, n, f_) != n) throw std::runtime_error("short write");
    }
    void write_u8(std::uint8_t v) { write_bytes(&v, 1); }
    void write_u32(std::uint32_t v) { write_bytes(&v, 4); } // little-endian host
    void write_u64(std::uint64_t v) { write_bytes(&v, 8); }
    void write_f64(double v) { write_bytes(&v, 8); }
    void write_f64s(const double* p, size_t n) { write_bytes(p, 8 * n); }

  private:
    std::FILE* f_;
};

class BinaryReader {
  public:
    explicit BinaryReader(const std::string& path) : f_(std::fopen(path.c_str(), "rb")) {
        if (!f_) throw std::runtime_error("cannot open for reading: " + path);
    }
    ~BinaryReader() {
        if (f_) std::fclose(f_);
    }
    BinaryReader(const BinaryReader&) = delete;
    BinaryReader& operator=(const BinaryReader&) = delete;

    void read_bytes(void* p, size_t n) {
        if (std::fread(p, 1, n, f_) != n) throw std::runtime_error("short read");
    }
    std::uint8_t read_u8() {
        std::uint8_t v;
        read_bytes(&v, 1);
        return v;
    }
    std::uint32_t read_u32() {
        std::uint32_t v;
        read_bytes(&v, 4);
        return v;
    }
    std::uint64_t read_u64() {
        std::uint64_t v;
        read_bytes(&v, 8);
        return v;
    }
    double read_f64() {
        double v;
        read_bytes(&v, 8);
        return v;
    }
    void read_f64s(double* p, size_t n) { read_bytes(p, 8 * n); }

  private:
    std::FILE* f_;
};

/// FNV-1a over a byte buffer; used to stamp artifacts with a config hash.
inline std::uint64_t fnv1a(const void* data, size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    return fnv1a(s.data(), s.size(), h);
}

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
bool file_exists(const std::string& path);

} // namespace eitc
