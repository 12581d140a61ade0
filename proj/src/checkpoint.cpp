#include "hdiv/checkpoint.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

namespace hdiv {
namespace {

constexpr char kMagic[4] = {'H', 'D', 'V', '1'};

void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double d) {
    uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64(out, bits);
}

class Reader {
  public:
    Reader(const std::string& buf, const std::string& path) : buf_(buf), path_(path) {}
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
        }
        pos_ += 8;
        return v;
    }
    double f64() {
        const uint64_t bits = u64();
        double d;
        std::memcpy(&d, &bits, 8);
        return d;
    }
    std::string bytes(std::size_t n) {
        need(n);
        std::string s = buf_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    bool eof() const { return pos_ == buf_.size(); }

  private:
    void need(std::size_t n) {
        if (pos_ + n > buf_.size()) fail("truncated checkpoint: " + path_);
    }
    const std::string& buf_;
    std::string path_;
    std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::string& path, const std::vector<CheckpointRecord>& records) {
    std::string out;
    out.append(kMagic, 4);
    for (const auto& r : records) {
        put_u64(out, r.name.size());
        out.append(r.name);
        put_u64(out, r.shape.size());
        for (int64_t d : r.shape) put_u64(out, static_cast<uint64_t>(d));
        if (shape_numel(r.shape) != static_cast<int64_t>(r.values.size())) {
            fail("checkpoint record '" + r.name + "' has inconsistent shape");
        }
        for (double v : r.values) put_f64(out, v);
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) fail("cannot write checkpoint: " + path);
        f.write(out.data(), static_cast<std::streamsize>(out.size()));
        f.flush();
        if (!f) fail("checkpoint write failed: " + path);
    }
    fs::rename(tmp, target);
}

std::vector<CheckpointRecord> load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail("cannot open checkpoint: " + path);
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    Reader r(buf, path);
    if (buf.size() < 4 || std::memcmp(buf.data(), kMagic, 4) != 0) {
        fail("not a checkpoint file (bad magic): " + path);
    }
    r.bytes(4);
    std::vector<CheckpointRecord> records;
    while (!r.eof()) {
        CheckpointRecord rec;
        const uint64_t name_len = r.u64();
        rec.name = r.bytes(name_len);
        const uint64_t rank = r.u64();
        rec.shape.resize(rank);
        uint64_t count = 1;
        for (uint64_t i = 0; i < rank; ++i) {
            rec.shape[i] = static_cast<int64_t>(r.u64());
            count *= static_cast<uint64_t>(rec.shape[i]);
        }
        rec.values.resize(count);
        for (uint64_t i = 0; i < count; ++i) rec.values[i] = r.f64();
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace hdiv
