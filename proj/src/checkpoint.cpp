#include "dogfight/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

namespace dogfight {

namespace {

constexpr char kMagic[4] = {'D', 'G', 'F', 'T'};
constexpr std::size_t kHeaderSize = 4 + 4 + 8;

class Writer {
public:
    template <typename T>
    void put(T value) {
        std::uint64_t bits = 0;
        if constexpr (std::is_floating_point_v<T>) bits = std::bit_cast<std::uint64_t>(value);
        else bits = static_cast<std::uint64_t>(value);
        for (std::size_t i = 0; i < sizeof(T); ++i) bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    }
    void put_string(const std::string& s) {
        put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
        bytes.insert(bytes.end(), s.begin(), s.end());
    }
    void put_tensor(const std::vector<double>& values, std::initializer_list<std::uint64_t> dims) {
        put<std::uint32_t>(static_cast<std::uint32_t>(dims.size()));
        for (auto d : dims) put<std::uint64_t>(d);
        for (double v : values) put<double>(v);
    }
    std::vector<std::uint8_t> bytes;
};

class Reader {
public:
    Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

    template <typename T>
    T get() {
        need(sizeof(T));
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) bits |= std::uint64_t{data_[pos_ + i]} << (8 * i);
        pos_ += sizeof(T);
        if constexpr (std::is_floating_point_v<T>) return std::bit_cast<T>(bits);
        else return static_cast<T>(bits);
    }
    std::string get_string() {
        const auto n = get<std::uint32_t>();
        need(n);
        std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
        pos_ += n;
        return s;
    }
    // Zero entries in `dims` accept any extent and are filled in from the file.
    std::vector<double> get_tensor(std::vector<std::uint64_t>& dims, const char* what) {
        const auto rank = get<std::uint32_t>();
        if (rank != dims.size())
            throw CheckpointError(CheckpointError::Kind::Malformed, std::string("unexpected rank for ") + what);
        std::uint64_t count = 1;
        for (std::size_t i = 0; i < rank; ++i) {
            const auto d = get<std::uint64_t>();
            if (dims[i] != 0 && d != dims[i])
                throw CheckpointError(CheckpointError::Kind::Malformed, std::string("unexpected shape for ") + what);
            if (d == 0 || d > (1u << 24))
                throw CheckpointError(CheckpointError::Kind::Malformed, std::string("bad extent for ") + what);
            dims[i] = d;
            count *= d;
        }
        need(count * 8);
        std::vector<double> out(count);
        for (auto& v : out) v = get<double>();
        return out;
    }
    bool at_end() const { return pos_ == size_; }

private:
    void need(std::uint64_t n) const {
        if (n > size_ - pos_) throw CheckpointError(CheckpointError::Kind::Malformed, "payload ends inside a field");
    }
    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

void put_mlp(Writer& w, const MlpParams& p) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(p.layers.size()));
    for (const auto& l : p.layers) {
        w.put_tensor(l.weight, {l.in, l.out});
        w.put_tensor(l.bias, {l.out});
    }
    w.put<std::uint8_t>(p.log_std.empty() ? 0 : 1);
    if (!p.log_std.empty()) w.put_tensor(p.log_std, {p.log_std.size()});
}

MlpParams get_mlp(Reader& r) {
    MlpParams p;
    const auto n = r.get<std::uint32_t>();
    if (n == 0 || n > 64) throw CheckpointError(CheckpointError::Kind::Malformed, "bad layer count");
    for (std::uint32_t i = 0; i < n; ++i) {
        DenseLayer l;
        std::vector<std::uint64_t> wdims{0, 0};
        l.weight = r.get_tensor(wdims, "weight");
        l.in = wdims[0];
        l.out = wdims[1];
        std::vector<std::uint64_t> bdims{l.out};
        l.bias = r.get_tensor(bdims, "bias");
        if (!p.layers.empty() && p.layers.back().out != l.in)
            throw CheckpointError(CheckpointError::Kind::Malformed, "layer sizes do not chain");
        p.layers.push_back(std::move(l));
    }
    if (r.get<std::uint8_t>() != 0) {
        std::vector<std::uint64_t> dims{p.layers.back().out};
        p.log_std = r.get_tensor(dims, "log_std");
    }
    return p;
}

std::uint32_t crc_of(const std::uint8_t* data, std::size_t n) {
    return static_cast<std::uint32_t>(crc32(crc32(0L, Z_NULL, 0), data, static_cast<uInt>(n)));
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const AgentCheckpoint& ckpt) {
    Writer payload;
    payload.put<std::int64_t>(ckpt.iteration);
    payload.put<std::uint64_t>(ckpt.seed);
    payload.put_string(ckpt.config_hash);
    payload.put<std::uint64_t>(ckpt.content_hash);
    put_mlp(payload, ckpt.agent.actor);
    put_mlp(payload, ckpt.agent.critic);

    Writer out;
    out.bytes.insert(out.bytes.end(), std::begin(kMagic), std::end(kMagic));
    out.put<std::uint32_t>(kCheckpointVersion);
    out.put<std::uint64_t>(payload.bytes.size());
    out.bytes.insert(out.bytes.end(), payload.bytes.begin(), payload.bytes.end());
    out.put<std::uint32_t>(crc_of(payload.bytes.data(), payload.bytes.size()));
    return out.bytes;
}

AgentCheckpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
    using Kind = CheckpointError::Kind;
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw CheckpointError(Kind::BadMagic, "not a checkpoint file (bad magic)");
    if (bytes.size() < kHeaderSize) throw CheckpointError(Kind::Truncated, "checkpoint truncated inside the header");
    Reader header(bytes.data() + 4, kHeaderSize - 4);
    const auto version = header.get<std::uint32_t>();
    if (version != kCheckpointVersion)
        throw CheckpointError(Kind::VersionMismatch, "checkpoint version " + std::to_string(version) +
                                                         " is not supported (expected " +
                                                         std::to_string(kCheckpointVersion) + ")");
    const auto length = header.get<std::uint64_t>();
    if (bytes.size() - kHeaderSize < 4 || length > bytes.size() - kHeaderSize - 4)
        throw CheckpointError(Kind::Truncated, "checkpoint truncated: payload of " + std::to_string(length) +
                                                   " bytes but file has " + std::to_string(bytes.size()));
    if (bytes.size() != kHeaderSize + length + 4)
        throw CheckpointError(Kind::Malformed, "trailing bytes after checkpoint");
    const std::uint8_t* payload = bytes.data() + kHeaderSize;
    Reader trailer(payload + length, 4);
    const auto stored = trailer.get<std::uint32_t>();
    if (stored != crc_of(payload, length)) throw CheckpointError(Kind::CrcMismatch, "checkpoint CRC mismatch");

    Reader r(payload, length);
    AgentCheckpoint c;
    c.iteration = r.get<std::int64_t>();
    c.seed = r.get<std::uint64_t>();
    c.config_hash = r.get_string();
    c.content_hash = r.get<std::uint64_t>();
    c.agent.actor = get_mlp(r);
    c.agent.critic = get_mlp(r);
    if (!r.at_end()) throw CheckpointError(Kind::Malformed, "unread bytes at end of payload");
    if (!c.verify()) throw CheckpointError(Kind::Malformed, "content hash does not match the stored tensors");
    return c;
}

void save_checkpoint(const std::string& path, const AgentCheckpoint& ckpt) {
    const auto bytes = encode_checkpoint(ckpt);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw CheckpointError(CheckpointError::Kind::Io, "cannot write " + tmp);
        f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!f) throw CheckpointError(CheckpointError::Kind::Io, "write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

AgentCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw CheckpointError(CheckpointError::Kind::Io, "cannot open checkpoint " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return decode_checkpoint(bytes);
}

}  // namespace dogfight
