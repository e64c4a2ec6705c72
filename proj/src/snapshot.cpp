// Snapshot persistence for ResultStore: fixed little-endian layout, atomic
// writes (temp file + rename), format errors reported with byte offsets.

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "klab/dovetail.hpp"

namespace klab {

namespace {

constexpr char kMagic[4] = {'K', 'L', 'A', 'B'};
constexpr uint8_t kVersion = 1;

void put_u16(std::string& buf, uint16_t v) {
    buf.push_back(static_cast<char>(v & 0xff));
    buf.push_back(static_cast<char>((v >> 8) & 0xff));
}
void put_u32(std::string& buf, uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& buf, uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_bits(std::string& buf, const BitString& s) {
    if (s.size() > 0xffff) throw std::length_error("snapshot: bitstring exceeds 65535 bits");
    put_u16(buf, static_cast<uint16_t>(s.size()));
    for (uint8_t byte : pack_bits(s)) buf.push_back(static_cast<char>(byte));
}

struct Reader {
    const std::string& data;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error("snapshot format error at offset " + std::to_string(pos) + ": " +
                                 what);
    }
    void need(std::size_t n, const char* what) const {
        if (pos + n > data.size()) fail(std::string("truncated ") + what);
    }
    uint8_t u8(const char* what) {
        need(1, what);
        return static_cast<uint8_t>(data[pos++]);
    }
    uint16_t u16(const char* what) {
        need(2, what);
        uint16_t v = static_cast<uint8_t>(data[pos]) |
                     (static_cast<uint16_t>(static_cast<uint8_t>(data[pos + 1])) << 8);
        pos += 2;
        return v;
    }
    uint32_t u32(const char* what) {
        need(4, what);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<uint32_t>(static_cast<uint8_t>(data[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    uint64_t u64(const char* what) {
        need(8, what);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<uint64_t>(static_cast<uint8_t>(data[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
    BitString bits(const char* what) {
        uint16_t nbits = u16(what);
        std::size_t nbytes = (nbits + 7) / 8;
        need(nbytes, what);
        std::vector<uint8_t> bytes(data.begin() + pos, data.begin() + pos + nbytes);
        pos += nbytes;
        return unpack_bits(bytes, nbits);
    }
    bool done() const { return pos == data.size(); }
};

std::string header_and_kind(const ResultStore& store) {
    std::string buf(kMagic, 4);
    buf.push_back(static_cast<char>(kVersion));
    buf.push_back(static_cast<char>(store.kind().tag));
    if (store.kind().tag == MachineTag::Conditional) {
        put_bits(buf, store.kind().condition);
    } else if (store.kind().tag == MachineTag::Custom) {
        const std::string& name = store.kind().custom_name;
        if (name.size() > 0xffff) throw std::length_error("snapshot: custom name too long");
        put_u16(buf, static_cast<uint16_t>(name.size()));
        buf.append(name);
    }
    return buf;
}

MachineKind read_kind(Reader& r) {
    uint8_t tag = r.u8("machine tag");
    if (tag > 3) r.fail("unknown machine tag");
    MachineKind kind;
    kind.tag = static_cast<MachineTag>(tag);
    if (kind.tag == MachineTag::Conditional) {
        kind.condition = r.bits("condition");
    } else if (kind.tag == MachineTag::Custom) {
        uint16_t n = r.u16("custom name length");
        r.need(n, "custom name");
        kind.custom_name.assign(r.data.begin() + r.pos, r.data.begin() + r.pos + n);
        r.pos += n;
    }
    return kind;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open snapshot: " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

void check_header(Reader& r) {
    r.need(4, "magic");
    if (std::memcmp(r.data.data(), kMagic, 4) != 0) r.fail("bad magic");
    r.pos = 4;
    uint8_t version = r.u8("version");
    if (version != kVersion) r.fail("unsupported version " + std::to_string(version));
}

}  // namespace

void snapshot_save(const ResultStore& store, const std::string& path) {
    std::string buf = header_and_kind(store);
    put_u32(buf, store.round());
    for (const auto& [program, fact] : store.facts()) {
        put_bits(buf, program);
        put_bits(buf, fact.output);
        put_u64(buf, fact.steps);
    }
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write snapshot: " + tmp);
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (!out) throw std::runtime_error("short write: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

ResultStore snapshot_load(const std::string& path, uint32_t length_cap, FuelSchedule schedule) {
    std::string data = read_file(path);
    Reader r{data};
    check_header(r);
    MachineKind kind = read_kind(r);
    uint32_t round = r.u32("round");
    std::map<BitString, Fact> facts;
    while (!r.done()) {
        BitString program = r.bits("program");
        BitString output = r.bits("output");
        uint64_t steps = r.u64("steps");
        facts.emplace(std::move(program), Fact{std::move(output), steps});
    }
    ResultStore store(kind, length_cap, schedule);
    store.restore(round, std::move(facts));
    return store;
}

SnapshotInfo snapshot_peek(const std::string& path) {
    std::string data = read_file(path);
    Reader r{data};
    check_header(r);
    SnapshotInfo info;
    info.kind = read_kind(r);
    info.round = r.u32("round");
    info.fact_count = 0;
    while (!r.done()) {
        r.bits("program");
        r.bits("output");
        r.u64("steps");
        ++info.fact_count;
    }
    return info;
}

}  // namespace klab
