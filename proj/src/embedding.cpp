#include "logdef/embedding.hpp"

#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "logdef/errors.hpp"
#include "logdef/sha256.hpp"

namespace logdef {

namespace {

constexpr char kMagic[4] = {'L', 'G', 'D', 'F'};
constexpr uint32_t kVersion = 1;

void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(char(uint8_t(v >> (8 * i))));
}

void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(char(uint8_t(v >> (8 * i))));
}

void put_f64(std::string& out, double d) {
    uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64(out, bits);
}

struct Reader {
    const std::string& buf;
    size_t pos = 0;

    void need(size_t n) const {
        if (pos + n > buf.size()) throw ChecksumError("embedding file truncated");
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t(uint8_t(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= uint64_t(uint8_t(buf[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
    double f64() {
        const uint64_t bits = u64();
        double d;
        std::memcpy(&d, &bits, 8);
        return d;
    }
    std::string bytes(size_t n) {
        need(n);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
};

std::string meta_to_json(const EmbeddingMeta& m) {
    nlohmann::ordered_json j;
    j["init_description"] = m.init_description;
    j["training_steps"] = m.training_steps;
    j["guidance_scale_used"] = m.guidance_scale_used;
    j["created_from_backbone_id"] = m.created_from_backbone_id;
    return j.dump();
}

EmbeddingMeta meta_from_json(const std::string& s) {
    const auto j = nlohmann::json::parse(s);
    EmbeddingMeta m;
    m.init_description = j.at("init_description").get<std::string>();
    m.training_steps = j.at("training_steps").get<int64_t>();
    m.guidance_scale_used = j.at("guidance_scale_used").get<double>();
    m.created_from_backbone_id = j.at("created_from_backbone_id").get<std::string>();
    return m;
}

} // namespace

LogicalEmbedding initialize_from_description(const std::string& description, int64_t n_tokens, TextAdapter& adapter) {
    if (n_tokens < 1) throw Error("n_tokens must be positive");
    const std::vector<int64_t> ids = adapter.tokenizer().encode(description);
    std::vector<int64_t> content;
    for (int64_t id : ids) {
        if (!Tokenizer::is_pseudo(id)) content.push_back(id);
    }
    if (content.empty()) {
        throw Error("description tokenizes to zero content tokens");
    }

    const int64_t d = adapter.embed_dim();
    LogicalEmbedding e;
    e.rows = Tensor({n_tokens, d});
    for (int64_t i = 0; i < n_tokens; ++i) {
        const int64_t id = content[static_cast<size_t>(i % static_cast<int64_t>(content.size()))];
        const std::vector<double> row = adapter.table_row(id);
        if (static_cast<int64_t>(row.size()) != d) {
            throw ShapeError("embedding table row has dimension " + std::to_string(row.size()) +
                             ", adapter reports " + std::to_string(d));
        }
        for (int64_t c = 0; c < d; ++c) e.rows.at(i, c) = row[static_cast<size_t>(c)];
    }
    e.meta.init_description = description;
    e.meta.created_from_backbone_id = adapter.backbone_id();
    return e;
}

void save_embedding(const LogicalEmbedding& e, const std::string& path) {
    if (e.rows.shape.size() != 2) throw ShapeError("embedding rows must be a [n_tokens, d] matrix");
    if (!e.rows.all_finite()) throw Error("refusing to save a non-finite embedding");

    std::string head;
    head.append(kMagic, 4);
    put_u32(head, kVersion);
    put_u64(head, uint64_t(e.n_tokens()));
    put_u64(head, uint64_t(e.dim()));
    put_u32(head, 8); // float width in bytes

    std::string payload;
    payload.reserve(e.rows.data.size() * 8);
    for (double v : e.rows.data) put_f64(payload, v);

    const std::string meta = meta_to_json(e.meta);
    std::string meta_block;
    put_u64(meta_block, meta.size());
    meta_block += meta;

    Sha256 h;
    h.update(head.data(), head.size());
    h.update(payload.data(), payload.size());
    h.update(meta_block.data(), meta_block.size());
    const auto digest = h.finish();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + path);
    out.write(head.data(), std::streamsize(head.size()));
    out.write(payload.data(), std::streamsize(payload.size()));
    out.write(reinterpret_cast<const char*>(digest.data()), std::streamsize(digest.size()));
    out.write(meta_block.data(), std::streamsize(meta_block.size()));
    if (!out) throw Error("short write: " + path);
}

LogicalEmbedding load_embedding(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open embedding file: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    Reader r{buf};
    const std::string magic = r.bytes(4);
    if (std::memcmp(magic.data(), kMagic, 4) != 0) throw Error("not an embedding file (bad magic): " + path);
    const uint32_t version = r.u32();
    if (version != kVersion) {
        throw Error("unsupported embedding format version " + std::to_string(version) + " (expected " +
                    std::to_string(kVersion) + ")");
    }
    const uint64_t n_tokens = r.u64();
    const uint64_t d = r.u64();
    const uint32_t width = r.u32();
    if (width != 8) throw Error("unsupported float width " + std::to_string(width));

    const size_t header_end = r.pos;
    LogicalEmbedding e;
    e.rows = Tensor({int64_t(n_tokens), int64_t(d)});
    for (double& v : e.rows.data) v = r.f64();
    const size_t payload_end = r.pos;

    r.need(32);
    std::array<uint8_t, 32> stored{};
    std::memcpy(stored.data(), buf.data() + r.pos, 32);
    r.pos += 32;

    const size_t meta_start = r.pos;
    const uint64_t meta_len = r.u64();
    const std::string meta = r.bytes(meta_len);

    Sha256 h;
    h.update(buf.data(), header_end);
    h.update(buf.data() + header_end, payload_end - header_end);
    h.update(buf.data() + meta_start, 8 + meta.size());
    if (h.finish() != stored) throw ChecksumError("embedding file failed integrity check: " + path);

    e.meta = meta_from_json(meta);
    return e;
}

void ensure_dim_compatible(const LogicalEmbedding& e, int64_t backbone_dim, const std::string& backbone_id) {
    if (e.dim() != backbone_dim) {
        throw ShapeError("embedding dimension " + std::to_string(e.dim()) + " does not match backbone '" +
                         backbone_id + "' dimension " + std::to_string(backbone_dim));
    }
}

} // namespace logdef
