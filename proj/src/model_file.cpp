#include "loghd/model_file.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "loghd/errors.hpp"

namespace loghd {

namespace {

constexpr char kMagic[6] = {'L', 'O', 'G', 'H', 'D', '1'};

class Writer {
public:
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        out_.insert(out_.end(), b, b + n);
    }
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint64_t v) {
        if (v > std::numeric_limits<std::uint32_t>::max()) throw FormatError("value too large for a u32 field");
        le(v, 4);
    }
    void u64(std::uint64_t v) { le(v, 8); }
    void i64(std::int64_t v) { le(static_cast<std::uint64_t>(v), 8); }
    void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }

    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    void le(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::span<const std::uint8_t> bytes(std::size_t n) {
        need(n);
        auto s = in_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::uint8_t u8() { return bytes(1)[0]; }
    std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
    std::uint64_t u64() { return le(8); }
    std::int64_t i64() { return static_cast<std::int64_t>(le(8)); }
    double f64() { return std::bit_cast<double>(le(8)); }
    std::size_t remaining() const { return in_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (n > in_.size() - pos_) throw FormatError("model file is truncated");
    }
    std::uint64_t le(int n) {
        const auto b = bytes(static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
        return v;
    }
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

void write_mask(Writer& w, const std::vector<std::uint8_t>& mask) {
    w.u8(mask.empty() ? 0 : 1);
    if (mask.empty()) return;
    std::vector<std::uint8_t> packed((mask.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) packed[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    }
    w.bytes(packed.data(), packed.size());
}

std::vector<std::uint8_t> read_mask(Reader& r, std::size_t cols) {
    const std::uint8_t has = r.u8();
    if (has > 1) throw FormatError("invalid mask flag");
    if (!has) return {};
    const auto packed = r.bytes((cols + 7) / 8);
    std::vector<std::uint8_t> mask(cols);
    for (std::size_t i = 0; i < cols; ++i) mask[i] = (packed[i / 8] >> (i % 8)) & 1u;
    return mask;
}

// Caps on header counts so a corrupted length field fails cleanly.
void check_count(std::uint64_t count, std::size_t element_size, const Reader& r, const char* what) {
    if (element_size != 0 && count > r.remaining() / element_size) {
        throw FormatError(std::string("implausible ") + what + " count in model header");
    }
}

}  // namespace

std::uint32_t payload_checksum(std::span<const std::uint8_t> payload) {
    uLong crc = crc32(0L, Z_NULL, 0);
    std::size_t done = 0;
    while (done < payload.size()) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(payload.size() - done, 1u << 30));
        crc = crc32(crc, payload.data() + done, chunk);
        done += chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

ClassifierModel ModelFile::model() const { return dequantized(shape, state); }

ModelFile make_model_file(const ClassifierModel& model, const QuantSpec& quant, std::vector<std::int64_t> label_values,
                          MinMaxScaler scaler) {
    ModelFile f;
    f.shape = model;
    f.state = quantize(model, quant);
    f.label_values = std::move(label_values);
    f.scaler = std::move(scaler);
    return f;
}

std::vector<std::uint8_t> serialize_model(const ModelFile& file) {
    const ClassifierModel& m = file.shape;
    const QuantizedState& st = file.state;
    st.validate();
    Writer w;
    w.bytes(kMagic, sizeof kMagic);
    w.u8(static_cast<std::uint8_t>(m.method));
    w.u32(m.class_count);
    w.u32(m.hyper_dim());
    w.u32(m.vectors.size());
    w.u32(m.codebook ? m.codebook->alphabet_size() : 0);
    w.u8(static_cast<std::uint8_t>(st.bits));
    w.f64(m.mask.sparsity);

    w.u32(m.encoder.input_dim);
    w.u64(m.encoder.seed);
    w.u8(static_cast<std::uint8_t>(m.encoder.nonlinearity));

    w.u8(m.codebook ? 1 : 0);
    if (m.codebook) {
        const auto& cs = m.codebook->spec;
        w.f64(cs.alpha);
        w.f64(cs.tie_epsilon);
        w.u64(cs.candidate_pool_cap);
        w.u64(cs.seed);
        w.u32(cs.code_length);
        w.bytes(m.codebook->symbols.data(), m.codebook->symbols.size());
    }

    w.u32(file.label_values.size());
    for (auto v : file.label_values) w.i64(v);
    w.u32(file.scaler.minimum.size());
    for (double v : file.scaler.minimum) w.f64(v);
    for (double v : file.scaler.maximum) w.f64(v);

    w.u32(st.tensors.size());
    for (const auto& t : st.tensors) {
        w.u32(t.rows);
        w.u32(t.cols);
        w.f64(t.scale);
        w.u64(t.bit_offset);
        write_mask(w, t.column_mask);
    }
    w.u64(st.payload_bits);
    w.bytes(st.payload.data(), st.payload.size());
    const std::uint32_t crc = payload_checksum(st.payload);
    for (int i = 0; i < 4; ++i) w.u8(static_cast<std::uint8_t>(crc >> (8 * i)));
    return w.take();
}

ModelFile parse_model(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    const auto magic = r.bytes(sizeof kMagic);
    if (std::memcmp(magic.data(), kMagic, 5) != 0) throw FormatError("not a model file (bad magic)");
    if (magic[5] != kMagic[5]) throw FormatError("unsupported model file version '" + std::string(1, char(magic[5])) + "'");

    ModelFile f;
    ClassifierModel& m = f.shape;
    const std::uint8_t method = r.u8();
    if (method > 3) throw FormatError("unknown method id " + std::to_string(method));
    m.method = static_cast<Method>(method);
    m.class_count = r.u32();
    const std::size_t dim = r.u32();
    const std::size_t vector_count = r.u32();
    const unsigned alphabet = r.u32();
    const unsigned bits = r.u8();
    const double sparsity = r.f64();

    m.encoder.hyper_dim = dim;
    m.encoder.input_dim = r.u32();
    m.encoder.seed = r.u64();
    const std::uint8_t nl = r.u8();
    if (nl > 2) throw FormatError("unknown nonlinearity id");
    m.encoder.nonlinearity = static_cast<Nonlinearity>(nl);
    if (m.class_count < 1 || dim < 1 || m.encoder.input_dim < 1) throw FormatError("header has a zero dimension");

    const std::uint8_t has_codebook = r.u8();
    if (has_codebook > 1) throw FormatError("invalid codebook flag");
    if (has_codebook) {
        CodebookSpec cs;
        cs.class_count = m.class_count;
        cs.alphabet_size = alphabet;
        cs.alpha = r.f64();
        cs.tie_epsilon = r.f64();
        cs.candidate_pool_cap = r.u64();
        cs.seed = r.u64();
        cs.code_length = r.u32();
        check_count(static_cast<std::uint64_t>(cs.class_count) * cs.code_length, 1, r, "codebook symbol");
        try {
            cs.validate();
        } catch (const ConfigError& e) {
            throw FormatError(std::string("invalid codebook header: ") + e.what());
        }
        Codebook cb;
        cb.spec = cs;
        const auto sym = r.bytes(cs.class_count * cs.code_length);
        cb.symbols.assign(sym.begin(), sym.end());
        for (auto s : cb.symbols) {
            if (s >= alphabet) throw FormatError("codebook symbol outside alphabet");
        }
        cb.final_loads = load_profile(cb);
        m.codebook = std::move(cb);
    }

    const std::uint64_t label_count = r.u32();
    check_count(label_count, 8, r, "label");
    for (std::uint64_t i = 0; i < label_count; ++i) f.label_values.push_back(r.i64());
    const std::uint64_t width = r.u32();
    check_count(width, 16, r, "scaler");
    f.scaler.minimum.resize(width);
    f.scaler.maximum.resize(width);
    for (auto& v : f.scaler.minimum) v = r.f64();
    for (auto& v : f.scaler.maximum) v = r.f64();

    QuantizedState& st = f.state;
    st.bits = bits;
    const std::uint64_t tensor_count = r.u32();
    check_count(tensor_count, 25, r, "tensor");
    for (std::uint64_t i = 0; i < tensor_count; ++i) {
        QuantizedTensor t;
        t.rows = r.u32();
        t.cols = r.u32();
        t.scale = r.f64();
        t.bit_offset = r.u64();
        t.column_mask = read_mask(r, t.cols);
        st.tensors.push_back(std::move(t));
    }
    st.payload_bits = r.u64();
    if (st.payload_bits / 8 > r.remaining()) throw FormatError("model file is truncated");
    const auto payload = r.bytes((st.payload_bits + 7) / 8);
    st.payload.assign(payload.begin(), payload.end());
    const std::uint32_t stored_crc = r.u32();
    if (r.remaining() != 0) throw FormatError("trailing bytes after model payload");
    if (stored_crc != payload_checksum(st.payload)) throw FormatError("payload checksum mismatch");
    st.validate();

    // Cross-check header against the tensor layout.
    if (st.tensors.empty() || st.tensors[0].rows != vector_count || st.tensors[0].cols != dim) {
        throw FormatError("vector tensor shape does not match header");
    }
    if (st.tensors.size() != (uses_profiles(m.method) ? 2u : 1u)) throw FormatError("tensor count does not match method");
    if (uses_profiles(m.method)) {
        if (!m.codebook || m.codebook->code_length() != vector_count) throw FormatError("profile model needs a codebook");
        if (st.tensors[1].rows != m.class_count || st.tensors[1].cols != vector_count) {
            throw FormatError("profile tensor shape does not match header");
        }
    } else if (vector_count != m.class_count) {
        throw FormatError("prototype model must store one vector per class");
    }

    const auto& mask = st.tensors[0].column_mask;
    if (mask.empty()) {
        m.mask = SparsityMask::dense(dim);
    } else {
        m.mask.retained = mask;
        m.mask.retained_count = st.tensors[0].stored_coords() / std::max<std::size_t>(1, vector_count);
    }
    m.mask.sparsity = sparsity;
    m.vectors.assign(vector_count, Hypervector(dim, 0.0));
    return f;
}

void save_model(const std::filesystem::path& path, const ModelFile& file) {
    const auto bytes = serialize_model(file);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("write failed for " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_model(bytes);
}

}  // namespace loghd
