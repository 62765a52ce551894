#include <bsvd/bsvd_file.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace bsvd {

Dtype dtype_of(const AnyBatch &b) {
    return static_cast<Dtype>(b.index());
}

std::size_t batch_size(const AnyBatch &b) {
    return std::visit([](const auto &v) { return v.size(); }, b);
}

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

class Writer {
  public:
    void bytes(const void *p, std::size_t n) {
        auto b = static_cast<const std::uint8_t *>(p);
        out_.insert(out_.end(), b, b + n);
    }
    template <class U>
    void uint_le(U v) {
        for (std::size_t i = 0; i < sizeof(U); ++i)
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void real(float x) { uint_le(std::bit_cast<std::uint32_t>(x)); }
    void real(double x) { uint_le(std::bit_cast<std::uint64_t>(x)); }

    std::vector<std::uint8_t> take() { return std::move(out_); }

  private:
    std::vector<std::uint8_t> out_;
};

class Reader {
  public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::size_t remaining() const { return in_.size() - pos_; }
    void need(std::size_t n) const {
        if (remaining() < n)
            throw FormatError("bsvd: truncated input");
    }
    template <class U>
    U uint_le() {
        need(sizeof(U));
        U v = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i)
            v |= static_cast<U>(static_cast<U>(in_[pos_ + i]) << (8 * i));
        pos_ += sizeof(U);
        return v;
    }
    template <class R>
    R real() {
        if constexpr (std::is_same_v<R, float>)
            return std::bit_cast<float>(uint_le<std::uint32_t>());
        else
            return std::bit_cast<double>(uint_le<std::uint64_t>());
    }

  private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

template <class T>
void put(Writer &w, const T &x) {
    if constexpr (is_complex_v<T>) {
        w.real(x.real());
        w.real(x.imag());
    } else {
        w.real(x);
    }
}

template <class T>
T get(Reader &r) {
    using R = real_t<T>;
    if constexpr (is_complex_v<T>) {
        const R re = r.real<R>();
        const R im = r.real<R>();
        return T(re, im);
    } else {
        return r.real<R>();
    }
}

template <class T>
std::vector<Matrix<T>> parse_matrices(Reader &r, std::uint32_t count) {
    std::vector<Matrix<T>> out;
    for (std::uint32_t b = 0; b < count; ++b) {
        const std::uint32_t m = r.uint_le<std::uint32_t>();
        const std::uint32_t n = r.uint_le<std::uint32_t>();
        const auto elems      = static_cast<std::uint64_t>(m) * n;
        if (elems > r.remaining() / sizeof(T))
            throw FormatError("bsvd: truncated input");
        Matrix<T> A(m, n);
        for (auto &x : A.elements())
            x = get<T>(r);
        out.push_back(std::move(A));
    }
    return out;
}

} // namespace

std::vector<std::uint8_t> serialize(const AnyBatch &batch) {
    Writer w;
    w.bytes("BSVD", 4);
    w.uint_le<std::uint8_t>(bsvd_format_version);
    w.uint_le<std::uint8_t>(static_cast<std::uint8_t>(dtype_of(batch)));
    w.uint_le<std::uint8_t>(0);
    w.uint_le<std::uint8_t>(0);
    std::visit(
        [&](const auto &mats) {
            if (mats.size() > std::numeric_limits<std::uint32_t>::max())
                throw FormatError("bsvd: too many matrices");
            w.uint_le<std::uint32_t>(static_cast<std::uint32_t>(mats.size()));
            for (const auto &A : mats) {
                w.uint_le<std::uint32_t>(static_cast<std::uint32_t>(A.rows()));
                w.uint_le<std::uint32_t>(static_cast<std::uint32_t>(A.cols()));
                for (const auto &x : A.elements())
                    put(w, x);
            }
        },
        batch);
    return w.take();
}

AnyBatch parse(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    r.need(12);
    if (std::memcmp(bytes.data(), "BSVD", 4) != 0)
        throw FormatError("bsvd: bad magic");
    for (int i = 0; i < 8; ++i) // magic, version, dtype, reserved
        r.uint_le<std::uint8_t>();
    if (bytes[4] != bsvd_format_version)
        throw FormatError("bsvd: unsupported version");
    const std::uint8_t dtype = bytes[5];
    if (bytes[6] != 0 || bytes[7] != 0)
        throw FormatError("bsvd: reserved bytes must be zero");
    const auto count = r.uint_le<std::uint32_t>();

    AnyBatch out;
    switch (dtype) {
    case 0: out = parse_matrices<float>(r, count); break;
    case 1: out = parse_matrices<double>(r, count); break;
    case 2: out = parse_matrices<std::complex<float>>(r, count); break;
    case 3: out = parse_matrices<std::complex<double>>(r, count); break;
    default: throw FormatError("bsvd: unknown dtype");
    }
    if (r.remaining() != 0)
        throw FormatError("bsvd: trailing bytes after last matrix");
    return out;
}

void write_bsvd(const std::filesystem::path &path, const AnyBatch &batch) {
    const auto bytes = serialize(batch);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    f.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f)
        throw std::runtime_error("write to '" + path.string() + "' failed");
}

AnyBatch read_bsvd(const std::filesystem::path &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    return parse(bytes);
}

} // namespace bsvd
