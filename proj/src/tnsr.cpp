#include "logtr/tnsr.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace logtr {

namespace {

constexpr char kMagic[4] = {'T', 'N', 'S', 'R'};

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : bytes_(b) {}

  std::uint64_t le(int n, const char* what) {
    need(static_cast<std::size_t>(n), what);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw TnsrTruncated("TNSR truncated while reading " + std::string(what) + " at byte " + std::to_string(pos_));
    }
  }

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_tnsr(const Tensor& t) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(kTnsrVersion);
  if (t.order() > std::numeric_limits<std::uint32_t>::max()) throw TnsrDimOverflow("too many modes");
  out.reserve(9 + 8 * t.order() + 8 * t.size());
  put_le(out, t.order(), 4);
  for (auto e : t.dims()) put_le(out, e, 8);
  for (double v : t.data()) put_le(out, std::bit_cast<std::uint64_t>(v), 8);
  return out;
}

Tensor decode_tnsr(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw TnsrBadMagic("not a TNSR file (bad magic)");
  Reader r(bytes);
  r.le(4, "magic");
  const auto version = r.le(1, "version");
  if (version != kTnsrVersion) throw TnsrBadVersion("unsupported TNSR version " + std::to_string(version));
  const auto ndim = r.le(4, "ndim");
  if (ndim > r.remaining() / 8) throw TnsrTruncated("TNSR truncated: ndim " + std::to_string(ndim) + " exceeds file");
  Dims dims(ndim);
  std::uint64_t count = 1;
  for (auto& e : dims) {
    const std::uint64_t x = r.le(8, "extent");
    if (x != 0 && count > std::numeric_limits<std::uint64_t>::max() / 8 / x) {
      throw TnsrDimOverflow("TNSR extents overflow the element count");
    }
    count *= x;
    if (x > std::numeric_limits<std::size_t>::max()) throw TnsrDimOverflow("TNSR extent exceeds size_t");
    e = static_cast<std::size_t>(x);
  }
  r.need(static_cast<std::size_t>(count * 8), "values");
  if (r.remaining() != count * 8) throw TnsrTrailingBytes("TNSR file has " + std::to_string(r.remaining() - count * 8) + " trailing bytes");
  Tensor t(dims);
  for (double& v : t.data()) v = std::bit_cast<double>(r.le(8, "value"));
  return t;
}

void write_tnsr(const std::filesystem::path& path, const Tensor& t) {
  const auto bytes = encode_tnsr(t);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TnsrIoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw TnsrIoError("write failed for " + path.string());
}

Tensor read_tnsr(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TnsrIoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw TnsrIoError("read failed for " + path.string());
  return decode_tnsr(bytes);
}

}  // namespace logtr
