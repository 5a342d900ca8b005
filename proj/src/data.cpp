#include "mlgate/data.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <random>

#include "mlgate/error.hpp"

namespace mlgate::data {

namespace {

class GzFile {
 public:
  GzFile(const std::filesystem::path& path, const char* mode) : path_(path.string()) {
    f_ = gzopen(path_.c_str(), mode);
    if (f_ == nullptr) throw DataError(DataErrc::Io, "cannot open " + path_);
  }
  GzFile(const GzFile&) = delete;
  GzFile& operator=(const GzFile&) = delete;
  ~GzFile() {
    if (f_ != nullptr) gzclose(f_);
  }

  // Reads exactly n bytes or throws Truncated.
  void read(void* dst, std::size_t n) {
    auto* out = static_cast<unsigned char*>(dst);
    while (n > 0) {
      const auto chunk = static_cast<unsigned>(std::min<std::size_t>(n, 1U << 30));
      const int got = gzread(f_, out, chunk);
      if (got < 0) throw DataError(DataErrc::Io, "read error in " + path_);
      if (got == 0) throw DataError(DataErrc::Truncated, path_ + " ends early");
      out += got;
      n -= static_cast<std::size_t>(got);
    }
  }

  void write(const void* src, std::size_t n) {
    if (n > 0 && gzwrite(f_, src, static_cast<unsigned>(n)) != static_cast<int>(n)) {
      throw DataError(DataErrc::Io, "write error in " + path_);
    }
  }

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
  gzFile f_ = nullptr;
};

std::uint32_t read_be32(GzFile& f) {
  unsigned char b[4];
  f.read(b, 4);
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

std::size_t element_size(std::uint8_t type) {
  switch (type) {
    case 0x08:
    case 0x09: return 1;
    case 0x0B: return 2;
    case 0x0C:
    case 0x0D: return 4;
    case 0x0E: return 8;
    default: return 0;
  }
}

struct RawIdx {
  std::uint8_t type;
  std::vector<std::uint32_t> dims;
  std::vector<unsigned char> bytes;  // big-endian elements
};

RawIdx read_raw(const std::filesystem::path& path) {
  GzFile f(path, "rb");
  const std::uint32_t magic = read_be32(f);
  const auto type = static_cast<std::uint8_t>((magic >> 8) & 0xFF);
  const std::size_t rank = magic & 0xFF;
  if ((magic >> 16) != 0 || element_size(type) == 0 || rank == 0) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08X", magic);
    throw DataError(DataErrc::BadMagic, f.path() + " has IDX magic " + buf);
  }
  RawIdx raw{type, {}, {}};
  std::size_t count = 1;
  for (std::size_t i = 0; i < rank; ++i) {
    raw.dims.push_back(read_be32(f));
    count *= raw.dims.back();
  }
  raw.bytes.resize(count * element_size(type));
  f.read(raw.bytes.data(), raw.bytes.size());
  return raw;
}

template <typename U>
U load_be(const unsigned char* p) {
  using Bits = std::conditional_t<sizeof(U) == 1, std::uint8_t,
                                  std::conditional_t<sizeof(U) == 2, std::uint16_t,
                                                     std::conditional_t<sizeof(U) == 4, std::uint32_t, std::uint64_t>>>;
  Bits bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits = static_cast<Bits>((bits << 8) | p[i]);
  return std::bit_cast<U>(bits);
}

template <typename U>
void store_be(U v, unsigned char* p) {
  using Bits = std::conditional_t<sizeof(U) == 1, std::uint8_t,
                                  std::conditional_t<sizeof(U) == 2, std::uint16_t,
                                                     std::conditional_t<sizeof(U) == 4, std::uint32_t, std::uint64_t>>>;
  auto bits = std::bit_cast<Bits>(v);
  for (std::size_t i = sizeof(U); i-- > 0;) {
    p[i] = static_cast<unsigned char>(bits & 0xFF);
    bits = static_cast<Bits>(bits >> 8);
  }
}

double decode(std::uint8_t type, const unsigned char* p) {
  switch (type) {
    case 0x08: return p[0];
    case 0x09: return static_cast<std::int8_t>(p[0]);
    case 0x0B: return load_be<std::int16_t>(p);
    case 0x0C: return load_be<std::int32_t>(p);
    case 0x0D: return load_be<float>(p);
    default: return load_be<double>(p);
  }
}

void encode(std::uint8_t type, double v, unsigned char* p) {
  switch (type) {
    case 0x08: p[0] = static_cast<std::uint8_t>(v); break;
    case 0x09: p[0] = static_cast<unsigned char>(static_cast<std::int8_t>(v)); break;
    case 0x0B: store_be(static_cast<std::int16_t>(v), p); break;
    case 0x0C: store_be(static_cast<std::int32_t>(v), p); break;
    case 0x0D: store_be(static_cast<float>(v), p); break;
    default: store_be(v, p); break;
  }
}

}  // namespace

const char* to_string(Split split) noexcept {
  switch (split) {
    case Split::Train: return "train";
    case Split::Test: return "test";
    case Split::Synthetic: return "synthetic";
  }
  return "unknown";
}

std::size_t Dataset::label(std::size_t i) const {
  const std::size_t k = classes();
  const float* row = labels.data() + i * k;
  return static_cast<std::size_t>(std::max_element(row, row + k) - row);
}

IdxArray read_idx(const std::filesystem::path& path) {
  RawIdx raw = read_raw(path);
  IdxArray out{raw.type, std::move(raw.dims), {}};
  const std::size_t es = element_size(raw.type);
  out.values.resize(raw.bytes.size() / es);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = decode(raw.type, raw.bytes.data() + i * es);
  return out;
}

void write_idx(const std::filesystem::path& path, const IdxArray& array) {
  const std::size_t es = element_size(array.type);
  if (es == 0 || array.dims.empty() || array.dims.size() > 255) {
    throw DataError(DataErrc::Shape, "unsupported IDX type or rank");
  }
  std::size_t count = 1;
  for (auto d : array.dims) count *= d;
  if (count != array.values.size()) throw DataError(DataErrc::CountMismatch, "IDX dims do not match values");

  std::vector<unsigned char> buf(4 + 4 * array.dims.size() + count * es);
  store_be(static_cast<std::uint32_t>((std::uint32_t{array.type} << 8) | array.dims.size()), buf.data());
  for (std::size_t i = 0; i < array.dims.size(); ++i) store_be(array.dims[i], buf.data() + 4 + 4 * i);
  unsigned char* p = buf.data() + 4 + 4 * array.dims.size();
  for (std::size_t i = 0; i < count; ++i) encode(array.type, array.values[i], p + i * es);
  GzFile f(path, "wbT");  // T: no compression
  f.write(buf.data(), buf.size());
}

Dataset load_mnist_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path,
                       Split split, std::size_t classes) {
  const RawIdx img = read_raw(images_path);
  if (img.type != 0x08 || img.dims.size() != 3) {
    throw DataError(DataErrc::BadMagic, images_path.string() + " is not an IDX image file (magic 0x00000803)");
  }
  const RawIdx lab = read_raw(labels_path);
  if (lab.type != 0x08 || lab.dims.size() != 1) {
    throw DataError(DataErrc::BadMagic, labels_path.string() + " is not an IDX label file (magic 0x00000801)");
  }
  const std::size_t n = img.dims[0];
  if (lab.dims[0] != n) {
    throw DataError(DataErrc::CountMismatch, std::to_string(n) + " images but " + std::to_string(lab.dims[0]) +
                                                 " labels");
  }
  const std::size_t rows = img.dims[1];
  const std::size_t cols = img.dims[2];

  Dataset ds;
  ds.split = split;
  std::vector<float> pixels(img.bytes.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = static_cast<float>(img.bytes[i]) / 255.0f;
  ds.images = Tensor<float>({n, rows, cols, 1}, std::move(pixels));
  ds.labels = Tensor<float>({n, classes}, 0.0f);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t y = lab.bytes[i];
    if (y >= classes) {
      throw DataError(DataErrc::Shape, "label " + std::to_string(y) + " out of range in " + labels_path.string());
    }
    ds.labels[i * classes + y] = 1.0f;
  }
  return ds;
}

std::optional<MnistFiles> find_mnist(const std::filesystem::path& dir) {
  if (dir.empty()) return std::nullopt;
  auto locate = [&](const char* stem) -> std::optional<std::filesystem::path> {
    for (const char* sep : {"-", "."}) {
      std::string name = stem;
      std::replace(name.begin(), name.end(), '#', sep[0]);
      for (const char* ext : {"", ".gz"}) {
        auto p = dir / (name + ext);
        if (std::filesystem::is_regular_file(p)) return p;
      }
    }
    return std::nullopt;
  };
  auto ti = locate("train-images#idx3-ubyte");
  auto tl = locate("train-labels#idx1-ubyte");
  auto vi = locate("t10k-images#idx3-ubyte");
  auto vl = locate("t10k-labels#idx1-ubyte");
  if (!ti || !tl || !vi || !vl) return std::nullopt;
  return MnistFiles{*ti, *tl, *vi, *vl};
}

Dataset synth_blobs(std::size_t n_per_class, std::size_t classes, double separation, std::uint64_t seed,
                    std::size_t dim) {
  if (classes < 2) throw DataError(DataErrc::Shape, "synth_blobs needs at least two classes");
  if (dim < 2) throw DataError(DataErrc::Shape, "synth_blobs needs at least two dimensions");
  const std::size_t n = n_per_class * classes;
  const double radius = separation / (2.0 * std::sin(std::numbers::pi / static_cast<double>(classes)));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  Dataset ds;
  ds.split = Split::Synthetic;
  ds.images = Tensor<float>({n, dim}, 0.0f);
  ds.labels = Tensor<float>({n, classes}, 0.0f);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % classes;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(classes);
    for (std::size_t d = 0; d < dim; ++d) {
      double mean = 0.0;
      if (d == 0) mean = radius * std::cos(angle);
      if (d == 1) mean = radius * std::sin(angle);
      ds.images[i * dim + d] = static_cast<float>(mean + noise(rng));
    }
    ds.labels[i * classes + c] = 1.0f;
  }
  return ds;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (std::uint64_t{out[0]} << 32) | out[1];
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(derive_seed(seed, 0x5348554646ULL));
  for (std::size_t i = n; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(idx[i - 1], idx[pick(rng)]);
  }
  return idx;
}

Dataset gather(const Dataset& ds, std::span<const std::size_t> rows) {
  std::vector<std::size_t> img_shape = ds.images.shape();
  std::vector<std::size_t> lab_shape = ds.labels.shape();
  img_shape[0] = rows.size();
  lab_shape[0] = rows.size();
  const std::size_t is = ds.images.row_size();
  const std::size_t ls = ds.labels.row_size();
  Dataset out;
  out.split = ds.split;
  out.images = Tensor<float>(img_shape);
  out.labels = Tensor<float>(lab_shape);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::memcpy(out.images.data() + r * is, ds.images.data() + rows[r] * is, is * sizeof(float));
    std::memcpy(out.labels.data() + r * ls, ds.labels.data() + rows[r] * ls, ls * sizeof(float));
  }
  return out;
}

Batches::Batches(const Dataset& ds, std::size_t batch_size, std::uint64_t shuffle_seed)
    : ds_(&ds), batch_size_(batch_size), count_(0), order_(shuffled_indices(ds.size(), shuffle_seed)) {
  if (batch_size == 0) throw DataError(DataErrc::Shape, "batch size must be at least 1");
  count_ = (ds.size() + batch_size - 1) / batch_size;
}

std::span<const std::size_t> Batches::indices(std::size_t i) const {
  const std::size_t begin = i * batch_size_;
  const std::size_t end = std::min(begin + batch_size_, order_.size());
  return std::span<const std::size_t>(order_).subspan(begin, end - begin);
}

Dataset Batches::operator[](std::size_t i) const { return gather(*ds_, indices(i)); }

}  // namespace mlgate::data
