#include <gtest/gtest.h>
#include <zlib.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "mlgate/data.hpp"
#include "mlgate/error.hpp"

namespace fs = std::filesystem;
using namespace mlgate::data;
using mlgate::DataErrc;
using mlgate::DataError;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("mlgate_data_" + std::to_string(::getpid()) + "_" +
                                         std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

void write_bytes(const fs::path& p, const std::vector<unsigned char>& bytes) {
  std::ofstream f(p, std::ios::binary);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_gz(const fs::path& p, const std::vector<unsigned char>& bytes) {
  gzFile f = gzopen(p.string().c_str(), "wb9");
  ASSERT_NE(f, nullptr);
  gzwrite(f, bytes.data(), static_cast<unsigned>(bytes.size()));
  gzclose(f);
}

void put_be32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<unsigned char>(v >> s));
}

// Two 2x3 images and their labels.
std::vector<unsigned char> image_fixture() {
  std::vector<unsigned char> b;
  put_be32(b, 0x00000803);
  put_be32(b, 2);
  put_be32(b, 2);
  put_be32(b, 3);
  for (unsigned char v : {0, 255, 128, 1, 2, 3, 255, 0, 64, 10, 20, 30}) b.push_back(v);
  return b;
}

std::vector<unsigned char> label_fixture(std::uint32_t n = 2) {
  std::vector<unsigned char> b;
  put_be32(b, 0x00000801);
  put_be32(b, n);
  for (std::uint32_t i = 0; i < n; ++i) b.push_back(static_cast<unsigned char>((7 + 2 * i) % 10));
  return b;
}

DataErrc error_code(auto&& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected DataError";
  return DataErrc::Io;
}

}  // namespace

TEST(Idx, FixtureRoundTripsPixelValues) {
  TempDir dir;
  write_bytes(dir / "img", image_fixture());
  write_bytes(dir / "lab", label_fixture());
  const Dataset ds = load_mnist_idx(dir / "img", dir / "lab");
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.images.shape(), (std::vector<std::size_t>{2, 2, 3, 1}));
  EXPECT_EQ(ds.images[0], 0.0f);
  EXPECT_EQ(ds.images[1], 1.0f);
  EXPECT_EQ(ds.images[2], 128.0f / 255.0f);
  EXPECT_EQ(ds.images[6], 1.0f);
  EXPECT_EQ(ds.label(0), 7u);
  EXPECT_EQ(ds.label(1), 9u);
  EXPECT_EQ(ds.classes(), 10u);
  float row_sum = 0.0f;
  for (std::size_t k = 0; k < 10; ++k) row_sum += ds.labels[k];
  EXPECT_EQ(row_sum, 1.0f);
}

TEST(Idx, GzipIsTransparent) {
  TempDir dir;
  write_gz(dir / "img.gz", image_fixture());
  write_gz(dir / "lab.gz", label_fixture());
  write_bytes(dir / "img", image_fixture());
  write_bytes(dir / "lab", label_fixture());
  const Dataset a = load_mnist_idx(dir / "img.gz", dir / "lab.gz");
  const Dataset b = load_mnist_idx(dir / "img", dir / "lab");
  EXPECT_EQ(a.images, b.images);
  EXPECT_EQ(a.labels, b.labels);
}

TEST(Idx, HeaderIsBigEndian) {
  TempDir dir;
  IdxArray arr{0x08, {1, 258}, {}};
  arr.values.assign(258, 7.0);
  write_idx(dir / "a", arr);
  std::ifstream f(dir / "a", std::ios::binary);
  std::vector<unsigned char> head(12);
  f.read(reinterpret_cast<char*>(head.data()), 12);
  EXPECT_EQ(head, (std::vector<unsigned char>{0, 0, 8, 2, 0, 0, 0, 1, 0, 0, 1, 2}));
}

TEST(Idx, EveryTypeAndRankRoundTrips) {
  TempDir dir;
  std::mt19937_64 rng(1);
  for (std::uint8_t type : {0x08, 0x09, 0x0B, 0x0C, 0x0D, 0x0E}) {
    for (std::size_t rank = 1; rank <= 5; ++rank) {
      IdxArray arr{type, {}, {}};
      std::size_t count = 1;
      for (std::size_t d = 0; d < rank; ++d) {
        arr.dims.push_back(static_cast<std::uint32_t>(1 + rng() % 4));
        count *= arr.dims.back();
      }
      for (std::size_t i = 0; i < count; ++i) {
        const auto r = static_cast<std::int64_t>(rng() % 200);
        double v = static_cast<double>(r);
        if (type == 0x09 || type == 0x0B || type == 0x0C) v -= 100.0;
        if (type == 0x0D) v = (v - 100.0) / 8.0;
        if (type == 0x0E) v = (v - 100.0) / 3.0;
        arr.values.push_back(v);
      }
      const auto path = dir / ("t" + std::to_string(type) + "_" + std::to_string(rank));
      write_idx(path, arr);
      const IdxArray back = read_idx(path);
      EXPECT_EQ(back.type, arr.type);
      EXPECT_EQ(back.dims, arr.dims);
      EXPECT_EQ(back.values, arr.values) << int(type) << " rank " << rank;
    }
  }
}

TEST(Idx, Errors) {
  TempDir dir;
  write_bytes(dir / "img", image_fixture());
  write_bytes(dir / "lab", label_fixture());
  write_bytes(dir / "lab3", label_fixture(3));

  EXPECT_EQ(error_code([&] { load_mnist_idx(dir / "missing", dir / "lab"); }), DataErrc::Io);
  EXPECT_EQ(error_code([&] { load_mnist_idx(dir / "lab", dir / "img"); }), DataErrc::BadMagic);
  EXPECT_EQ(error_code([&] { load_mnist_idx(dir / "img", dir / "lab3"); }), DataErrc::CountMismatch);

  auto bad = image_fixture();
  bad[0] = 0x12;
  write_bytes(dir / "bad", bad);
  EXPECT_EQ(error_code([&] { read_idx(dir / "bad"); }), DataErrc::BadMagic);

  auto cut = image_fixture();
  cut.resize(cut.size() - 3);
  write_bytes(dir / "cut", cut);
  EXPECT_EQ(error_code([&] { load_mnist_idx(dir / "cut", dir / "lab"); }), DataErrc::Truncated);

  write_bytes(dir / "short", {0, 0, 8});
  EXPECT_EQ(error_code([&] { read_idx(dir / "short"); }), DataErrc::Truncated);
}

TEST(Mnist, OfficialFiles) {
  const char* env = std::getenv("MLGATE_DATA_DIR");
  std::string dir = env ? env : "";
#ifdef MLGATE_MNIST_DIR
  if (dir.empty()) dir = MLGATE_MNIST_DIR;
#endif
  const auto files = find_mnist(dir);
  if (!files) GTEST_SKIP() << "MNIST files not found (set MLGATE_DATA_DIR)";
  const Dataset train = load_mnist_idx(files->train_images, files->train_labels, Split::Train);
  const Dataset test = load_mnist_idx(files->test_images, files->test_labels, Split::Test);
  EXPECT_EQ(train.size(), 60000u);
  EXPECT_EQ(test.size(), 10000u);
  EXPECT_EQ(train.images.shape(), (std::vector<std::size_t>{60000, 28, 28, 1}));
  for (float v : train.images.values()) {
    ASSERT_GE(v, 0.0f);
    ASSERT_LE(v, 1.0f);
  }
  std::vector<std::size_t> per_class(10, 0);
  for (std::size_t i = 0; i < test.size(); ++i) ++per_class[test.label(i)];
  for (std::size_t c : per_class) EXPECT_GT(c, 800u);
}

TEST(SynthBlobs, ZeroSeparationMeansCoincide) {
  const Dataset ds = synth_blobs(4000, 3, 0.0, 5);
  std::vector<double> mx(3, 0.0), my(3, 0.0);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    mx[ds.label(i)] += ds.images[2 * i] / 4000.0;
    my[ds.label(i)] += ds.images[2 * i + 1] / 4000.0;
  }
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_NEAR(mx[c], 0.0, 0.08);
    EXPECT_NEAR(my[c], 0.0, 0.08);
  }
}

TEST(SynthBlobs, Deterministic) {
  const Dataset a = synth_blobs(50, 4, 3.0, 42, 5);
  const Dataset b = synth_blobs(50, 4, 3.0, 42, 5);
  EXPECT_EQ(a.images, b.images);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.images.shape(), (std::vector<std::size_t>{200, 5}));
  EXPECT_NE(a.images, synth_blobs(50, 4, 3.0, 43, 5).images);
  EXPECT_THROW(synth_blobs(5, 1, 1.0, 1), DataError);
}

TEST(SynthBlobs, WideSeparationIsLinearlySeparable) {
  const Dataset ds = synth_blobs(500, 2, 10.0, 9);
  // Nearest-mean classifier: a linear rule with closed-form weights.
  double m[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < ds.size(); ++i) {
    m[ds.label(i)][0] += ds.images[2 * i] / 500.0;
    m[ds.label(i)][1] += ds.images[2 * i + 1] / 500.0;
  }
  const double w0 = m[1][0] - m[0][0], w1 = m[1][1] - m[0][1];
  const double b = -(w0 * (m[0][0] + m[1][0]) + w1 * (m[0][1] + m[1][1])) / 2.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double s = w0 * ds.images[2 * i] + w1 * ds.images[2 * i + 1] + b;
    correct += (s > 0.0) == (ds.label(i) == 1);
  }
  EXPECT_EQ(correct, ds.size());
}

TEST(Batches, SizesAndDeterminism) {
  const Dataset ds = synth_blobs(5, 2, 1.0, 1);
  const Batches b(ds, 4, 7);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0].size(), 4u);
  EXPECT_EQ(b[1].size(), 4u);
  EXPECT_EQ(b[2].size(), 2u);
  const Batches again(ds, 4, 7);
  for (std::size_t i = 0; i < b.size(); ++i) {
    EXPECT_TRUE(std::equal(b.indices(i).begin(), b.indices(i).end(), again.indices(i).begin()));
  }
  std::size_t seen = 0;
  for (const Dataset& part : b) seen += part.size();
  EXPECT_EQ(seen, 10u);
  EXPECT_THROW(Batches(ds, 0, 1), DataError);
}

TEST(Batches, PartitionProperty) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + rng() % 300;
    const std::size_t bs = 1 + rng() % 70;
    Dataset ds;
    ds.images = mlgate::Tensor<float>({n, 1});
    ds.labels = mlgate::Tensor<float>({n, 2});
    for (std::size_t i = 0; i < n; ++i) ds.images[i] = static_cast<float>(i);
    const Batches b(ds, bs, rng());
    EXPECT_EQ(b.size(), (n + bs - 1) / bs);
    std::vector<std::size_t> all;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const auto idx = b.indices(i);
      if (i + 1 < b.size()) {
        EXPECT_EQ(idx.size(), bs);
      }
      const Dataset part = b[i];
      for (std::size_t r = 0; r < idx.size(); ++r) EXPECT_EQ(part.images[r], static_cast<float>(idx[r]));
      all.insert(all.end(), idx.begin(), idx.end());
    }
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expect(n);
    std::iota(expect.begin(), expect.end(), 0);
    EXPECT_EQ(all, expect);
  }
}

TEST(Batches, SeedChangesOrder) {
  const auto a = shuffled_indices(100, 1);
  const auto b = shuffled_indices(100, 2);
  EXPECT_NE(a, b);
  EXPECT_EQ(a, shuffled_indices(100, 1));
  EXPECT_NE(derive_seed(1234, 1), derive_seed(1234, 2));
}
