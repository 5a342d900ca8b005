#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "mlgate/tensor.hpp"

namespace mlgate::data {

enum class Split { Train, Test, Synthetic };

const char* to_string(Split split) noexcept;

struct Dataset {
  /// N x H x W x C for images, N x D for feature vectors; values in [0, 1]
  /// for MNIST.
  Tensor<float> images;
  /// N x K one-hot.
  Tensor<float> labels;
  Split split = Split::Train;

  std::size_t size() const noexcept { return images.rank() == 0 ? 0 : images.dim(0); }
  std::size_t classes() const noexcept { return labels.rank() < 2 ? 0 : labels.dim(1); }
  /// Index of the hot entry of row i.
  std::size_t label(std::size_t i) const;
};

/// Raw IDX container: element type code (0x08 ubyte ... 0x0E double), the
/// dimensions and the elements widened to double.
struct IdxArray {
  std::uint8_t type = 0x08;
  std::vector<std::uint32_t> dims;
  std::vector<double> values;
};

/// Reads an IDX file, gzip-compressed or not. Throws DataError.
IdxArray read_idx(const std::filesystem::path& path);

/// Writes an uncompressed IDX file; used to build fixtures.
void write_idx(const std::filesystem::path& path, const IdxArray& array);

/// Pairs an image file (magic 0x00000803) with a label file (0x00000801),
/// scales pixels by 1/255 and one-hot encodes over `classes` labels.
Dataset load_mnist_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path,
                       Split split = Split::Train, std::size_t classes = 10);

struct MnistFiles {
  std::filesystem::path train_images, train_labels, test_images, test_labels;
};

/// Looks for the four standard file names (optionally .gz) under dir.
std::optional<MnistFiles> find_mnist(const std::filesystem::path& dir);

/// Unit-variance Gaussian blobs. Class means sit on a circle in the first two
/// coordinates with neighbouring means `separation` apart.
Dataset synth_blobs(std::size_t n_per_class, std::size_t classes, double separation, std::uint64_t seed,
                    std::size_t dim = 2);

/// Independent 64-bit seed for sub-stream `stream` of a run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Seeded permutation of 0..n-1 (Fisher-Yates).
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

/// Copies the selected rows into a new dataset.
Dataset gather(const Dataset& ds, std::span<const std::size_t> rows);

/// ceil(N / batch_size) batches over a seeded permutation; the last batch
/// may be short.
class Batches {
 public:
  Batches(const Dataset& ds, std::size_t batch_size, std::uint64_t shuffle_seed);

  std::size_t size() const noexcept { return count_; }
  std::span<const std::size_t> indices(std::size_t i) const;
  Dataset operator[](std::size_t i) const;

  class iterator {
   public:
    using value_type = Dataset;
    using difference_type = std::ptrdiff_t;
    iterator(const Batches* owner, std::size_t i) : owner_(owner), i_(i) {}
    Dataset operator*() const { return (*owner_)[i_]; }
    iterator& operator++() {
      ++i_;
      return *this;
    }
    bool operator==(const iterator& o) const { return i_ == o.i_; }

   private:
    const Batches* owner_;
    std::size_t i_;
  };

  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, count_}; }

 private:
  const Dataset* ds_;
  std::size_t batch_size_;
  std::size_t count_;
  std::vector<std::size_t> order_;
};

}  // namespace mlgate::data
