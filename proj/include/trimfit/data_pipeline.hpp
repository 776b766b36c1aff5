#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trimfit/dataset.hpp"

namespace trimfit {

/// Raw IDX tensor: dimension sizes plus payload decoded to reals.
struct IdxTensor {
  std::vector<int> dims;
  std::vector<double> data;

  std::size_t count() const { return dims.empty() ? 0 : static_cast<std::size_t>(dims[0]); }
};

/// Synthetic regression data: features N(0, 100), responses e.x + N(0, 1).
/// The generating weights (all ones) and seed go into provenance.
Dataset generate_regression(int d, int N, std::uint64_t seed);

/// 40% contamination: floor(0.2N) bad leverage points (x_0 redrawn from
/// N(100, 100)) plus a disjoint ceil(0.2N) vertical outliers (y += 1000).
Dataset contaminate_regression(const Dataset& data, std::uint64_t seed);

/// Flips ceil(p*N) uniformly chosen labels to (y + 1) mod 10 and marks them.
Dataset flip_labels(const Dataset& data, double p, std::uint64_t seed);

/// Big-endian IDX reader (unsigned-byte payloads).
IdxTensor read_idx(const std::string& path);

/// Writer for the same format; values are clamped to [0, 255] bytes.
void write_idx(const std::string& path, const std::vector<int>& dims,
               const std::vector<std::uint8_t>& payload);

/// Flattens images to [0,1]-scaled pixels with an appended bias 1; labels
/// stay as class indices.
Dataset featurize_mnist(const IdxTensor& images, const IdxTensor& labels);

/// CSV round-trip: header row, features then label then optional mask column.
void write_dataset_csv(const Dataset& data, const std::string& path);
Dataset read_dataset_csv(const std::string& path);

}  // namespace trimfit
