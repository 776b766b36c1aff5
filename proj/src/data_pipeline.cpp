#include "trimfit/data_pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "trimfit/rng.hpp"

namespace trimfit {

Dataset generate_regression(int d, int N, std::uint64_t seed) {
  if (d < 1 || N < 1) throw std::invalid_argument("generate_regression: d and N must be >= 1");
  Rng rng(seed);
  Dataset out;
  out.X.resize(N, d);
  out.y.resize(N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < d; ++j) out.X(i, j) = 10.0 * rng.normal();  // N(0, 100)
    out.y(i) = out.X.row(i).sum() + rng.normal();
  }
  out.outlier_mask = std::vector<std::uint8_t>(N, 0);
  out.provenance = {{"generator", "regression/1"},
                    {"rng", Rng::kName},
                    {"d", d},
                    {"N", N},
                    {"seed", seed},
                    {"true_w", "ones"}};
  return out;
}

Dataset contaminate_regression(const Dataset& data, std::uint64_t seed) {
  const int N = data.size();
  if (!data.outlier_mask ||
      std::count(data.outlier_mask->begin(), data.outlier_mask->end(), 1) != 0)
    throw std::invalid_argument("contaminate_regression: input must be clean (mask all false)");
  const int n_lev = static_cast<int>(std::floor(0.2 * N));
  const int n_vert = static_cast<int>(std::ceil(0.2 * N));
  if (N < 5 || n_lev < 1)
    throw std::invalid_argument("contaminate_regression: N too small for 40% contamination");

  Rng rng(seed);
  // One draw of n_lev + n_vert distinct indices keeps the two sets disjoint.
  std::vector<int> picks = rng.sample_without_replacement(N, n_lev + n_vert);

  Dataset out = data;
  auto& mask = *out.outlier_mask;
  for (int i = 0; i < n_lev; ++i) {
    int idx = picks[i];
    out.X(idx, 0) = 100.0 + 10.0 * rng.normal();  // N(100, 100)
    mask[idx] = 1;
  }
  for (int i = n_lev; i < n_lev + n_vert; ++i) {
    int idx = picks[i];
    out.y(idx) += 1000.0;
    mask[idx] = 1;
  }
  out.provenance["contamination"] = {{"recipe", "leverage+vertical/1"},
                                     {"seed", seed},
                                     {"leverage", n_lev},
                                     {"vertical", n_vert}};
  return out;
}

Dataset flip_labels(const Dataset& data, double p, std::uint64_t seed) {
  if (!data.classification)
    throw std::invalid_argument("flip_labels: requires a classification dataset");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("flip_labels: p must be in [0, 1]");
  const int N = data.size();
  const int k = static_cast<int>(std::ceil(p * N));

  Dataset out = data;
  if (!out.outlier_mask) out.outlier_mask = std::vector<std::uint8_t>(N, 0);
  Rng rng(seed);
  std::vector<int> picks = rng.sample_without_replacement(N, k);
  for (int idx : picks) {
    out.y(idx) = static_cast<double>((data.label_at(idx) + 1) % 10);
    (*out.outlier_mask)[idx] = 1;
  }
  out.provenance["label_flips"] = {{"p", p}, {"seed", seed}, {"count", k}};
  return out;
}

namespace {

std::uint32_t read_be32(std::istream& in, const std::string& path, long offset) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (!in)
    throw std::runtime_error("read_idx: " + path + ": truncated at offset " +
                             std::to_string(offset));
  return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
         (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

}  // namespace

IdxTensor read_idx(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_idx: cannot open " + path);

  unsigned char magic[4];
  in.read(reinterpret_cast<char*>(magic), 4);
  if (!in) throw std::runtime_error("read_idx: " + path + ": truncated at offset 0");
  if (magic[0] != 0 || magic[1] != 0)
    throw std::runtime_error("read_idx: " + path + ": bad magic at offset 0");
  if (magic[2] != 0x08)
    throw std::runtime_error("read_idx: " + path + ": unsupported type byte 0x" +
                             std::to_string(magic[2]) + " at offset 2");
  const int ndim = magic[3];
  if (ndim < 1 || ndim > 4)
    throw std::runtime_error("read_idx: " + path + ": unsupported dimension count at offset 3");

  IdxTensor t;
  std::size_t total = 1;
  for (int i = 0; i < ndim; ++i) {
    std::uint32_t dim = read_be32(in, path, 4 + 4 * i);
    t.dims.push_back(static_cast<int>(dim));
    total *= dim;
  }
  t.data.resize(total);
  std::vector<unsigned char> payload(total);
  in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(total));
  if (static_cast<std::size_t>(in.gcount()) != total)
    throw std::runtime_error("read_idx: " + path + ": truncated payload at offset " +
                             std::to_string(4 + 4 * ndim + in.gcount()));
  for (std::size_t i = 0; i < total; ++i) t.data[i] = static_cast<double>(payload[i]);
  return t;
}

void write_idx(const std::string& path, const std::vector<int>& dims,
               const std::vector<std::uint8_t>& payload) {
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  if (total != payload.size())
    throw std::invalid_argument("write_idx: payload size does not match dimensions");
  if (dims.empty() || dims.size() > 4)
    throw std::invalid_argument("write_idx: 1 to 4 dimensions supported");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_idx: cannot open " + path);
  unsigned char magic[4] = {0, 0, 0x08, static_cast<unsigned char>(dims.size())};
  out.write(reinterpret_cast<char*>(magic), 4);
  for (int d : dims) {
    unsigned char buf[4] = {static_cast<unsigned char>((d >> 24) & 0xFF),
                            static_cast<unsigned char>((d >> 16) & 0xFF),
                            static_cast<unsigned char>((d >> 8) & 0xFF),
                            static_cast<unsigned char>(d & 0xFF)};
    out.write(reinterpret_cast<char*>(buf), 4);
  }
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) throw std::runtime_error("write_idx: write failed for " + path);
}

Dataset featurize_mnist(const IdxTensor& images, const IdxTensor& labels) {
  if (images.dims.size() != 3)
    throw std::invalid_argument("featurize_mnist: images must be N x H x W");
  if (labels.dims.size() != 1)
    throw std::invalid_argument("featurize_mnist: labels must be one-dimensional");
  const int N = images.dims[0];
  if (labels.dims[0] != N)
    throw std::invalid_argument("featurize_mnist: image/label cardinality mismatch");
  const int pixels = images.dims[1] * images.dims[2];

  Dataset out;
  out.classification = true;
  out.X.resize(N, pixels + 1);
  out.y.resize(N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < pixels; ++j)
      out.X(i, j) = images.data[static_cast<std::size_t>(i) * pixels + j] / 255.0;
    out.X(i, pixels) = 1.0;  // bias coordinate
    double lab = labels.data[i];
    if (lab < 0 || lab > 9)
      throw std::invalid_argument("featurize_mnist: label out of [0, 9] at index " +
                                  std::to_string(i));
    out.y(i) = lab;
  }
  out.provenance = {{"generator", "mnist-featurize/1"},
                    {"pixel_scale", "1/255"},
                    {"bias", 1.0},
                    {"feature_dim", pixels + 1}};
  return out;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_dataset_csv: cannot open " + path);
  const int d = data.dim();
  for (int j = 0; j < d; ++j) out << "f" << j << ",";
  out << "label";
  if (data.outlier_mask) out << ",outlier";
  out << "\n";
  char buf[32];
  for (int i = 0; i < data.size(); ++i) {
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.X(i, j));
      out << buf << ",";
    }
    std::snprintf(buf, sizeof(buf), "%.17g", data.y(i));
    out << buf;
    if (data.outlier_mask) out << "," << int((*data.outlier_mask)[i]);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write_dataset_csv: write failed for " + path);
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_dataset_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("read_dataset_csv: empty file " + path);

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  bool has_mask = !header.empty() && header.back() == "outlier";
  const int d = static_cast<int>(header.size()) - 1 - (has_mask ? 1 : 0);
  if (d < 1) throw std::runtime_error("read_dataset_csv: malformed header in " + path);

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p <= end) {
      const char* comma = std::find(p, end, ',');
      double v;
      auto [ptr, ec] = std::from_chars(p, comma, v);
      if (ec != std::errc())
        throw std::runtime_error("read_dataset_csv: bad number in " + path);
      row.push_back(v);
      if (comma == end) break;
      p = comma + 1;
    }
    if (static_cast<int>(row.size()) != static_cast<int>(header.size()))
      throw std::runtime_error("read_dataset_csv: wrong column count in " + path);
    rows.push_back(std::move(row));
  }

  Dataset out;
  const int N = static_cast<int>(rows.size());
  out.X.resize(N, d);
  out.y.resize(N);
  if (has_mask) out.outlier_mask = std::vector<std::uint8_t>(N, 0);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < d; ++j) out.X(i, j) = rows[i][j];
    out.y(i) = rows[i][d];
    if (has_mask) (*out.outlier_mask)[i] = rows[i][d + 1] != 0.0 ? 1 : 0;
  }
  out.provenance = {{"source", path}};
  return out;
}

}  // namespace trimfit
