#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wsr/barcode.hpp"
#include "wsr/stable_rank.hpp"

namespace wsr {

/// Deterministic RNG: a mersenne twister fed per-stream seeds derived with
/// splitmix64, so sample i always sees the same stream no matter how many
/// samples are drawn before it.
class SplitRng {
 public:
  explicit SplitRng(uint64_t seed) : state_(seed) {}

  /// Independent child stream for the given index.
  SplitRng stream(uint64_t index) const;

  uint64_t next_u64();
  /// Uniform integer in [lo, hi], both inclusive.
  int64_t uniform_int(int64_t lo, int64_t hi);
  /// Uniform real in [lo, hi).
  double uniform_real(double lo, double hi);

 private:
  uint64_t state_;
};

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;  // row-major intensities in [0,255]

  uint8_t at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
  uint8_t& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
  GrayImage transposed() const;
};

GrayImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const GrayImage& image);

/// Undirected graph with real vertex values; an edge's value is the max of
/// its endpoint values.
struct FilteredGraph {
  std::vector<double> vertex_values;
  std::vector<std::pair<int, int>> edges;
};

FilteredGraph read_filtered_graph(const std::string& vertex_csv_path,
                                  const std::string& edge_csv_path);

enum class Label : uint8_t { A, B };

struct ImageSample {
  std::string id;
  Label label;
  GrayImage image;
};

struct ImageDataset {
  std::vector<ImageSample> samples;
};

/// Synthetic datasets: 128x128 canvas, background 0, one 8x8 block of high
/// intensity plus 2x2 noise blocks placed uniformly without overlap.
/// Dataset 1: high block in [245,255] (A) vs [200,210] (B); noise count in
/// [50,100], noise intensity in [1,10], identically for both classes.
ImageDataset gen_dataset1(int n_per_class, uint64_t seed);
/// Dataset 2: high block in [100,255] for both classes; noise count in
/// [20,30] (A) vs [120,130] (B), noise intensity in [1,10].
ImageDataset gen_dataset2(int n_per_class, uint64_t seed);

/// H0 of the super-level set filtration (4-connectivity, elder rule, equal
/// intensities processed in row-major order). Births and deaths are reported
/// on the transformed scale 255 - intensity; the surviving component's death
/// is capped at 255 - min(pixel), and zero-length features are dropped.
Barcode h0_superlevel(const GrayImage& image);

/// H0 of the sub-level set filtration of a filtered graph, one infinite bar
/// per final connected component.
Barcode h0_sublevel_graph(const FilteredGraph& graph);

struct LabeledBarcodes {
  std::vector<std::string> ids;
  std::vector<Label> labels;
  std::vector<Barcode> barcodes;
};

LabeledBarcodes barcodes_of(const ImageDataset& dataset);

/// Leave-one-out k-nearest-neighbour error rate under the interleaving
/// distance. Distance ties break toward the smaller sample id, vote ties
/// toward label A.
double knn_loocv(const LabeledBarcodes& data, const MetricChoice& metric, int k,
                 int jobs = 1);

/// Pairwise interleaving distances, entries evaluated concurrently when
/// jobs > 1; output independent of jobs.
std::vector<std::vector<double>> interleaving_distance_matrix(
    const std::vector<Barcode>& barcodes, const MetricChoice& metric, int jobs = 1);

/// Writes the sample images as PGM plus a manifest.json (ids, labels, file
/// paths, seed) into dir; returns the manifest path.
std::string write_image_dataset(const ImageDataset& dataset, const std::string& dir,
                                uint64_t seed, int dataset_id);

/// Loads a manifest; referenced files may be .pgm images (H0 barcodes are
/// computed) or precomputed barcode .csv files.
LabeledBarcodes load_manifest(const std::string& manifest_path);

}  // namespace wsr
