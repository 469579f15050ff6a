#include "wsr/data_harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace wsr {

namespace {

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

void parallel_for(size_t count, int jobs, const std::function<void(size_t)>& body) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || count < 2) {
    for (size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> workers;
  const size_t chunk = (count + jobs - 1) / jobs;
  for (int w = 0; w < jobs; ++w) {
    const size_t begin = w * chunk;
    const size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&body, begin, end] {
      for (size_t i = begin; i < end; ++i) body(i);
    });
  }
  for (auto& t : workers) t.join();
}

}  // namespace

SplitRng SplitRng::stream(uint64_t index) const {
  uint64_t s = state_;
  uint64_t mixed = splitmix64(s);
  uint64_t child = mixed ^ (0x5851f42d4c957f2dull * (index + 1));
  return SplitRng(splitmix64(child));
}

uint64_t SplitRng::next_u64() { return splitmix64(state_); }

int64_t SplitRng::uniform_int(int64_t lo, int64_t hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
  const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
  // Rejection sampling below the largest multiple of span: unbiased.
  const uint64_t limit = std::numeric_limits<uint64_t>::max() -
                         std::numeric_limits<uint64_t>::max() % span;
  uint64_t v = next_u64();
  while (v >= limit) v = next_u64();
  return lo + static_cast<int64_t>(v % span);
}

double SplitRng::uniform_real(double lo, double hi) {
  const double unit = (next_u64() >> 11) * 0x1.0p-53;
  return lo + unit * (hi - lo);
}

GrayImage GrayImage::transposed() const {
  GrayImage out;
  out.width = height;
  out.height = width;
  out.pixels.resize(pixels.size());
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) out.at(y, x) = at(x, y);
  return out;
}

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open image: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw std::invalid_argument("expected binary PGM (P5): " + path);
  auto next_int = [&in, &path]() {
    // Skip whitespace and '#' comment lines.
    int c = in.get();
    while (c != EOF && (std::isspace(c) || c == '#')) {
      if (c == '#')
        while (c != EOF && c != '\n') c = in.get();
      c = in.get();
    }
    std::string tok;
    while (c != EOF && !std::isspace(c)) {
      tok.push_back(static_cast<char>(c));
      c = in.get();
    }
    if (tok.empty()) throw std::invalid_argument("truncated PGM header: " + path);
    return std::stoi(tok);
  };
  GrayImage img;
  img.width = next_int();
  img.height = next_int();
  const int maxval = next_int();
  if (maxval != 255) throw std::invalid_argument("PGM maxval must be 255: " + path);
  img.pixels.resize(static_cast<size_t>(img.width) * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()), img.pixels.size());
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
    throw std::invalid_argument("truncated PGM payload: " + path);
  return img;
}

void write_pgm(const std::string& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image: " + path);
  out << "P5\n" << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
}

FilteredGraph read_filtered_graph(const std::string& vertex_csv_path,
                                  const std::string& edge_csv_path) {
  FilteredGraph g;
  std::ifstream vin(vertex_csv_path);
  if (!vin) throw std::invalid_argument("cannot open vertex file: " + vertex_csv_path);
  std::string line;
  std::vector<std::pair<int, double>> entries;
  size_t lineno = 0;
  while (std::getline(vin, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("vertex CSV: expected 'id,value'");
    std::string lhs = line.substr(0, comma);
    if (lineno == 1 && lhs.find_first_not_of("0123456789 \t") != std::string::npos)
      continue;  // header
    entries.emplace_back(std::stoi(lhs), parse_double(line.substr(comma + 1)));
  }
  // Ids need not be contiguous; remap them to dense indices in file order.
  std::map<int, int> index_of;
  for (auto& [id, value] : entries) {
    if (id < 0) throw std::invalid_argument("vertex CSV: negative id");
    if (!index_of.emplace(id, static_cast<int>(g.vertex_values.size())).second)
      throw std::invalid_argument("vertex CSV: duplicate id " + std::to_string(id));
    g.vertex_values.push_back(value);
  }

  std::ifstream ein(edge_csv_path);
  if (!ein) throw std::invalid_argument("cannot open edge file: " + edge_csv_path);
  lineno = 0;
  while (std::getline(ein, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("edge CSV: expected 'u,v'");
    std::string lhs = line.substr(0, comma);
    if (lineno == 1 && lhs.find_first_not_of("0123456789 \t") != std::string::npos)
      continue;
    auto u = index_of.find(std::stoi(lhs));
    auto v = index_of.find(std::stoi(line.substr(comma + 1)));
    if (u == index_of.end() || v == index_of.end())
      throw std::invalid_argument("edge CSV: unknown vertex id");
    g.edges.emplace_back(u->second, v->second);
  }
  return g;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
};

constexpr int kCanvas = 128;
constexpr int kHighBlock = 8;
constexpr int kNoiseBlock = 2;

struct BlockSpec {
  int x, y, size;
  uint8_t intensity;
};

// Blocks must keep one background pixel between them, so every block is its
// own superlevel component.
bool blocks_conflict(const BlockSpec& a, const BlockSpec& b) {
  return a.x < b.x + b.size + 1 && b.x < a.x + a.size + 1 && a.y < b.y + b.size + 1 &&
         b.y < a.y + a.size + 1;
}

GrayImage render_blocks(const std::vector<BlockSpec>& blocks) {
  GrayImage img;
  img.width = img.height = kCanvas;
  img.pixels.assign(static_cast<size_t>(kCanvas) * kCanvas, 0);
  for (const BlockSpec& b : blocks)
    for (int dy = 0; dy < b.size; ++dy)
      for (int dx = 0; dx < b.size; ++dx) img.at(b.x + dx, b.y + dy) = b.intensity;
  return img;
}

// One sample: a high block then `noise_count` noise blocks, placed uniformly
// and rejection-sampled until no block shares a pixel with an earlier one.
GrayImage gen_image(SplitRng rng, int high_lo, int high_hi, int count_lo, int count_hi) {
  std::vector<BlockSpec> blocks;
  BlockSpec high{0, 0, kHighBlock, 0};
  high.intensity = static_cast<uint8_t>(rng.uniform_int(high_lo, high_hi));
  high.x = static_cast<int>(rng.uniform_int(0, kCanvas - kHighBlock));
  high.y = static_cast<int>(rng.uniform_int(0, kCanvas - kHighBlock));
  blocks.push_back(high);
  const int noise_count = static_cast<int>(rng.uniform_int(count_lo, count_hi));
  for (int i = 0; i < noise_count; ++i) {
    BlockSpec b{0, 0, kNoiseBlock, 0};
    b.intensity = static_cast<uint8_t>(rng.uniform_int(1, 10));
    while (true) {
      b.x = static_cast<int>(rng.uniform_int(0, kCanvas - kNoiseBlock));
      b.y = static_cast<int>(rng.uniform_int(0, kCanvas - kNoiseBlock));
      bool clear = true;
      for (const BlockSpec& other : blocks)
        if (blocks_conflict(b, other)) {
          clear = false;
          break;
        }
      if (clear) break;
    }
    blocks.push_back(b);
  }
  return render_blocks(blocks);
}

ImageDataset gen_dataset(int n_per_class, uint64_t seed, int high_a_lo, int high_a_hi,
                         int high_b_lo, int high_b_hi, int count_a_lo, int count_a_hi,
                         int count_b_lo, int count_b_hi) {
  if (n_per_class < 1) throw std::invalid_argument("gen_dataset: n_per_class must be >= 1");
  SplitRng root(seed);
  ImageDataset out;
  for (int i = 0; i < n_per_class; ++i) {
    ImageSample s;
    s.id = "A" + std::to_string(i);
    s.label = Label::A;
    s.image = gen_image(root.stream(2 * static_cast<uint64_t>(i)), high_a_lo, high_a_hi,
                        count_a_lo, count_a_hi);
    out.samples.push_back(std::move(s));
  }
  for (int i = 0; i < n_per_class; ++i) {
    ImageSample s;
    s.id = "B" + std::to_string(i);
    s.label = Label::B;
    s.image = gen_image(root.stream(2 * static_cast<uint64_t>(i) + 1), high_b_lo,
                        high_b_hi, count_b_lo, count_b_hi);
    out.samples.push_back(std::move(s));
  }
  return out;
}

}  // namespace

ImageDataset gen_dataset1(int n_per_class, uint64_t seed) {
  return gen_dataset(n_per_class, seed, 245, 255, 200, 210, 50, 100, 50, 100);
}

ImageDataset gen_dataset2(int n_per_class, uint64_t seed) {
  return gen_dataset(n_per_class, seed, 100, 255, 100, 255, 20, 30, 120, 130);
}

Barcode h0_superlevel(const GrayImage& image) {
  const int w = image.width, h = image.height;
  const size_t n = static_cast<size_t>(w) * h;
  if (n == 0) return {};
  // Pixels in decreasing intensity, row-major within equal intensity.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return image.pixels[a] > image.pixels[b];
  });
  UnionFind uf(n);
  std::vector<int> birth(n, -1);       // birth intensity of each component root
  std::vector<int> birth_pixel(n, 0);  // row-major tie-break between equal births
  std::vector<char> present(n, 0);
  Barcode out;
  uint8_t min_pixel = 255;
  for (uint8_t p : image.pixels) min_pixel = std::min(min_pixel, p);

  for (int pix : order) {
    const int value = image.pixels[pix];
    present[pix] = 1;
    birth[pix] = value;
    birth_pixel[pix] = pix;
    const int x = pix % w, y = pix / w;
    const int neighbors[4] = {x > 0 ? pix - 1 : -1, x + 1 < w ? pix + 1 : -1,
                              y > 0 ? pix - w : -1, y + 1 < h ? pix + w : -1};
    for (int nb : neighbors) {
      if (nb < 0 || !present[nb]) continue;
      int ra = uf.find(pix), rb = uf.find(nb);
      if (ra == rb) continue;
      // Elder rule: the component with the higher (earlier) birth survives;
      // equal births fall back to the smaller row-major birth pixel.
      int elder = ra, younger = rb;
      if (birth[rb] > birth[ra] ||
          (birth[rb] == birth[ra] && birth_pixel[rb] < birth_pixel[ra]))
        std::swap(elder, younger);
      if (birth[younger] > value) {
        out.add(255.0 - birth[younger], 255.0 - value);
      }
      uf.parent[younger] = elder;
    }
  }
  // Surviving components: death capped at the transformed minimum.
  const double cap = 255.0 - min_pixel;
  for (size_t i = 0; i < n; ++i) {
    if (uf.find(static_cast<int>(i)) != static_cast<int>(i)) continue;
    const double b = 255.0 - birth[i];
    if (cap > b) out.add(b, cap);
  }
  return out;
}

Barcode h0_sublevel_graph(const FilteredGraph& graph) {
  const size_t n = graph.vertex_values.size();
  struct Event {
    double value;
    bool is_edge;
    int index;
  };
  std::vector<Event> events;
  events.reserve(n + graph.edges.size());
  for (size_t v = 0; v < n; ++v)
    events.push_back({graph.vertex_values[v], false, static_cast<int>(v)});
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    const auto& [u, v] = graph.edges[e];
    events.push_back({std::max(graph.vertex_values[u], graph.vertex_values[v]), true,
                      static_cast<int>(e)});
  }
  // Vertices precede edges at equal value so endpoints exist when joined.
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.is_edge < b.is_edge;
  });
  UnionFind uf(n);
  std::vector<double> birth(n, 0.0);
  std::vector<char> present(n, 0);
  Barcode out;
  for (const Event& ev : events) {
    if (!ev.is_edge) {
      present[ev.index] = 1;
      birth[ev.index] = ev.value;
      continue;
    }
    const auto& [u, v] = graph.edges[ev.index];
    if (!present[u] || !present[v])
      throw std::invalid_argument("h0_sublevel_graph: edge below an endpoint value");
    int ra = uf.find(u), rb = uf.find(v);
    if (ra == rb) continue;
    int elder = ra, younger = rb;
    if (birth[rb] < birth[ra] || (birth[rb] == birth[ra] && rb < ra))
      std::swap(elder, younger);
    if (ev.value > birth[younger]) out.add(birth[younger], ev.value);
    uf.parent[younger] = elder;
  }
  for (size_t v = 0; v < n; ++v)
    if (uf.find(static_cast<int>(v)) == static_cast<int>(v)) out.add(birth[v], kInf);
  return out;
}

LabeledBarcodes barcodes_of(const ImageDataset& dataset) {
  LabeledBarcodes out;
  for (const ImageSample& s : dataset.samples) {
    out.ids.push_back(s.id);
    out.labels.push_back(s.label);
    out.barcodes.push_back(h0_superlevel(s.image));
  }
  return out;
}

std::vector<std::vector<double>> interleaving_distance_matrix(
    const std::vector<Barcode>& barcodes, const MetricChoice& metric, int jobs) {
  const size_t n = barcodes.size();
  std::vector<LifetimeProfile> profiles(n);
  parallel_for(n, jobs, [&](size_t i) { profiles[i] = lifetime_profile(barcodes[i], metric); });
  std::vector<std::vector<double>> matrix(n, std::vector<double>(n, 0.0));
  parallel_for(n, jobs, [&](size_t i) {
    for (size_t j = i + 1; j < n; ++j)
      matrix[i][j] = interleaving_from_profiles(profiles[i], profiles[j]);
  });
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < i; ++j) matrix[i][j] = matrix[j][i];
  return matrix;
}

std::string write_image_dataset(const ImageDataset& dataset, const std::string& dir,
                                uint64_t seed, int dataset_id) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nlohmann::json manifest;
  manifest["dataset"] = dataset_id;
  manifest["seed"] = seed;
  nlohmann::json samples = nlohmann::json::array();
  for (const ImageSample& s : dataset.samples) {
    const std::string file = s.id + ".pgm";
    write_pgm((fs::path(dir) / file).string(), s.image);
    samples.push_back({{"id", s.id},
                       {"label", s.label == Label::A ? "A" : "B"},
                       {"file", file}});
  }
  manifest["samples"] = samples;
  const std::string path = (fs::path(dir) / "manifest.json").string();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << manifest.dump(2) << "\n";
  return path;
}

LabeledBarcodes load_manifest(const std::string& manifest_path) {
  namespace fs = std::filesystem;
  std::ifstream in(manifest_path);
  if (!in) throw std::invalid_argument("cannot open manifest: " + manifest_path);
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("manifest JSON: ") + e.what());
  }
  const fs::path base = fs::path(manifest_path).parent_path();
  LabeledBarcodes out;
  for (const auto& s : manifest.at("samples")) {
    out.ids.push_back(s.at("id").get<std::string>());
    const std::string label = s.at("label").get<std::string>();
    if (label != "A" && label != "B")
      throw std::invalid_argument("manifest: label must be A or B");
    out.labels.push_back(label == "A" ? Label::A : Label::B);
    const fs::path file = base / s.at("file").get<std::string>();
    if (file.extension() == ".pgm")
      out.barcodes.push_back(h0_superlevel(read_pgm(file.string())));
    else
      out.barcodes.push_back(read_barcode_csv_file(file.string()));
  }
  return out;
}

double knn_loocv(const LabeledBarcodes& data, const MetricChoice& metric, int k, int jobs) {
  const size_t n = data.barcodes.size();
  if (k < 1 || static_cast<size_t>(k) >= n)
    throw std::invalid_argument("knn_loocv: need 1 <= k < number of samples");
  auto matrix = interleaving_distance_matrix(data.barcodes, metric, jobs);
  size_t errors = 0;
  for (size_t i = 0; i < n; ++i) {
    std::vector<size_t> others;
    for (size_t j = 0; j < n; ++j)
      if (j != i) others.push_back(j);
    std::sort(others.begin(), others.end(), [&](size_t a, size_t b) {
      if (matrix[i][a] != matrix[i][b]) return matrix[i][a] < matrix[i][b];
      return data.ids[a] < data.ids[b];  // distance ties break by sample id
    });
    int votes_a = 0;
    for (int r = 0; r < k; ++r) votes_a += data.labels[others[r]] == Label::A;
    const Label predicted = (2 * votes_a >= k) ? Label::A : Label::B;  // tie goes to A
    errors += predicted != data.labels[i];
  }
  return static_cast<double>(errors) / static_cast<double>(n);
}

}  // namespace wsr
