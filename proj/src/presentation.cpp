#include "wsr/presentation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace wsr {

namespace {
constexpr double kDegreeTol = 1e-12;

int sort_key_tag(ColumnTag tag) { return tag == ColumnTag::kRelation ? 0 : 1; }
}  // namespace

bool PresentationMatrix::entry(int row, int col) const {
  return (columns_[col][row >> 6] >> (row & 63)) & 1u;
}

bool PresentationMatrix::column_is_zero(int col) const {
  for (uint64_t w : columns_[col])
    if (w) return false;
  return true;
}

int PresentationMatrix::low(int col) const {
  const auto& words = columns_[col];
  for (int w = static_cast<int>(words.size()) - 1; w >= 0; --w) {
    if (words[w]) return w * 64 + 63 - std::countl_zero(words[w]);
  }
  return -1;
}

void PresentationMatrix::add_column(int src, int dst) {
  if (src >= dst) throw std::logic_error("add_column: only left-to-right operations");
  for (size_t w = 0; w < columns_[dst].size(); ++w) columns_[dst][w] ^= columns_[src][w];
}

PresentationMatrix PresentationMatrix::mono_presentation(const GeneratorMap& f) {
  const auto& zbars = f.domain.bars();
  const auto& xbars = f.codomain.bars();
  if (f.images.size() != zbars.size())
    throw std::invalid_argument("presentation: one image per domain generator required");
  const int n = static_cast<int>(xbars.size());
  const int m = static_cast<int>(zbars.size());

  std::vector<int> row_order(n);
  std::iota(row_order.begin(), row_order.end(), 0);
  std::stable_sort(row_order.begin(), row_order.end(), [&](int a, int b) {
    return xbars[a].birth < xbars[b].birth;
  });
  std::vector<int> row_position(n);
  for (int r = 0; r < n; ++r) row_position[row_order[r]] = r;

  std::vector<ColumnLabel> labels;
  labels.reserve(m + n);
  for (int i = 0; i < m; ++i)
    labels.push_back({ColumnTag::kGenerator, i, zbars[i].birth, -1});
  for (int j = 0; j < n; ++j)
    labels.push_back({ColumnTag::kRelation, j, xbars[j].death, row_position[j]});
  std::stable_sort(labels.begin(), labels.end(), [](const ColumnLabel& a, const ColumnLabel& b) {
    if (a.degree != b.degree) return a.degree < b.degree;
    if (a.tag != b.tag) return sort_key_tag(a.tag) < sort_key_tag(b.tag);
    return a.index < b.index;
  });

  PresentationMatrix out;
  out.labels_ = std::move(labels);
  out.row_degrees_.resize(n);
  out.row_indices_.resize(n);
  for (int r = 0; r < n; ++r) {
    out.row_degrees_[r] = xbars[row_order[r]].birth;
    out.row_indices_[r] = row_order[r];
  }
  const size_t words = (n + 63) / 64;
  out.columns_.assign(m + n, std::vector<uint64_t>(words, 0));

  for (int c = 0; c < out.cols(); ++c) {
    const ColumnLabel& label = out.labels_[c];
    if (label.tag == ColumnTag::kRelation) {
      out.columns_[c][label.paired_row >> 6] |= uint64_t{1} << (label.paired_row & 63);
      continue;
    }
    const int i = label.index;
    const Bar& z = zbars[i];
    if (f.images[i].empty())
      throw std::invalid_argument("presentation: zero image column (not a monomorphism)");
    double max_death = 0.0;
    std::vector<char> seen(n, 0);
    for (int j : f.images[i]) {
      if (j < 0 || j >= n)
        throw std::invalid_argument("presentation: image index out of range");
      if (seen[j]) throw std::invalid_argument("presentation: repeated image index");
      seen[j] = 1;
      const Bar& x = xbars[j];
      if (!(x.birth <= z.birth && z.birth < x.death))
        throw std::invalid_argument(
            "presentation: image touches a generator not alive at the domain degree");
      max_death = std::max(max_death, x.death);
      const int r = row_position[j];
      out.columns_[c][r >> 6] |= uint64_t{1} << (r & 63);
    }
    const bool deaths_match = is_inf(z.death)
                                  ? is_inf(max_death)
                                  : std::abs(z.death - max_death) <= kDegreeTol;
    if (!deaths_match)
      throw std::invalid_argument(
          "presentation: domain endpoint inconsistent with the image support");
  }
  return out;
}

std::string PresentationMatrix::dump() const {
  std::vector<std::string> col_names(cols());
  size_t width = 1;
  for (int c = 0; c < cols(); ++c) {
    const ColumnLabel& l = labels_[c];
    col_names[c] = (l.tag == ColumnTag::kGenerator ? "z" : "r") + std::to_string(l.index + 1);
    width = std::max(width, col_names[c].size());
  }
  std::vector<std::string> row_names(rows());
  size_t row_width = 1;
  for (int r = 0; r < rows(); ++r) {
    row_names[r] = "x" + std::to_string(row_indices_[r] + 1);
    row_width = std::max(row_width, row_names[r].size());
  }
  auto pad = [](const std::string& s, size_t w) {
    return std::string(w - s.size(), ' ') + s;
  };
  std::ostringstream out;
  out << std::string(row_width + 2, ' ');
  for (int c = 0; c < cols(); ++c) out << ' ' << pad(col_names[c], width);
  out << '\n';
  for (int r = 0; r < rows(); ++r) {
    out << pad(row_names[r], row_width) << " |";
    for (int c = 0; c < cols(); ++c) {
      std::string cell;
      if (entry(r, c))
        cell = "1";
      else
        cell = labels_[c].tag == ColumnTag::kGenerator ? "0" : ".";
      out << ' ' << pad(cell, width);
    }
    out << '\n';
  }
  return out.str();
}

Reduction reduce_columns(const PresentationMatrix& m) {
  Reduction out{m, {}, {}};
  PresentationMatrix& mat = out.matrix;
  std::vector<int> low_to_col(mat.rows(), -1);
  for (int c = 0; c < mat.cols(); ++c) {
    int l = mat.low(c);
    while (l != -1 && low_to_col[l] != -1) {
      mat.add_column(low_to_col[l], c);
      l = mat.low(c);
    }
    if (l != -1) low_to_col[l] = c;
  }
  std::vector<int> sigma;
  for (int c = 0; c < mat.cols(); ++c) {
    if (mat.column_is_zero(c)) continue;
    out.nonzero_columns.push_back(c);
    sigma.push_back(mat.low(c));
  }
  out.sigma = Permutation(std::move(sigma));
  return out;
}

BarToBarResult bar_to_bar(const PresentationMatrix& m) {
  BarToBarResult out{m, m, std::vector<int>(m.cols(), -1)};
  PresentationMatrix& star = out.partially_reduced;
  PresentationMatrix& btb = out.bar_to_bar;

  std::vector<int> zcols, rcols;
  for (int c = 0; c < m.cols(); ++c) {
    if (m.column_label(c).tag == ColumnTag::kGenerator)
      zcols.push_back(c);
    else
      rcols.push_back(c);
  }
  for (int c : zcols)
    for (auto& w : btb.columns_[c]) w = 0;

  for (auto it = rcols.rbegin(); it != rcols.rend(); ++it) {
    const int r = *it;
    const int x = m.column_label(r).paired_row;
    int z = -1;
    for (int c : zcols) {
      if (out.rmax[c] == -1 && star.entry(x, c)) {
        z = c;
        break;
      }
    }
    if (z == -1) continue;
    btb.columns_[z][x >> 6] |= uint64_t{1} << (x & 63);
    out.rmax[z] = r;
    for (int zp : zcols) {
      if (zp <= z || !star.entry(x, zp)) continue;
      star.add_column(z, zp);
      for (int rp : rcols) {
        if (rp >= zp) break;
        if (star.entry(m.column_label(rp).paired_row, zp)) star.add_column(rp, zp);
      }
    }
  }
  for (int c : zcols) {
    if (out.rmax[c] == -1)
      throw std::invalid_argument(
          "bar_to_bar: unmatched generator column; input does not present a monomorphism");
  }
  return out;
}

Barcode cokernel_barcode(const Permutation& sigma, const std::vector<double>& starts,
                         const std::vector<double>& degrees) {
  const size_t n = starts.size();
  if (degrees.size() != n || static_cast<size_t>(sigma.size()) != n)
    throw std::invalid_argument("cokernel_barcode: size mismatch");
  if (!std::is_sorted(starts.begin(), starts.end()) ||
      !std::is_sorted(degrees.begin(), degrees.end()))
    throw std::invalid_argument("cokernel_barcode: inputs must be sorted");
  Barcode out;
  for (size_t k = 0; k < n; ++k) {
    const double start = starts[sigma(static_cast<int>(k))];
    const double degree = degrees[k];
    if (is_inf(degree)) {
      out.add(start, kInf);
      continue;
    }
    if (start > degree + kDegreeTol)
      throw std::invalid_argument("cokernel_barcode: start exceeds paired degree");
    if (degree - start <= kDegreeTol) continue;  // zero-length pair
    out.add(start, degree);
  }
  return out;
}

Barcode cokernel_of(const PresentationMatrix& m) {
  Reduction red = reduce_columns(m);
  std::vector<double> degrees;
  degrees.reserve(red.nonzero_columns.size());
  for (int c : red.nonzero_columns) degrees.push_back(red.matrix.column_label(c).degree);
  std::vector<double> starts(m.rows());
  for (int r = 0; r < m.rows(); ++r) starts[r] = m.row_degree(r);
  return cokernel_barcode(red.sigma, starts, degrees);
}

namespace {

Barcode mirror_barcode(const Barcode& barcode, double reflection) {
  Barcode out;
  for (const Bar& b : barcode.bars()) out.add(reflection - b.death, reflection - b.birth);
  return out;
}

}  // namespace

CopresentationMatrix CopresentationMatrix::epi_copresentation(const GeneratorMap& f) {
  for (const Bar& b : f.domain.bars())
    if (b.is_infinite())
      throw std::invalid_argument("epi copresentation: infinite bars not supported");
  for (const Bar& b : f.codomain.bars())
    if (b.is_infinite())
      throw std::invalid_argument("epi copresentation: infinite bars not supported");
  double reflection = 0.0;
  for (const Bar& b : f.domain.bars()) reflection = std::max(reflection, b.death);
  for (const Bar& b : f.codomain.bars()) reflection = std::max(reflection, b.death);

  GeneratorMap mirror;
  mirror.domain = mirror_barcode(f.codomain, reflection);
  mirror.codomain = mirror_barcode(f.domain, reflection);
  mirror.images.assign(f.codomain.rank(), {});
  for (size_t i = 0; i < f.images.size(); ++i) {
    for (int j : f.images[i]) {
      if (j < 0 || j >= static_cast<int>(f.codomain.rank()))
        throw std::invalid_argument("epi copresentation: image index out of range");
      mirror.images[j].push_back(static_cast<int>(i));
    }
  }
  CopresentationMatrix out;
  out.reflection_ = reflection;
  try {
    out.mirror_ = PresentationMatrix::mono_presentation(mirror);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("epi copresentation (via time reversal): ") +
                                e.what());
  }
  return out;
}

EpiReduction epi_dual_reduce(const CopresentationMatrix& m) {
  Reduction red = reduce_columns(m.mirror());
  Barcode kernel = mirror_barcode(cokernel_of(m.mirror()), m.reflection_degree());
  return EpiReduction{std::move(red.matrix), std::move(red.sigma), std::move(kernel)};
}

CopresentationMatrix epi_bar_to_bar(const CopresentationMatrix& m) {
  BarToBarResult r = bar_to_bar(m.mirror());
  CopresentationMatrix out;
  out.mirror_ = std::move(r.bar_to_bar);
  out.reflection_ = m.reflection_degree();
  return out;
}

}  // namespace wsr
