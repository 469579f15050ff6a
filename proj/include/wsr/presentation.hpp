#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wsr/barcode.hpp"
#include "wsr/permutation.hpp"

namespace wsr {

/// A morphism between barcodes described on generators: images[i] lists the
/// codomain generators carrying a nonzero F2 coefficient in the image of the
/// i-th domain generator.
struct GeneratorMap {
  Barcode domain;
  Barcode codomain;
  std::vector<std::vector<int>> images;
};

class PresentationMatrix;
struct BarToBarResult;
BarToBarResult bar_to_bar(const PresentationMatrix& m);

enum class ColumnTag { kGenerator, kRelation };  // Z-column vs R-column

struct ColumnLabel {
  ColumnTag tag;
  int index;       // original generator index: z_i or r_j
  double degree;   // a_i^z for Z columns, b_j^x for R columns
  int paired_row;  // sorted row position the R column points at; -1 for Z

  friend bool operator==(const ColumnLabel&, const ColumnLabel&) = default;
};

/// Degree-sorted presentation matrix of a monomorphism over F2: n rows, one
/// per codomain generator, and m + n columns (m generator columns carrying
/// the images, n relation columns forming a permutation block). Columns are
/// bit-packed over rows so column operations are word XORs.
class PresentationMatrix {
 public:
  /// build_presentation: sorts rows/columns non-decreasingly by degree with
  /// tie-break (degree, relation-before-generator, original index) and
  /// validates that every generator column is nonzero, supported on rows
  /// alive at its degree, and consistent with the domain bar's endpoint.
  static PresentationMatrix mono_presentation(const GeneratorMap& f);

  int rows() const { return static_cast<int>(row_degrees_.size()); }
  int cols() const { return static_cast<int>(labels_.size()); }
  bool entry(int row, int col) const;
  const ColumnLabel& column_label(int col) const { return labels_[col]; }
  double row_degree(int row) const { return row_degrees_[row]; }
  int row_original_index(int row) const { return row_indices_[row]; }

  bool column_is_zero(int col) const;
  /// Row position of the lowest nonzero entry, -1 for a zero column.
  int low(int col) const;
  /// Left-to-right column operation: dst ^= src, requires src < dst.
  void add_column(int src, int dst);

  /// Plaintext grid with the generator labels; relation-column zeros print
  /// as '.'.
  std::string dump() const;

  friend bool operator==(const PresentationMatrix&, const PresentationMatrix&) = default;

 private:
  friend BarToBarResult bar_to_bar(const PresentationMatrix& m);

  std::vector<std::vector<uint64_t>> columns_;  // bit-packed row entries
  std::vector<ColumnLabel> labels_;
  std::vector<double> row_degrees_;
  std::vector<int> row_indices_;
};

struct Reduction {
  PresentationMatrix matrix;
  Permutation sigma;                 // k-th nonzero column -> row of its low
  std::vector<int> nonzero_columns;  // positions, left to right
};

/// Complete left-to-right column reduction (leftmost-first order); the
/// resulting sigma does not depend on the order of valid operations.
Reduction reduce_columns(const PresentationMatrix& m);

/// Result of the bar-to-bar construction: pairs every generator column with
/// its rightmost matched relation column and keeps exactly that row's entry.
/// bar_to_bar throws if some generator column cannot be matched (the matrix
/// does not present a monomorphism).
struct BarToBarResult {
  PresentationMatrix partially_reduced;  // M_f*
  PresentationMatrix bar_to_bar;         // M_b
  std::vector<int> rmax;                 // per column: matched relation column, -1 if n/a
};

/// Bars K(starts[sigma(k)], degrees[k]) for each k, dropping zero-length
/// pairs; throws when some start exceeds its paired degree.
Barcode cokernel_barcode(const Permutation& sigma, const std::vector<double>& starts,
                         const std::vector<double>& degrees);

/// Reduce and read the cokernel off a presentation matrix.
Barcode cokernel_of(const PresentationMatrix& m);

/// Copresentation of an epimorphism, realized as the presentation of the
/// time-reversed monomorphism: degrees are reflected through T = max finite
/// degree, rows/columns transpose, and reduction by top-to-bottom row
/// operations becomes the usual column reduction of the mirror.
class CopresentationMatrix {
 public:
  static CopresentationMatrix epi_copresentation(const GeneratorMap& f);

  const PresentationMatrix& mirror() const { return mirror_; }
  double reflection_degree() const { return reflection_; }
  std::string dump() const { return mirror_.dump(); }

 private:
  PresentationMatrix mirror_;
  double reflection_ = 0.0;
  friend CopresentationMatrix epi_bar_to_bar(const CopresentationMatrix&);
};

struct EpiReduction {
  PresentationMatrix reduced_mirror;
  Permutation sigma;
  Barcode kernel;
};

EpiReduction epi_dual_reduce(const CopresentationMatrix& m);
CopresentationMatrix epi_bar_to_bar(const CopresentationMatrix& m);

/// Bundled demo monomorphism (3 domain bars, 6 codomain bars) used by the
/// `reduce --demo` subcommand and the documentation tests.
GeneratorMap demo_monomorphism();

}  // namespace wsr
