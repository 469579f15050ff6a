#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wsr/norms.hpp"

namespace wsr {

/// Half-open interval [birth, death) with 0 <= birth < death <= inf.
/// Degenerate bars (death - birth <= 1e-12) are rejected at construction.
struct Bar {
  double birth;
  double death;

  Bar(double birth, double death);

  double length() const { return death - birth; }
  bool is_infinite() const { return is_inf(death); }

  friend bool operator==(const Bar&, const Bar&) = default;
};

/// A finite multiset of bars; the persistence module up to isomorphism.
class Barcode {
 public:
  Barcode() = default;
  explicit Barcode(std::vector<Bar> bars) : bars_(std::move(bars)) {}

  void add(double birth, double death) { bars_.emplace_back(birth, death); }
  size_t rank() const { return bars_.size(); }
  bool empty() const { return bars_.empty(); }
  const std::vector<Bar>& bars() const { return bars_; }

  size_t infinite_count() const;
  std::vector<double> lengths() const;

  /// Dimension of the module at filtration value t (counts bars whose
  /// half-open support contains t).
  size_t dimension_at(double t) const;

  bool same_multiset(const Barcode& other, double tol = 0.0) const;

 private:
  std::vector<Bar> bars_;
};

/// p-norm of the vector of bar lengths.
double barcode_p_norm(const Barcode& barcode, double p);

// CSV format: one "birth,death" pair per line, literal `inf` for infinite
// deaths, optional header line.
Barcode read_barcode_csv(std::istream& in);
Barcode read_barcode_csv_file(const std::string& path);
void write_barcode_csv(std::ostream& out, const Barcode& barcode);
void write_barcode_csv_file(const std::string& path, const Barcode& barcode);

/// Full-precision decimal form that parses back to the same double.
std::string format_double(double value);
double parse_double(const std::string& text);

}  // namespace wsr
