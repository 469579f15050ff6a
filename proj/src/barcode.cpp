#include "wsr/barcode.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wsr {

namespace {
constexpr double kConstructionTol = 1e-12;
}

Bar::Bar(double birth, double death) : birth(birth), death(death) {
  if (!(birth >= 0.0) || std::isnan(birth))
    throw std::invalid_argument("Bar: birth must be >= 0");
  if (std::isnan(death)) throw std::invalid_argument("Bar: death is NaN");
  if (!is_inf(death) && death - birth <= kConstructionTol)
    throw std::invalid_argument("Bar: death must exceed birth");
}

size_t Barcode::infinite_count() const {
  size_t n = 0;
  for (const Bar& b : bars_) n += b.is_infinite();
  return n;
}

std::vector<double> Barcode::lengths() const {
  std::vector<double> out;
  out.reserve(bars_.size());
  for (const Bar& b : bars_) out.push_back(b.length());
  return out;
}

size_t Barcode::dimension_at(double t) const {
  size_t n = 0;
  for (const Bar& b : bars_) n += (b.birth <= t && t < b.death);
  return n;
}

bool Barcode::same_multiset(const Barcode& other, double tol) const {
  if (bars_.size() != other.bars_.size()) return false;
  auto key = [](const Bar& a, const Bar& b) {
    return a.birth != b.birth ? a.birth < b.birth : a.death < b.death;
  };
  std::vector<Bar> lhs = bars_, rhs = other.bars_;
  std::sort(lhs.begin(), lhs.end(), key);
  std::sort(rhs.begin(), rhs.end(), key);
  for (size_t i = 0; i < lhs.size(); ++i) {
    if (std::abs(lhs[i].birth - rhs[i].birth) > tol) return false;
    bool inf_l = lhs[i].is_infinite(), inf_r = rhs[i].is_infinite();
    if (inf_l != inf_r) return false;
    if (!inf_l && std::abs(lhs[i].death - rhs[i].death) > tol) return false;
  }
  return true;
}

double barcode_p_norm(const Barcode& barcode, double p) {
  return p_norm(barcode.lengths(), p);
}

std::string format_double(double value) {
  if (is_inf(value)) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double parse_double(const std::string& text) {
  std::string t = text;
  t.erase(0, t.find_first_not_of(" \t\r"));
  t.erase(t.find_last_not_of(" \t\r") + 1);
  if (t == "inf" || t == "Inf" || t == "INF" || t == "infinity") return kInf;
  size_t pos = 0;
  double v;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse number: '" + text + "'");
  }
  if (pos != t.size())
    throw std::invalid_argument("trailing characters in number: '" + text + "'");
  return v;
}

Barcode read_barcode_csv(std::istream& in) {
  Barcode out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t"));
    if (trimmed.empty() || trimmed[0] == '#') continue;
    auto comma = trimmed.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("barcode CSV line " + std::to_string(lineno) +
                                  ": expected 'birth,death'");
    std::string lhs = trimmed.substr(0, comma), rhs = trimmed.substr(comma + 1);
    if (lineno == 1) {
      // Optional header: skip if the first field is not numeric.
      try {
        parse_double(lhs);
      } catch (const std::invalid_argument&) {
        continue;
      }
    }
    try {
      out.add(parse_double(lhs), parse_double(rhs));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("barcode CSV line " + std::to_string(lineno) +
                                  ": " + e.what());
    }
  }
  return out;
}

Barcode read_barcode_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open barcode file: " + path);
  return read_barcode_csv(in);
}

void write_barcode_csv(std::ostream& out, const Barcode& barcode) {
  out << "birth,death\n";
  for (const Bar& b : barcode.bars())
    out << format_double(b.birth) << "," << format_double(b.death) << "\n";
}

void write_barcode_csv_file(const std::string& path, const Barcode& barcode) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write barcode file: " + path);
  write_barcode_csv(out, barcode);
}

}  // namespace wsr
