#include "twophoton/tabulated.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>

#include "twophoton/errors.hpp"

namespace twophoton {

Tabulated::Tabulated(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size()) throw std::invalid_argument("table columns differ in length");
  if (x_.size() < 2) throw std::invalid_argument("table needs at least two rows");
  for (std::size_t i = 1; i < x_.size(); ++i)
    if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("table abscissae must increase strictly");
  for (double v : y_)
    if (!std::isfinite(v)) throw std::invalid_argument("table values must be finite");
}

bool Tabulated::covers(double lo, double hi) const {
  return !x_.empty() && x_.front() <= lo && x_.back() >= hi;
}

double Tabulated::operator()(double x) const {
  if (x_.empty() || x < x_.front() || x > x_.back())
    throw std::out_of_range("abscissa outside tabulated range");
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  if (it == x_.end()) return y_.back();
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double f = (x - x_[i]) / (x_[i + 1] - x_[i]);
  return y_[i] + f * (y_[i + 1] - y_[i]);
}

namespace {

bool parse_row(const std::string& line, double& a, double& b) {
  const char* p = line.c_str();
  char* end = nullptr;
  errno = 0;
  a = std::strtod(p, &end);
  if (end == p || errno) return false;
  p = end;
  while (*p == ' ' || *p == '\t') ++p;
  if (*p != ',') return false;
  ++p;
  b = std::strtod(p, &end);
  if (end == p || errno) return false;
  for (p = end; *p; ++p)
    if (*p != ' ' && *p != '\t' && *p != '\r') return false;
  return true;
}

}  // namespace

Tabulated load_two_column_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open table '" + path.string() + "'");
  std::vector<double> x, y;
  std::string line;
  std::size_t number = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    double a = 0.0, b = 0.0;
    if (!parse_row(line, a, b)) {
      if (x.empty() && !header_seen) {
        header_seen = true;
        continue;
      }
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": expected two numbers");
    }
    x.push_back(a);
    y.push_back(b);
  }
  try {
    return Tabulated(std::move(x), std::move(y));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace twophoton
