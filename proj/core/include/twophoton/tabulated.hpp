#pragma once

#include <filesystem>
#include <vector>

namespace twophoton {

// Real function sampled at strictly increasing abscissae, linearly interpolated.
class Tabulated {
 public:
  Tabulated() = default;
  Tabulated(std::vector<double> x, std::vector<double> y);

  bool empty() const { return x_.empty(); }
  bool covers(double lo, double hi) const;
  double operator()(double x) const;  // throws outside the sampled range

  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
};

// Two-column numeric CSV. Lines starting with '#' and a single non-numeric header
// line are skipped; anything else that does not parse is a ConfigError naming the line.
Tabulated load_two_column_csv(const std::filesystem::path& path);

}  // namespace twophoton
