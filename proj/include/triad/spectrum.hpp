#pragma once

#include <algorithm>
#include <complex>
#include <string>
#include <vector>

#include "triad/errors.hpp"

namespace triad {

/// Frequency grid with one or more labelled channels. Real-valued channels
/// are stored with zero imaginary part.
struct Spectrum {
  std::vector<double> omega;
  std::vector<std::string> labels;
  std::vector<std::vector<std::complex<double>>> values;
  std::vector<std::string> notes;  // regime warnings raised while computing

  std::size_t size() const { return omega.size(); }

  std::size_t channel(const std::string& label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw InvalidParameter("spectrum has no channel " + label);
    return static_cast<std::size_t>(it - labels.begin());
  }

  void add_channel(std::string label, std::vector<std::complex<double>> v) {
    if (v.size() != omega.size()) throw InvalidParameter("channel length does not match grid");
    labels.push_back(std::move(label));
    values.push_back(std::move(v));
  }

  void add_channel(std::string label, const std::vector<double>& v) {
    add_channel(std::move(label), std::vector<std::complex<double>>(v.begin(), v.end()));
  }

  std::vector<double> real(std::size_t ch) const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = values[ch][i].real();
    return out;
  }
  std::vector<double> real(const std::string& label) const { return real(channel(label)); }
};

inline void validate_grid(const std::vector<double>& grid) {
  detail::require(!grid.empty(), "frequency grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    detail::require(grid[i] > grid[i - 1], "frequency grid must be strictly ascending");
}

inline std::vector<double> linspace(double start, double stop, std::size_t n) {
  detail::require(n >= 1, "linspace needs at least one point");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = start;
    return g;
  }
  const double step = (stop - start) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = start + step * static_cast<double>(i);
  g.back() = stop;
  return g;
}

}  // namespace triad
