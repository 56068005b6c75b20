#pragma once

#include "dftr/model.hpp"

#include <Eigen/Core>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace dftr::testing {

/// Nominal parameters: v = 0.01, l = 1, Pe = 4, k = 0.001.
inline ReactorParams nominal_params(double n = 1.0) {
  ReactorParams p;
  p.v = 0.01;
  p.l = 1.0;
  p.d_ax = d_ax_from_peclet(p.v, p.l, 4.0);
  p.k = 0.001;
  p.n = n;
  p.t_final = 400.0;
  return p;
}

inline double rel_l2(const SpatialGrid& grid, const Vector& a, const Vector& reference) {
  const Vector diff = a - reference;
  return std::sqrt(inner_product(grid, diff, diff) / inner_product(grid, reference, reference));
}

inline double observed_order(double coarse_error, double fine_error) {
  return std::log2(coarse_error / fine_error);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("dftr_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::filesystem::path write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

}  // namespace dftr::testing
