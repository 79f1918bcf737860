#pragma once

#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include <Eigen/Dense>

#include "gsosel/bundle.hpp"
#include "gsosel/linalg/dense.hpp"
#include "gsosel/linalg/sparse.hpp"

namespace testutil {

inline std::filesystem::path temp_dir(const std::string& tag) {
  static int counter = 0;
  auto dir = std::filesystem::temp_directory_path() /
             ("gsosel_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline gsosel::GraphBundle p2(int label0 = 0, int label1 = 1) {
  gsosel::GraphBundle b;
  b.name = "p2";
  b.n = 2;
  b.d = 1;
  b.c = 2;
  b.edges = {{0, 1}};
  b.features = gsosel::linalg::Matrix::from_rows({{0.0}, {1.0}});
  b.labels = {label0, label1};
  b.split = {gsosel::Split::Train, gsosel::Split::Val};
  return b;
}

inline gsosel::linalg::Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  gsosel::linalg::Matrix m(r, c);
  for (double& v : m.data()) v = g(rng);
  return m;
}

inline Eigen::MatrixXd to_eigen(const gsosel::linalg::Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline double eigen_pencil_max(const Eigen::MatrixXd& ay, const Eigen::MatrixXd& az) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(ay, az);
  return es.eigenvalues().maxCoeff();
}

}  // namespace testutil
