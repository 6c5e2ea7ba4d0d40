#pragma once

// Experiment configuration, read from TOML. One table per subcommand plus the
// shared [truncation], [optimizer] and [cache] tables; every table and key is
// optional, unknown ones are rejected.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "states.hpp"

namespace illumina {

inline const std::vector<double> kDefaultNthGrid{0, 0.1, 0.2, 0.5, 1, 2, 5, 10, 15, 20};

struct OptimizerConfig {
  std::uint64_t seed = 20240611;
  int starts = 20;
  int max_iter = 2000;
};

struct CacheConfig {
  std::string dir; // empty: caching off
};

struct Fig2Config {
  std::vector<double> n_th = kDefaultNthGrid;
};

struct Fig3Config {
  std::vector<double> n_th = kDefaultNthGrid;
  int n_total = 4;
};

struct Fig4Config {
  std::vector<int> n_total = [] {
    std::vector<int> v;
    for (int n = 1; n <= 20; ++n) v.push_back(n);
    return v;
  }();
  std::vector<double> n_th = kDefaultNthGrid;
};

struct Fig5Config {
  std::vector<int> n_total{2, 4, 10, 20, 30, 40};
  std::vector<double> n_th = kDefaultNthGrid;
};

struct Fig6Config {
  std::vector<double> n_th = kDefaultNthGrid;
  double eta = 0.01;
  int n_total = 4;
};

struct BoundsConfig {
  std::vector<double> n_th{0.1, 0.5, 1, 2};
  std::vector<int> m{1, 10, 100, 1000, 10000};
  double eta = 0.01;
  int n_total = 4;
  std::vector<std::string> states{"npe", "coherent"};
};

struct McConfig {
  std::vector<int> m{500, 1000, 2000};
  std::int64_t trials = 100000;
  std::uint64_t seed = 7;
  double snr = 0.05;
  double n_th = 0.0;
  int n_total = 1;
};

struct QfiConfig {
  std::string probe = "npe"; // npe | coherent | tmsv
  int n_total = 4;
  std::vector<double> coeffs; // npe only; empty: optimise
  double n_signal = 1.0;      // coherent / tmsv
  double n_th = 1.0;
  std::string method = "fast"; // fast | generic
};

struct SnrConfig {
  std::string probe = "npe"; // npe | coherent
  int n_total = 4;
  std::vector<double> coeffs; // npe only; empty: optimise
  double n_signal = 2.0;      // coherent
  double theta = 0.0;
  double eta = 0.01;
  double n_th = 1.0;
};

struct ExperimentConfig {
  TruncationPolicy truncation;
  OptimizerConfig optimizer;
  CacheConfig cache;
  Fig2Config fig2;
  Fig3Config fig3;
  Fig4Config fig4;
  Fig5Config fig5;
  Fig6Config fig6;
  BoundsConfig bounds;
  McConfig mc;
  QfiConfig qfi;
  SnrConfig snr;
};

/// Parses and validates; throws ConfigError with the offending key.
ExperimentConfig parse_config(const std::string& toml_text);

/// Stable textual form of everything that influences `subcommand`'s output.
std::string canonical_config(const ExperimentConfig& cfg, const std::string& subcommand);

std::uint64_t fnv1a64(const std::string& bytes);

} // namespace illumina
