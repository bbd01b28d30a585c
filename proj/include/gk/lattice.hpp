#pragma once

// Occupation configurations on the discrete torus, product-measure sampling
// and the elementary moves.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gk/profile.hpp"

namespace gk {

/// T_N^d with coordinate 1 fastest-varying.
struct Torus {
  int N = 0;
  int d = 1;

  Torus() = default;
  Torus(int N_, int d_);

  std::size_t sites() const { return sites_; }
  std::size_t index(const int* x) const;
  void coords(std::size_t site, int* x) const;
  int coord(std::size_t site, int j) const;
  /// Neighbor site x + s e_j for s = +1 or -1.
  std::size_t neighbor(std::size_t site, int j, int s) const;

 private:
  std::size_t sites_ = 0;
  std::size_t stride_[3] = {1, 0, 0};
};

class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(Torus t);

  const Torus& torus() const { return torus_; }
  std::size_t sites() const { return torus_.sites(); }
  std::size_t count() const { return count_; }

  bool occupied(std::size_t x) const { return (words_[x >> 6] >> (x & 63)) & 1ULL; }
  int eta(std::size_t x) const { return occupied(x) ? 1 : 0; }
  void set(std::size_t x, bool v);
  void flip(std::size_t x);
  /// Swap eta_x and eta_{x+e_j}.
  void exchange(std::size_t x, int j);

  /// Recount particles from the bits.
  std::size_t recount() const;
  std::uint64_t hash() const;
  bool operator==(const Configuration& o) const {
    return torus_.N == o.torus_.N && torus_.d == o.torus_.d && words_ == o.words_;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }
  std::vector<std::uint64_t>& mutable_words() { return words_; }
  void refresh_count() { count_ = recount(); }

  /// State index for enumeration on tiny lattices: bit x of the result is eta_x.
  std::uint64_t state_index() const;
  static Configuration from_state_index(const Torus& t, std::uint64_t s);

 private:
  Torus torus_;
  std::vector<std::uint64_t> words_;
  std::size_t count_ = 0;
};

/// Independent Bernoulli(u^N(x)) occupations.
Configuration sample_nu_N(const LatticeProfile& u, std::uint64_t seed);

inline double omega(const Configuration& c, const LatticeProfile& u, std::size_t x) {
  return c.eta(x) - u.at_site(x);
}

inline double zeta(const Configuration& c, const LatticeProfile& u, std::size_t x) {
  const double r = u.at_site(x);
  return (c.eta(x) - r) / (r * (1.0 - r));
}

/// log nu(eta') - log nu(eta) for eta' obtained from eta by the exchange of x and x + e_j.
double exchange_log_ratio(const Configuration& c, const LatticeProfile& u, std::size_t x, int j);

struct SnapshotHeader {
  std::uint64_t magic = 0x31304e53534b47ULL;  // "GKSSN01"
  std::uint32_t version = 1;
  std::uint32_t d = 1;
  std::uint64_t N = 0;
  double K = 0.0;
  double gamma = 0.0;
  double time = 0.0;
  std::uint64_t seed = 0;
};

void write_snapshot(const std::string& path, const Configuration& c, const SnapshotHeader& h);
Configuration read_snapshot(const std::string& path, SnapshotHeader* h = nullptr);

}  // namespace gk
