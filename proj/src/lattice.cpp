#include "gk/lattice.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include "json.hpp"

#include "gk/errors.hpp"
#include "gk/rng.hpp"

namespace gk {

Torus::Torus(int N_, int d_) : N(N_), d(d_) {
  if (N_ < 1 || d_ < 1 || d_ > 3) throw SizeError("Torus: need N >= 1 and 1 <= d <= 3");
  std::size_t s = 1;
  for (int j = 0; j < d_; ++j) {
    stride_[j] = s;
    s *= static_cast<std::size_t>(N_);
  }
  sites_ = s;
}

std::size_t Torus::index(const int* x) const {
  std::size_t s = 0;
  for (int j = 0; j < d; ++j) {
    const int r = ((x[j] % N) + N) % N;
    s += static_cast<std::size_t>(r) * stride_[j];
  }
  return s;
}

void Torus::coords(std::size_t site, int* x) const {
  for (int j = 0; j < d; ++j) {
    x[j] = static_cast<int>(site % static_cast<std::size_t>(N));
    site /= static_cast<std::size_t>(N);
  }
}

int Torus::coord(std::size_t site, int j) const {
  return static_cast<int>((site / stride_[j]) % static_cast<std::size_t>(N));
}

std::size_t Torus::neighbor(std::size_t site, int j, int s) const {
  const int c = coord(site, j);
  const std::size_t st = stride_[j];
  if (s > 0) return (c == N - 1) ? site - static_cast<std::size_t>(N - 1) * st : site + st;
  return (c == 0) ? site + static_cast<std::size_t>(N - 1) * st : site - st;
}

Configuration::Configuration(Torus t) : torus_(t), words_((t.sites() + 63) / 64, 0ULL) {}

void Configuration::set(std::size_t x, bool v) {
  if (occupied(x) != v) flip(x);
}

void Configuration::flip(std::size_t x) {
  const std::uint64_t mask = 1ULL << (x & 63);
  std::uint64_t& w = words_[x >> 6];
  if (w & mask) {
    --count_;
  } else {
    ++count_;
  }
  w ^= mask;
}

void Configuration::exchange(std::size_t x, int j) {
  const std::size_t y = torus_.neighbor(x, j, +1);
  if (occupied(x) != occupied(y)) {
    flip(x);
    flip(y);
  }
}

std::size_t Configuration::recount() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::uint64_t Configuration::hash() const {
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(torus_.N) * 131 + static_cast<std::uint64_t>(torus_.d));
  for (auto w : words_) h = splitmix64(h ^ w);
  return h;
}

std::uint64_t Configuration::state_index() const {
  if (sites() > 63) throw SizeError("state_index: more than 63 sites");
  return words_.empty() ? 0 : words_[0];
}

Configuration Configuration::from_state_index(const Torus& t, std::uint64_t s) {
  if (t.sites() > 63) throw SizeError("from_state_index: more than 63 sites");
  Configuration c(t);
  c.words_[0] = s & ((1ULL << t.sites()) - 1);
  c.refresh_count();
  return c;
}

Configuration sample_nu_N(const LatticeProfile& u, std::uint64_t seed) {
  Configuration c(Torus(u.N(), u.d()));
  Rng rng(seed);
  for (std::size_t x = 0; x < c.sites(); ++x) {
    if (rng.uniform() < u.at_site(x)) c.flip(x);
  }
  return c;
}

double exchange_log_ratio(const Configuration& c, const LatticeProfile& u, std::size_t x, int j) {
  const std::size_t y = c.torus().neighbor(x, j, +1);
  const double rx = u.at_site(x), ry = u.at_site(y);
  const double lx = std::log(rx / (1 - rx)), ly = std::log(ry / (1 - ry));
  return (c.eta(x) - c.eta(y)) * (ly - lx);
}

void write_snapshot(const std::string& path, const Configuration& c, const SnapshotHeader& h) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(&h.magic), sizeof h.magic);
  out.write(reinterpret_cast<const char*>(&h.version), sizeof h.version);
  out.write(reinterpret_cast<const char*>(&h.d), sizeof h.d);
  out.write(reinterpret_cast<const char*>(&h.N), sizeof h.N);
  out.write(reinterpret_cast<const char*>(&h.K), sizeof h.K);
  out.write(reinterpret_cast<const char*>(&h.gamma), sizeof h.gamma);
  out.write(reinterpret_cast<const char*>(&h.time), sizeof h.time);
  out.write(reinterpret_cast<const char*>(&h.seed), sizeof h.seed);
  const auto& w = c.words();
  out.write(reinterpret_cast<const char*>(w.data()), static_cast<std::streamsize>(w.size() * sizeof(std::uint64_t)));

  nlohmann::json j;
  j["format"] = "gk-snapshot";
  j["version"] = h.version;
  j["d"] = h.d;
  j["N"] = h.N;
  j["K"] = h.K;
  j["gamma"] = h.gamma;
  j["time"] = h.time;
  j["seed"] = h.seed;
  j["particles"] = c.count();
  j["hash"] = c.hash();
  std::ofstream side(path + ".json");
  side << j.dump(2) << '\n';
}

Configuration read_snapshot(const std::string& path, SnapshotHeader* hout) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  SnapshotHeader h;
  const std::uint64_t expected = h.magic;
  in.read(reinterpret_cast<char*>(&h.magic), sizeof h.magic);
  in.read(reinterpret_cast<char*>(&h.version), sizeof h.version);
  in.read(reinterpret_cast<char*>(&h.d), sizeof h.d);
  in.read(reinterpret_cast<char*>(&h.N), sizeof h.N);
  in.read(reinterpret_cast<char*>(&h.K), sizeof h.K);
  in.read(reinterpret_cast<char*>(&h.gamma), sizeof h.gamma);
  in.read(reinterpret_cast<char*>(&h.time), sizeof h.time);
  in.read(reinterpret_cast<char*>(&h.seed), sizeof h.seed);
  if (!in || h.magic != expected) throw std::runtime_error(path + ": not a snapshot file");
  if (h.version != 1) throw std::runtime_error(path + ": unsupported snapshot version");
  Configuration c(Torus(static_cast<int>(h.N), static_cast<int>(h.d)));
  auto& w = c.mutable_words();
  in.read(reinterpret_cast<char*>(w.data()), static_cast<std::streamsize>(w.size() * sizeof(std::uint64_t)));
  if (!in) throw std::runtime_error(path + ": truncated bitmap");
  c.refresh_count();
  if (hout) *hout = h;
  return c;
}

}  // namespace gk
