#include "fracperim/cellpairs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fracperim/quadrature.hpp"

namespace fracperim {

namespace {

struct Key {
  int dim;
  long s_milli;  // s keyed at 1e-6 resolution
  std::array<int, 3> off;
  bool operator<(const Key& o) const {
    return std::tie(dim, s_milli, off) < std::tie(o.dim, o.s_milli, o.off);
  }
};

std::map<Key, double>& cache() {
  static std::map<Key, double> c;
  return c;
}
std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

long s_key(double s) { return std::lround(s * 1e6); }

std::array<int, 3> canonical(int dim, std::array<int, 3> off) {
  for (int i = 0; i < 3; ++i) off[size_t(i)] = std::abs(off[size_t(i)]);
  std::sort(off.begin(), off.begin() + dim, std::greater<int>());
  return off;
}

// 1-D panel set for the tent factor on [d-1, d+1] (canonical d >= 0): kink at
// d, geometric grading towards u = 0 where the kernel can be singular.
std::vector<double> axis_panels(int d) {
  if (d == 0)
    return {-1.0, -0.25, -0.0625, -0.015625, -0.004, 0.0,
            0.004, 0.015625, 0.0625, 0.25, 1.0};
  if (d == 1)
    return {0.0, 1e-4, 4e-4, 2e-3, 1e-2, 0.05, 0.25, 1.0, 2.0};
  return {double(d) - 1.0, double(d), double(d) + 1.0};
}

double tent(double t) { return std::max(0.0, 1.0 - std::abs(t)); }

std::string cache_path(int dim, double s) {
  const char* dir = std::getenv("FRACPERIM_CACHE");
  if (!dir || !*dir) return {};
  std::ostringstream os;
  os << dir << "/cellpairs_N" << dim << "_s" << s_key(s) << ".json";
  return os.str();
}

}  // namespace

double unit_cell_pair_integral(int dim, double s, std::array<int, 3> offset) {
  std::array<int, 3> off = canonical(dim, offset);
  bool all_zero = true;
  for (int i = 0; i < dim; ++i)
    if (off[size_t(i)] != 0) all_zero = false;
  if (all_zero)
    throw domain_error("unit_cell_pair_integral: zero offset is divergent");

  Key key{dim, s_key(s), off};
  {
    std::lock_guard<std::mutex> lock(cache_mutex());
    auto it = cache().find(key);
    if (it != cache().end()) return it->second;
  }

  const double expo = dim + 2.0 * s;
  const int gl = 16;
  double result = 0.0;
  auto p0 = axis_panels(off[0]);
  auto p1 = axis_panels(off[1]);
  if (dim == 2) {
    for (size_t a = 0; a + 1 < p0.size(); ++a) {
      Quad1D qa = gauss_legendre(gl, p0[a], p0[a + 1]);
      for (size_t b = 0; b + 1 < p1.size(); ++b) {
        Quad1D qb = gauss_legendre(gl, p1[b], p1[b + 1]);
        double acc = 0.0;
        for (int i = 0; i < gl; ++i)
          for (int j = 0; j < gl; ++j) {
            double u0 = qa.x[size_t(i)], u1 = qb.x[size_t(j)];
            double r2 = u0 * u0 + u1 * u1;
            acc += qa.w[size_t(i)] * qb.w[size_t(j)] *
                   std::pow(r2, -0.5 * expo) * tent(u0 - off[0]) * tent(u1 - off[1]);
          }
        result += acc;
      }
    }
  } else {
    auto p2 = axis_panels(off[2]);
    for (size_t a = 0; a + 1 < p0.size(); ++a) {
      Quad1D qa = gauss_legendre(gl, p0[a], p0[a + 1]);
      for (size_t b = 0; b + 1 < p1.size(); ++b) {
        Quad1D qb = gauss_legendre(gl, p1[b], p1[b + 1]);
        for (size_t c = 0; c + 1 < p2.size(); ++c) {
          Quad1D qc = gauss_legendre(gl, p2[c], p2[c + 1]);
          double acc = 0.0;
          for (int i = 0; i < gl; ++i)
            for (int j = 0; j < gl; ++j)
              for (int k = 0; k < gl; ++k) {
                double u0 = qa.x[size_t(i)], u1 = qb.x[size_t(j)], u2 = qc.x[size_t(k)];
                double r2 = u0 * u0 + u1 * u1 + u2 * u2;
                acc += qa.w[size_t(i)] * qb.w[size_t(j)] * qc.w[size_t(k)] *
                       std::pow(r2, -0.5 * expo) * tent(u0 - off[0]) *
                       tent(u1 - off[1]) * tent(u2 - off[2]);
              }
          result += acc;
        }
      }
    }
  }

  {
    std::lock_guard<std::mutex> lock(cache_mutex());
    cache()[key] = result;
  }
  return result;
}

void load_cellpair_cache(int dim, double s) {
  std::string path = cache_path(dim, s);
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) return;
  nlohmann::json j;
  try {
    in >> j;
  } catch (...) {
    return;
  }
  if (j.value("schema", "") != "fracperim/cellpairs-v1") return;
  std::lock_guard<std::mutex> lock(cache_mutex());
  for (const auto& e : j["entries"]) {
    std::array<int, 3> off{e[0].get<int>(), e[1].get<int>(), e[2].get<int>()};
    cache()[Key{dim, s_key(s), off}] = e[3].get<double>();
  }
}

void save_cellpair_cache(int dim, double s) {
  std::string path = cache_path(dim, s);
  if (path.empty()) return;
  nlohmann::json entries = nlohmann::json::array();
  {
    std::lock_guard<std::mutex> lock(cache_mutex());
    for (const auto& [k, v] : cache()) {
      if (k.dim != dim || k.s_milli != s_key(s)) continue;
      entries.push_back({k.off[0], k.off[1], k.off[2], v});
    }
  }
  nlohmann::json j;
  j["schema"] = "fracperim/cellpairs-v1";
  j["dim"] = dim;
  j["s_key"] = s_key(s);
  j["entries"] = entries;
  std::ofstream out(path);
  if (out) out << j.dump();
}

}  // namespace fracperim
