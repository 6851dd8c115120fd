#include "ssg/cache.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ssg {

namespace {

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

nlohmann::json int_matrix_json(const IntMatrix& m) {
  auto out = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    auto row = nlohmann::json::array();
    for (std::size_t c = 0; c < m.cols; ++c) row.push_back(std::to_string(m(r, c)));
    out.push_back(row);
  }
  return out;
}

template <class F>
auto guarded(F f) {
  try {
    return f();
  } catch (const CacheError&) {
    throw;
  } catch (const std::exception& e) {
    throw CacheError(std::string("malformed cache entry: ") + e.what());
  }
}

}  // namespace

nlohmann::json class_set_to_json(const PolarizedClassSet& cs) {
  auto classes = nlohmann::json::array();
  for (const auto& c : cs.classes) {
    nlohmann::json cj;
    cj["gram"] = int_matrix_json(c.lattice.gram().doubled());
    if (c.form) cj["hermitian"] = to_json(c.form->matrix());
    if (c.ideal) {
      auto b = nlohmann::json::array();
      for (const auto& q : *c.ideal) b.push_back(to_json(q));
      cj["basis"] = b;
    }
    cj["e"] = std::to_string(c.e);
    classes.push_back(cj);
  }
  nlohmann::json j;
  j["format_version"] = kCacheFormatVersion;
  j["p"] = std::to_string(cs.p);
  j["g"] = std::to_string(cs.g);
  j["h"] = std::to_string(cs.h());
  j["checksum"] = fnv1a(classes.dump());
  j["classes"] = classes;
  return j;
}

PolarizedClassSet class_set_from_json(const nlohmann::json& j) {
  return guarded([&] {
    if (!j.is_object() || !j.contains("format_version") || j["format_version"] != kCacheFormatVersion)
      throw CacheError("cache format version mismatch");
    const auto& classes = j.at("classes");
    if (fnv1a(classes.dump()) != j.at("checksum").get<std::string>()) throw CacheError("cache checksum mismatch");
    PolarizedClassSet cs;
    cs.p = std::stol(j.at("p").get<std::string>());
    cs.g = std::stoul(j.at("g").get<std::string>());
    if (std::stoul(j.at("h").get<std::string>()) != classes.size()) throw CacheError("cache class count mismatch");
    auto order = make_order(cs.p);
    for (const auto& cj : classes) {
      PolarizedClass pc;
      if (cs.g == 1) {
        std::array<Quaternion, 4> basis;
        for (int a = 0; a < 4; ++a) basis[a] = quaternion_from_json(cj.at("basis").at(a));
        pc.ideal = basis;
        pc.lattice = HermitianLattice::ideal(order, basis);
        pc.ideal_norm = 1 / pc.lattice.form()(0, 0).c[0];
      } else {
        pc.form = HermitianForm(quat_matrix_from_json(order, cj.at("hermitian")));
        if (pc.form->genus() != cs.g) throw CacheError("cached form has the wrong size");
        if (pc.form->hnm() != 1) throw CacheError("cached form is not principal");
        pc.lattice = HermitianLattice::standard(*pc.form);
      }
      if (int_matrix_json(pc.lattice.gram().doubled()) != cj.at("gram")) throw CacheError("cached Gram matrix mismatch");
      pc.aut = automorphisms(pc.lattice);
      pc.e = pc.aut.size();
      if (std::to_string(pc.e) != cj.at("e").get<std::string>()) throw CacheError("cached automorphism count mismatch");
      pc.theta = pc.lattice.theta(theta_bound(cs.g));
      cs.classes.push_back(std::move(pc));
    }
    if (cs.mass() != genus_mass(cs.p, cs.g)) throw CacheError("cached class set fails the mass formula");
    return cs;
  });
}

std::string cache_file(const std::string& dir, long p, std::size_t g) {
  return (std::filesystem::path(dir) / ("classes_p" + std::to_string(p) + "_g" + std::to_string(g) + ".json")).string();
}

std::optional<PolarizedClassSet> load_cache(const std::string& dir, long p, std::size_t g) {
  const std::string path = cache_file(dir, p, g);
  if (!std::filesystem::exists(path)) return std::nullopt;
  std::ifstream in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw CacheError("cache file is not valid JSON: " + path);
  }
  auto cs = class_set_from_json(j);
  if (cs.p != p || cs.g != g) throw CacheError("cache file describes a different (p, g)");
  return cs;
}

void store_cache(const std::string& dir, const PolarizedClassSet& cs) {
  std::filesystem::create_directories(dir);
  const std::string path = cache_file(dir, cs.p, cs.g);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    out << class_set_to_json(cs).dump(1) << "\n";
    if (!out) throw std::runtime_error("cannot write cache file " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

long auxiliary_prime(long p) { return p == 2 ? 3 : 2; }

PolarizedClassSet cached_class_set(const std::string& dir, long p, std::size_t g) {
  if (!dir.empty())
    if (auto cs = load_cache(dir, p, g)) return std::move(*cs);
  auto cs = class_set(p, g, auxiliary_prime(p));
  if (!dir.empty()) store_cache(dir, cs);
  return cs;
}

}  // namespace ssg
