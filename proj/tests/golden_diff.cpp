// Compare two JSON documents, numbers to a relative tolerance.
// usage: golden_diff expected actual [rel_tol]
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using json = nlohmann::json;

namespace {

double tol = 1e-9;

bool same(const json& a, const json& b, const std::string& where) {
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>(), y = b.get<double>();
    if (std::abs(x - y) <= tol * std::max({1e-300, std::abs(x), std::abs(y)}) || (x == 0.0 && std::abs(y) < 1e-14) ||
        (y == 0.0 && std::abs(x) < 1e-14))
      return true;
    std::fprintf(stderr, "%s: %.17g vs %.17g\n", where.c_str(), x, y);
    return false;
  }
  if (a.type() != b.type()) {
    std::fprintf(stderr, "%s: type differs\n", where.c_str());
    return false;
  }
  if (a.is_array()) {
    if (a.size() != b.size()) {
      std::fprintf(stderr, "%s: length %zu vs %zu\n", where.c_str(), a.size(), b.size());
      return false;
    }
    bool ok = true;
    for (size_t i = 0; i < a.size(); ++i) ok = same(a[i], b[i], where + "[" + std::to_string(i) + "]") && ok;
    return ok;
  }
  if (a.is_object()) {
    bool ok = true;
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key())) {
        std::fprintf(stderr, "%s.%s missing\n", where.c_str(), it.key().c_str());
        ok = false;
        continue;
      }
      ok = same(it.value(), b.at(it.key()), where + "." + it.key()) && ok;
    }
    for (auto it = b.begin(); it != b.end(); ++it)
      if (!a.contains(it.key())) {
        std::fprintf(stderr, "%s.%s unexpected\n", where.c_str(), it.key().c_str());
        ok = false;
      }
    return ok;
  }
  if (a != b) {
    std::fprintf(stderr, "%s: %s vs %s\n", where.c_str(), a.dump().c_str(), b.dump().c_str());
    return false;
  }
  return true;
}

json load(const char* path) {
  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "cannot read %s\n", path);
    std::exit(2);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return json::parse(ss.str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: golden_diff expected actual [rel_tol]\n");
    return 2;
  }
  if (argc > 3) tol = std::atof(argv[3]);
  return same(load(argv[1]), load(argv[2]), "$") ? 0 : 1;
}
