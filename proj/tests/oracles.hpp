#pragma once

// Independent oracles shared by the unit and acceptance tests.

#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <regex>
#include <string>
#include <vector>

#include "qaboa/problems.hpp"

namespace oracle {

using qaboa::WeightedGraph;

// Polynomial in Pauli-Z variables: mask of Z factors -> coefficient.
using ZPoly = std::map<std::uint32_t, double>;

inline ZPoly multiply(const ZPoly& a, const ZPoly& b) {
  ZPoly out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) out[ma ^ mb] += ca * cb;
  }
  return out;
}

// q_k -> (1 - Z_k)/2 and 1 - q_k -> (1 + Z_k)/2, with Z_k on mask bit n-1-k.
inline ZPoly q_var(int k, int n, bool complement) {
  const std::uint32_t bit = 1u << (n - 1 - k);
  return {{0u, 0.5}, {bit, complement ? 0.5 : -0.5}};
}

inline double evaluate_z(const ZPoly& p, std::uint32_t z) {
  double total = 0.0;
  for (const auto& [mask, c] : p) total += (std::popcount(mask & z) % 2 ? -c : c);
  return total;
}

struct Monomial {
  double coefficient;
  std::vector<int> vars;  // 0-based
};

inline ZPoly substitute(const std::vector<Monomial>& poly, int n) {
  ZPoly out;
  for (const auto& m : poly) {
    ZPoly term{{0u, m.coefficient}};
    for (int v : m.vars) term = multiply(term, q_var(v, n, false));
    for (const auto& [mask, c] : term) out[mask] += c;
  }
  return out;
}

// Lattice objective as printed in the source publication, parsed from text.
inline const char* kLatticeText =
    "- q_{1} + 15q_{1}q_{2} + 4q_{2}q_{3} - 6q_{1}q_{2}q_{3} + 4q_{1}q_{4}"
    " - 15q_{1}q_{2}q_{4} + 15q_{3}q_{4} - 6q_{1}q_{3}q_{4} - 15q_{2}q_{3}q_{4} + 28q_{1}q_{2}q_{3}q_{4} - 4q_{2}q_{5}"
    " + 2q_{1}q_{2}q_{5} + 2q_{2}q_{3}q_{5} + 4q_{1}q_{2}q_{3}q_{5} + 7q_{4}q_{5} + 7q_{5}q_{6} + 2q_{1}q_{4}q_{5}"
    " + 4q_{2}q_{4}q_{5} + 9q_{1}q_{2}q_{4}q_{5} - 20q_{3}q_{4}q_{5} + 4q_{1}q_{3}q_{4}q_{5} + 9q_{2}q_{3}q_{4}q_{5}"
    " - 37q_{1}q_{2}q_{3}q_{4}q_{5} - 4q_{1}q_{6} + 4q_{1}q_{2}q_{6} + 7q_{3}q_{6} + 2q_{1}q_{3}q_{6} + 4q_{2}q_{3}q_{6}"
    " + 9q_{1}q_{2}q_{3}q_{6} + 4q_{1}q_{4}q_{6} - 18q_{3}q_{4}q_{6} + 9q_{1}q_{3}q_{4}q_{6} - 33q_{1}q_{2}q_{3}q_{4}q_{6}"
    " + 2q_{1}q_{5}q_{6} + 4q_{2}q_{5}q_{6} - 20q_{3}q_{5}q_{6} + 9q_{1}q_{2}q_{5}q_{6} + 4q_{1}q_{3}q_{5}q_{6}"
    " + 9q_{2}q_{3}q_{5}q_{6} - 37q_{1}q_{2}q_{3}q_{5}q_{6} - 18q_{4}q_{5}q_{6} + 9q_{1}q_{4}q_{5}q_{6} - 33q_{1}q_{2}q_{4}q_{5}q_{6}"
    " + 53q_{3}q_{4}q_{5}q_{6} - 37q_{1}q_{3}q_{4}q_{5}q_{6} - 33q_{2}q_{3}q_{4}q_{5}q_{6} + 99q_{1}q_{2}q_{3}q_{4}q_{5}q_{6}";

inline std::vector<Monomial> parse_lattice() {
  std::vector<Monomial> out;
  const std::string text = kLatticeText;
  const std::regex term(R"(([+-])\s*(\d*)((?:q_\{\d\})+))");
  const std::regex var(R"(q_\{(\d)\})");
  for (auto it = std::sregex_iterator(text.begin(), text.end(), term); it != std::sregex_iterator(); ++it) {
    Monomial m;
    const double mag = (*it)[2].length() ? std::stod((*it)[2]) : 1.0;
    m.coefficient = (*it)[1] == "-" ? -mag : mag;
    const std::string vars = (*it)[3];
    for (auto v = std::sregex_iterator(vars.begin(), vars.end(), var); v != std::sregex_iterator(); ++v) {
      m.vars.push_back(std::stoi((*v)[1]) - 1);
    }
    out.push_back(m);
  }
  return out;
}

inline std::vector<Monomial> maxcut_poly(const WeightedGraph& g) {
  std::vector<Monomial> poly;
  for (const auto& e : g.edges) {
    poly.push_back({e.weight, {e.i}});
    poly.push_back({e.weight, {e.j}});
    poly.push_back({-2.0 * e.weight, {e.i, e.j}});
  }
  return poly;
}

// Selector expansion: sum over patterns of prod (q or 1-q) * base(pattern), in Z form.
inline ZPoly selector_poly(int n, const std::function<double(std::uint32_t)>& base) {
  ZPoly out;
  for (std::uint32_t pattern = 0; pattern < (1u << n); ++pattern) {
    ZPoly term{{0u, base(pattern)}};
    for (int k = 0; k < n; ++k) term = multiply(term, q_var(k, n, ((pattern >> (n - 1 - k)) & 1u) == 0));
    for (const auto& [mask, c] : term) out[mask] += c;
  }
  return out;
}

// Base objective at the discrete levels decoded from a selector pattern.
inline std::function<double(std::uint32_t)> selector_base(const std::string& id, std::vector<double> x) {
  if (id == "welded-beam") {
    return [x](std::uint32_t p) { return qaboa::welded_beam_cost(int(p >> 2), 1 + int(p & 3u), x[0], x[1], x[2], x[3]); };
  }
  if (id == "speed-reducer") {
    return [x](std::uint32_t p) { return qaboa::speed_reducer_weight(x[0], x[1], 15.0 + p, x[2], x[3], x[4], x[5]); };
  }
  return [x](std::uint32_t p) { return qaboa::pressure_vessel_cost(3.0 + (p >> 2), 3.0 + (p & 3u), x[0], x[1]); };
}

}  // namespace oracle
