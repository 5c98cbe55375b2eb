#include "gsc/pattern.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <regex>
#include <sstream>

#include "gsc/errors.hpp"
#include "gsc/util.hpp"

namespace gsc {

std::int64_t ipow(std::int64_t base, int exp) {
  if (exp < 0) throw ContractViolation("ipow: negative exponent");
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > std::numeric_limits<std::int64_t>::max() / base)
      throw SizeLimitError("integer overflow in L_F^n");
    r *= base;
  }
  return r;
}

GscPattern::GscPattern(int dim, int scale, std::vector<std::uint8_t> keep)
    : dim_(dim), scale_(scale), mass_(0), keep_(std::move(keep)) {
  if (dim_ < 2) throw InputError("pattern: d must be >= 2");
  if (scale_ < 3) throw InputError("pattern: L_F must be >= 3");
  if (static_cast<std::int64_t>(keep_.size()) != ipow(scale_, dim_))
    throw InputError("pattern: mask must have L_F^d entries, got " +
                     std::to_string(keep_.size()));
  for (auto& k : keep_) {
    k = k ? 1 : 0;
    mass_ += k;
  }
}

GscPattern GscPattern::standard_carpet() {
  return from_removed(2, 3, {{1, 1}});
}

GscPattern GscPattern::full_cube(int dim, int scale) {
  return GscPattern(dim, scale,
                    std::vector<std::uint8_t>(static_cast<std::size_t>(ipow(scale, dim)), 1));
}

GscPattern GscPattern::menger_sponge() {
  std::vector<std::uint8_t> keep(27, 1);
  for (int i = 0; i < 27; ++i) {
    const int ones = (i / 9 == 1) + ((i / 3) % 3 == 1) + (i % 3 == 1);
    if (ones >= 2) keep[i] = 0;
  }
  return GscPattern(3, 3, std::move(keep));
}

GscPattern GscPattern::from_removed(int dim, int scale,
                                    const std::vector<std::vector<int>>& removed) {
  if (dim < 2 || scale < 3) throw InputError("pattern: need d >= 2 and L_F >= 3");
  GscPattern p = full_cube(dim, scale);
  for (const auto& idx : removed) {
    if (static_cast<int>(idx.size()) != dim)
      throw InputError("pattern: removed index has wrong arity");
    for (int v : idx)
      if (v < 0 || v >= scale) throw InputError("pattern: removed index out of range");
    const std::size_t lin = p.linear_index(idx);
    if (p.keep_[lin]) {
      p.keep_[lin] = 0;
      --p.mass_;
    }
  }
  return p;
}

std::size_t GscPattern::linear_index(std::span<const int> digits) const {
  std::size_t lin = 0;
  for (int v : digits) lin = lin * static_cast<std::size_t>(scale_) + static_cast<std::size_t>(v);
  return lin;
}

std::vector<int> GscPattern::digits_of(std::size_t linear) const {
  std::vector<int> out(static_cast<std::size_t>(dim_));
  for (int i = dim_ - 1; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = static_cast<int>(linear % static_cast<std::size_t>(scale_));
    linear /= static_cast<std::size_t>(scale_);
  }
  return out;
}

std::vector<std::vector<int>> GscPattern::removed() const {
  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i < keep_.size(); ++i)
    if (!keep_[i]) out.push_back(digits_of(i));
  return out;
}

std::string GscPattern::hash() const {
  std::vector<std::uint8_t> bytes;
  bytes.push_back(static_cast<std::uint8_t>(dim_));
  bytes.push_back(static_cast<std::uint8_t>(scale_));
  std::uint8_t acc = 0;
  int nbits = 0;
  for (auto k : keep_) {
    acc = static_cast<std::uint8_t>((acc << 1) | k);
    if (++nbits == 8) {
      bytes.push_back(acc);
      acc = 0;
      nbits = 0;
    }
  }
  if (nbits) bytes.push_back(static_cast<std::uint8_t>(acc << (8 - nbits)));
  return sha256_hex(std::string(bytes.begin(), bytes.end()));
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (trim(v.substr(pos)).empty()) return x;
  } catch (const std::exception&) {
  }
  throw InputError("pattern: field '" + key + "' is not an integer: '" + v + "'");
}

}  // namespace

GscPattern parse_pattern(const std::string& text) {
  std::map<std::string, std::string> fields;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError("pattern: line " + std::to_string(lineno) + " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key != "d" && key != "L_F" && key != "removed")
      throw InputError("pattern: unknown key '" + key + "'");
    if (fields.contains(key)) throw InputError("pattern: duplicate key '" + key + "'");
    fields[key] = trim(line.substr(eq + 1));
  }
  for (const char* k : {"d", "L_F", "removed"})
    if (!fields.contains(k)) throw InputError(std::string("pattern: missing key '") + k + "'");

  const int d = parse_int("d", fields["d"]);
  const int L = parse_int("L_F", fields["L_F"]);
  std::vector<std::vector<int>> removed;
  static const std::regex tuple_re(R"(\(([^()]*)\))");
  const std::string& r = fields["removed"];
  std::string leftover = std::regex_replace(r, tuple_re, "");
  for (char c : leftover)
    if (c != '[' && c != ']' && c != ',' && c != ' ' && c != '\t')
      throw InputError("pattern: cannot parse removed list '" + r + "'");
  for (auto it = std::sregex_iterator(r.begin(), r.end(), tuple_re); it != std::sregex_iterator();
       ++it) {
    std::vector<int> idx;
    std::istringstream parts((*it)[1].str());
    std::string tok;
    while (std::getline(parts, tok, ',')) idx.push_back(parse_int("removed", trim(tok)));
    removed.push_back(std::move(idx));
  }
  return GscPattern::from_removed(d, L, removed);
}

GscPattern load_pattern(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw InputError("pattern: cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_pattern(ss.str());
}

std::string format_pattern(const GscPattern& pattern) {
  std::ostringstream out;
  out << "d = " << pattern.dim() << "\nL_F = " << pattern.scale() << "\nremoved = [";
  bool first = true;
  for (const auto& idx : pattern.removed()) {
    out << (first ? "" : ", ") << '(';
    for (std::size_t i = 0; i < idx.size(); ++i) out << (i ? "," : "") << idx[i];
    out << ')';
    first = false;
  }
  out << "]\n";
  return out.str();
}

}  // namespace gsc
