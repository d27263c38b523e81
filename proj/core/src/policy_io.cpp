#include "nfr/policy_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "nfr/error.hpp"

namespace nfr {

void write_policy(std::ostream& out, const Policy& p, int slots, const Metadata& meta) {
  const int k = p.size();
  out << "# nfr-policy v1\n";
  out << "# kind=" << (p.is_positional() ? "positional" : "uniform") << "\n";
  out << "# K=" << k << "\n# N=" << slots << "\n";
  for (const auto& [key, value] : meta) out << "# " << key << "=" << value << "\n";
  out << (p.is_positional() ? "n,i,j,r\n" : "i,j,r\n");
  out << std::setprecision(17);
  for (int n = 0; n < p.matrix_count(); ++n)
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        const double r = p.position(n)(i, j);
        if (r == 0.0) continue;
        if (p.is_positional()) out << n << ",";
        out << i << "," << j << "," << r << "\n";
      }
}

void write_policy_file(const std::filesystem::path& path, const Policy& policy, int slots, const Metadata& meta) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_policy(out, policy, slots, meta);
  if (!out) throw IoError("failed writing " + path.string());
}

PolicyFile read_policy(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& why) { throw IoError("policy line " + std::to_string(lineno) + ": " + why); };

  std::string kind;
  int k = -1;
  int slots = -1;
  Metadata meta;
  bool header = false;
  std::vector<Matrix> mats;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto start = line.find_first_not_of("# ");
      const std::string body = start == std::string::npos ? std::string() : line.substr(start);
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = body.substr(0, eq);
      const std::string value = body.substr(eq + 1);
      try {
        if (key == "kind")
          kind = value;
        else if (key == "K")
          k = std::stoi(value);
        else if (key == "N")
          slots = std::stoi(value);
        else
          meta.emplace_back(key, value);
      } catch (const std::exception&) {
        fail("bad header value");
      }
      continue;
    }
    if (!header) {
      if (kind != "uniform" && kind != "positional") fail("missing or unknown kind");
      if (k < 2 || slots < 1) fail("missing K or N");
      const bool positional = kind == "positional";
      if (line != (positional ? "n,i,j,r" : "i,j,r")) fail("unexpected column header");
      mats.assign(positional ? static_cast<std::size_t>(slots) : 1, Matrix::Zero(k, k));
      header = true;
      continue;
    }
    std::istringstream ss(line);
    std::vector<std::string> cells;
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    const bool positional = kind == "positional";
    if (cells.size() != (positional ? 4u : 3u)) fail("wrong number of fields");
    try {
      std::size_t c = 0;
      const int n = positional ? std::stoi(cells[c++]) : 0;
      const int i = std::stoi(cells[c++]);
      const int j = std::stoi(cells[c++]);
      const double r = std::stod(cells[c]);
      if (n < 0 || n >= static_cast<int>(mats.size()) || i < 0 || i >= k || j < 0 || j >= k) fail("index out of range");
      mats[static_cast<std::size_t>(n)](i, j) = r;
    } catch (const IoError&) {
      throw;
    } catch (const std::exception&) {
      fail("unparsable number");
    }
  }
  if (!header) throw IoError("policy file has no data header");
  Policy p = kind == "positional" ? Policy::positional(std::move(mats)) : Policy::uniform(std::move(mats.front()));
  return PolicyFile{std::move(p), slots, std::move(meta)};
}

PolicyFile read_policy_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open policy " + path.string());
  return read_policy(in);
}

}  // namespace nfr
