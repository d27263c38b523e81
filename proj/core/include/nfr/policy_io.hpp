#pragma once

// Policy CSV files.
//
//   # nfr-policy v1
//   # kind=uniform            (or positional)
//   # K=5
//   # N=2
//   # <key>=<value>           (free-form metadata)
//   i,j,r                     (or n,i,j,r)
//   0,1,1
//
// Only nonzero entries are written, with 17 significant digits.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nfr/model.hpp"

namespace nfr {

using Metadata = std::vector<std::pair<std::string, std::string>>;

void write_policy(std::ostream& out, const Policy& policy, int slots, const Metadata& meta = {});
void write_policy_file(const std::filesystem::path& path, const Policy& policy, int slots,
                       const Metadata& meta = {});

struct PolicyFile {
  Policy policy;
  int slots;
  Metadata meta;  ///< the free-form entries, in file order
};

/// Throws IoError on malformed input.
PolicyFile read_policy(std::istream& in);
PolicyFile read_policy_file(const std::filesystem::path& path);

}  // namespace nfr
