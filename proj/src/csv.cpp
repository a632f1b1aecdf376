#include "visclim/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace visclim {

std::string fmt17(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("atomic_write: write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string file_header(const std::string& config_hash, const std::string& legend) {
  std::ostringstream os;
  os << "# " << kArtifactVersion << "\n";
  os << "# config_hash=" << config_hash << "\n";
  if (!legend.empty()) os << "# legend: " << legend << "\n";
  return os.str();
}

}  // namespace visclim
