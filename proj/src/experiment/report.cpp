#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mmx/experiment.hpp"

namespace mmx {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  // shortest text that reads back to the same double
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string csv_header() {
  return "run_id,family,k,lambda,mu,rho,D,eps,algorithm,T,eps_star,moreau_grad_surrogate,moreau_grad_true,"
         "certified,regime,wall_ms,seed,config_hash,schema_version,lib_version\n";
}

namespace {

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const char* yes(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string csv_line(const ResultRow& r, std::uint64_t config_hash, bool timing) {
  std::ostringstream os;
  os << r.run_id << ',' << r.family << ',' << r.k << ',' << format_double(r.lambda) << ',' << format_double(r.mu)
     << ',' << format_double(r.rho) << ',' << format_double(r.D) << ',' << format_double(r.eps) << ','
     << r.algorithm << ',' << r.T << ',' << format_double(r.eps_star) << ','
     << format_double(r.moreau_grad_surrogate) << ',' << format_double(r.moreau_grad_true) << ','
     << yes(r.certified) << ',' << r.regime << ',' << (timing ? format_double(r.wall_ms) : "0") << ',' << r.seed
     << ',' << hex64(config_hash) << ',' << kSchemaVersion << ',' << MMX_VERSION_STRING << '\n';
  return os.str();
}

std::string krylov_csv_header() {
  return "run_id,d,m,R,q,gap,bound,within_bound,m_used,hvp_calls,seed,config_hash,schema_version,lib_version\n";
}

std::string krylov_csv_line(const KrylovRow& r, std::uint64_t config_hash) {
  std::ostringstream os;
  os << r.run_id << ',' << r.d << ',' << r.m << ',' << format_double(r.R) << ',' << format_double(r.q) << ','
     << format_double(r.gap) << ',' << format_double(r.bound) << ',' << yes(r.within_bound) << ',' << r.m_used
     << ',' << r.hvp_calls << ',' << r.seed << ',' << hex64(config_hash) << ',' << kSchemaVersion << ','
     << MMX_VERSION_STRING << '\n';
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  if (ec) throw Error(ErrorKind::io, "cannot create directory for '" + path + "': " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorKind::io, "write failed for '" + path + "'");
}

}  // namespace mmx
