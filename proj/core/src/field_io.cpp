#include <cstdint>
#include <cstring>
#include <fstream>

#include "capflow/epsilon_solver.hpp"
#include "capflow/error.hpp"

namespace capflow {

namespace {

constexpr char kMagic[8] = {'C', 'A', 'P', 'F', 'L', 'D', '1', '\0'};

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw ParseError("truncated field file", 0);
  return v;
}

}  // namespace

void write_field(const GridField& field, const std::filesystem::path& binary,
                 const std::filesystem::path& sidecar, const std::vector<std::string>& header_lines) {
  std::ofstream os(binary, std::ios::binary);
  if (!os) throw Error("cannot open " + binary.string() + " for writing");
  const Lattice& L = field.lattice;
  os.write(kMagic, sizeof kMagic);
  for (int d = 0; d < 3; ++d) put<std::int32_t>(os, L.n[d]);
  for (int d = 0; d < 3; ++d) put<double>(os, L.origin[d]);
  for (double v : {L.h, field.p, field.eps, field.T, field.r_in, field.r_out}) put<double>(os, v);
  put<std::uint8_t>(os, field.octant ? 1 : 0);
  os.write(reinterpret_cast<const char*>(field.u.data()),
           static_cast<std::streamsize>(field.u.size() * sizeof(double)));
  os.write(reinterpret_cast<const char*>(field.state.data()),
           static_cast<std::streamsize>(field.state.size()));
  if (!os) throw Error("failed writing " + binary.string());

  std::ofstream meta(sidecar);
  if (!meta) throw Error("cannot open " + sidecar.string() + " for writing");
  for (const auto& line : header_lines) meta << "# " << line << '\n';
  meta.precision(17);
  meta << "nx=" << L.n[0] << "\nny=" << L.n[1] << "\nnz=" << L.n[2] << '\n';
  meta << "origin=" << L.origin[0] << ',' << L.origin[1] << ',' << L.origin[2] << '\n';
  meta << "h=" << L.h << "\np=" << field.p << "\neps=" << field.eps << "\nT=" << field.T << '\n';
  meta << "r_in=" << field.r_in << "\nr_out=" << field.r_out << '\n';
  meta << "metric=" << field.metric.describe() << '\n';
  meta << "sweeps=" << field.log.sweeps << "\nlinear_iterations=" << field.log.linear_iterations
       << "\nconverged=" << (field.log.converged ? 1 : 0) << '\n';
  if (!field.log.residual_history.empty()) {
    meta << "final_residual=" << field.log.residual_history.back() << '\n';
  }
}

GridField read_field(const std::filesystem::path& binary, const MetricSpec& metric) {
  std::ifstream is(binary, std::ios::binary);
  if (!is) throw Error("cannot open " + binary.string());
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw ParseError("not a capflow field file: " + binary.string(), 0);
  }
  GridField f;
  for (int d = 0; d < 3; ++d) {
    f.lattice.n[d] = get<std::int32_t>(is);
    if (f.lattice.n[d] <= 0) throw ParseError("invalid lattice size in field file", 0);
  }
  for (int d = 0; d < 3; ++d) f.lattice.origin[d] = get<double>(is);
  f.lattice.h = get<double>(is);
  f.p = get<double>(is);
  f.eps = get<double>(is);
  f.T = get<double>(is);
  f.r_in = get<double>(is);
  f.r_out = get<double>(is);
  f.octant = get<std::uint8_t>(is) != 0;
  f.metric = metric;
  const size_t n = f.lattice.size();
  f.u.resize(n);
  f.state.resize(n);
  if (!is.read(reinterpret_cast<char*>(f.u.data()), static_cast<std::streamsize>(n * sizeof(double))) ||
      !is.read(reinterpret_cast<char*>(f.state.data()), static_cast<std::streamsize>(n))) {
    throw ParseError("truncated field file", 0);
  }
  for (auto s : f.state) {
    if (static_cast<std::uint8_t>(s) > static_cast<std::uint8_t>(NodeState::Outside)) {
      throw ParseError("invalid node state in field file", 0);
    }
  }
  f.log.converged = true;
  return f;
}

}  // namespace capflow
