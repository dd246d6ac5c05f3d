#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "capflow/functional.hpp"
#include "capflow/identities.hpp"
#include "capflow/mass.hpp"
#include "capflow/radial.hpp"

namespace capflow {

/// Library version, e.g. "0.1.0".
const char* version_string();

/// Provenance written as '#'-prefixed lines at the top of every output file.
struct OutputMeta {
  std::string config_hash;
  std::vector<std::string> extra;
  std::vector<std::string> header_lines() const;
};

/// Shortest decimal text that round-trips the double.
std::string format_number(double v);

void write_header(std::ostream& os, const OutputMeta& meta);

void write_potential_csv(const RadialPotential& pot, std::ostream& os, const OutputMeta& meta,
                         int stride = 1);
void write_scan_csv(const MonotonicityReport& rep, std::ostream& os, const OutputMeta& meta);
/// F, M, Q against log t with an optional horizontal reference (8 pi m_ADM).
void write_scan_svg(const MonotonicityReport& rep, std::optional<double> reference,
                    std::ostream& os, const OutputMeta& meta);
void write_penrose_csv(const PenroseReport& rep, std::ostream& os, const OutputMeta& meta);
/// Human-readable summary; the last line is PenroseReport::verdict_line().
void write_penrose_summary(const PenroseReport& rep, std::ostream& os, const OutputMeta& meta);
void write_adm_csv(const AdmEstimate& est, std::ostream& os, const OutputMeta& meta);
void write_identity_csv(const std::vector<PointIdentities>& rows, std::ostream& os,
                        const OutputMeta& meta);

}  // namespace capflow
