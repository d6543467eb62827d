#pragma once

#include <iosfwd>
#include <string>

#include "csflab/geometry.hpp"

namespace csf {

// Curve CSV: a header line "# closed=true" or "# closed=false", then one "x,y"
// vertex per line written with 17 significant digits so values round-trip exactly.

void write_curve_csv(std::ostream& os, const PolyCurved& curve);
void write_curve_csv(const std::string& path, const PolyCurved& curve);

PolyCurved read_curve_csv(std::istream& is);
PolyCurved read_curve_csv(const std::string& path);

}  // namespace csf
