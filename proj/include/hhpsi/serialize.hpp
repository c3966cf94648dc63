#pragma once

#include <json.hpp>

#include "hhpsi/regime.hpp"
#include "hhpsi/support.hpp"

namespace hhpsi {

/// Numeric "a+bi" rendering of an exact quadratic-field element.
std::string quad_to_literal(const QuadExt& q);

/// Regime report as JSON.  Field names are part of the CLI contract:
/// case, alpha, alphaBar, resonances, discriminant, viable, n.
nlohmann::json to_json(const RegimeReport& report);

} // namespace hhpsi
