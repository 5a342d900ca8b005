#pragma once

#include "mlgate/gate.hpp"

// Closed-form ("built-in") activations, the references the gated presets are
// checked against. Both bipolar sigmoid presets map to tanh(x/2).
namespace mlgate::builtin {

double value(gate::Preset id, double x, double swish_c = 1.0);
double deriv(gate::Preset id, double x, double swish_c = 1.0);

}  // namespace mlgate::builtin
