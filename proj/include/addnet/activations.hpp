#pragma once

#include <cmath>

#include "addnet/common.hpp"

namespace addnet {

enum class Activation { Identity, ReLU, Tanh, Sigmoid };

inline double activate(Activation f, double s) {
    switch (f) {
        case Activation::Identity: return s;
        case Activation::ReLU: return s > 0.0 ? s : 0.0;
        case Activation::Tanh: return std::tanh(s);
        case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-s));
    }
    throw ParamError("activate: unknown activation");
}

// Derivative evaluated at the pre-activation s.  ReLU'(0) = 0.
inline double activate_deriv(Activation f, double s) {
    switch (f) {
        case Activation::Identity: return 1.0;
        case Activation::ReLU: return s > 0.0 ? 1.0 : 0.0;
        case Activation::Tanh: {
            const double t = std::tanh(s);
            return 1.0 - t * t;
        }
        case Activation::Sigmoid: {
            const double p = 1.0 / (1.0 + std::exp(-s));
            return p * (1.0 - p);
        }
    }
    throw ParamError("activate_deriv: unknown activation");
}

const char* activation_name(Activation f);
Activation activation_from_name(const std::string& name);

}  // namespace addnet
