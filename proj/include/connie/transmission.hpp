// Transmission-time models: the distribution w(t) of the delay between an
// infector's and an infectee's infection times. Three parametric families,
// each with density, CDF, and inverse-CDF sampling.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

#include "connie/io.hpp"
#include "connie/rng.hpp"

namespace connie {

/// w(t) = rate * exp(-rate * t), t >= 0.
struct Exponential {
  double rate = 1.0;
};

/// w(t) = (exponent-1) * t_min^(exponent-1) * t^(-exponent), t >= t_min.
/// The cutoff makes the density proper; below it the density is zero.
struct PowerLaw {
  double exponent = 2.0;
  double t_min = 1.0;
};

/// w(t) = (shape/scale) * (t/scale)^(shape-1) * exp(-(t/scale)^shape), t >= 0.
struct Weibull {
  double scale = 1.0;
  double shape = 1.0;
};

using TransmissionModel = std::variant<Exponential, PowerLaw, Weibull>;

inline void validate_model(const TransmissionModel& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Exponential>) {
          if (!(m.rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
        } else if constexpr (std::is_same_v<T, PowerLaw>) {
          if (!(m.exponent > 1.0)) throw std::invalid_argument("powerlaw: exponent must be > 1");
          if (!(m.t_min > 0.0)) throw std::invalid_argument("powerlaw: t_min must be > 0");
        } else {
          if (!(m.scale > 0.0)) throw std::invalid_argument("weibull: scale must be > 0");
          if (!(m.shape > 0.0)) throw std::invalid_argument("weibull: shape must be > 0");
        }
      },
      model);
}

/// Probability density at t; zero outside the support.
inline double density(const TransmissionModel& model, double t) {
  return std::visit(
      [t](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Exponential>) {
          if (t < 0.0) return 0.0;
          return m.rate * std::exp(-m.rate * t);
        } else if constexpr (std::is_same_v<T, PowerLaw>) {
          if (t < m.t_min) return 0.0;
          return (m.exponent - 1.0) * std::pow(m.t_min, m.exponent - 1.0) *
                 std::pow(t, -m.exponent);
        } else {
          if (t < 0.0) return 0.0;
          double z = t / m.scale;
          return (m.shape / m.scale) * std::pow(z, m.shape - 1.0) *
                 std::exp(-std::pow(z, m.shape));
        }
      },
      model);
}

/// P(delay <= t).
inline double cdf(const TransmissionModel& model, double t) {
  return std::visit(
      [t](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Exponential>) {
          if (t <= 0.0) return 0.0;
          return -std::expm1(-m.rate * t);
        } else if constexpr (std::is_same_v<T, PowerLaw>) {
          if (t <= m.t_min) return 0.0;
          return 1.0 - std::pow(t / m.t_min, 1.0 - m.exponent);
        } else {
          if (t <= 0.0) return 0.0;
          return -std::expm1(-std::pow(t / m.scale, m.shape));
        }
      },
      model);
}

/// One inverse-CDF draw; strictly positive (power law returns >= t_min).
inline double sample_delay(const TransmissionModel& model, rng_t& rng) {
  const double u = uniform_open01(rng);
  return std::visit(
      [u](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Exponential>) {
          return -std::log1p(-u) / m.rate;
        } else if constexpr (std::is_same_v<T, PowerLaw>) {
          return m.t_min * std::pow(1.0 - u, -1.0 / (m.exponent - 1.0));
        } else {
          return m.scale * std::pow(-std::log1p(-u), 1.0 / m.shape);
        }
      },
      model);
}

/// Parses the CLI grammar `name:param1[,param2]`:
///   exp:<rate> | powerlaw:<exponent>[,<t_min>] | weibull:<scale>,<shape>
inline TransmissionModel parse_model(const std::string& text) {
  auto bad = [&](const std::string& why) {
    return std::invalid_argument("transmission model '" + text + "': " + why);
  };
  std::size_t colon = text.find(':');
  if (colon == std::string::npos) throw bad("expected 'name:params'");
  std::string name = text.substr(0, colon);
  std::vector<double> params;
  std::string_view rest = std::string_view(text).substr(colon + 1);
  while (!rest.empty()) {
    std::size_t comma = rest.find(',');
    std::string_view tok = rest.substr(0, comma);
    double v = 0.0;
    if (!detail::parse_double(tok, v)) throw bad("malformed parameter");
    params.push_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }

  TransmissionModel model;
  if (name == "exp" || name == "exponential") {
    if (params.size() != 1) throw bad("exp takes one parameter (rate)");
    model = Exponential{params[0]};
  } else if (name == "powerlaw" || name == "pl") {
    if (params.size() == 1)
      model = PowerLaw{params[0], 1.0};
    else if (params.size() == 2)
      model = PowerLaw{params[0], params[1]};
    else
      throw bad("powerlaw takes exponent[,t_min]");
  } else if (name == "weibull" || name == "wb") {
    if (params.size() != 2) throw bad("weibull takes scale,shape");
    model = Weibull{params[0], params[1]};
  } else {
    throw bad("unknown model name (expected exp, powerlaw, or weibull)");
  }
  validate_model(model);
  return model;
}

inline std::string model_name(const TransmissionModel& model) {
  if (std::holds_alternative<Exponential>(model)) return "exponential";
  if (std::holds_alternative<PowerLaw>(model)) return "powerlaw";
  return "weibull";
}

} // namespace connie
