#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace maxlrt {

/// w(u) = 1, the logrank weight.
struct Constant {};

/// Fleming-Harrington G^{rho,gamma}: w(u) = (1-u)^rho * u^gamma with u the
/// pooled KM CDF, i.e. S^rho (1-S)^gamma.
struct RhoGamma {
  double rho = 0;
  double gamma = 0;
};

/// Crossing weight: linear from -1 at u=0 to 0 at u=theta, then to +1 at u=1.
struct Crossing {
  double theta = 0.5;
};

using WeightSpec = std::variant<Constant, RhoGamma, Crossing>;

struct WeightSet {
  std::string name;
  std::vector<WeightSpec> specs;
};

inline constexpr std::size_t kMaxWeights = 8;

/// Throws DomainError on invalid parameters.
void validate(const WeightSpec& spec);

/// Throws DomainError unless 0 <= u < 1.
double eval_weight(const WeightSpec& spec, double u);

/// Elementwise weight over a column of pooled CDF values.
Eigen::ArrayXd eval_weight(const WeightSpec& spec, const Eigen::ArrayXd& u);

/// Columns are the weights of `set` evaluated at `u`.
Eigen::ArrayXXd eval_weights(const WeightSet& set, const Eigen::ArrayXd& u);

/// logrank, fh11, maxcombo, projection-crossing, phi-star(t) and
/// phi-star(t1,t2,...). Throws LookupError for anything else.
WeightSet builtin_set(std::string_view name);

std::string to_string(const WeightSpec& spec);

}  // namespace maxlrt
