#include "maxlrt/weights.hpp"

#include <cmath>
#include <sstream>

#include "maxlrt/errors.hpp"
#include "maxlrt/text.hpp"

namespace maxlrt {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double crossing(double theta, double u) { return u <= theta ? (u - theta) / theta : (u - theta) / (1.0 - theta); }

}  // namespace

void validate(const WeightSpec& spec) {
  std::visit(Overloaded{[](const Constant&) {},
                        [](const RhoGamma& w) {
                          if (!(w.rho >= 0 && w.gamma >= 0)) throw DomainError("rho and gamma must be >= 0");
                        },
                        [](const Crossing& w) {
                          if (!(w.theta > 0 && w.theta < 1)) throw DomainError("theta must lie in (0, 1)");
                        }},
             spec);
}

double eval_weight(const WeightSpec& spec, double u) {
  validate(spec);
  if (!(u >= 0.0 && u < 1.0)) throw DomainError("weight argument must lie in [0, 1)");
  return std::visit(Overloaded{[](const Constant&) { return 1.0; },
                               [u](const RhoGamma& w) { return std::pow(1.0 - u, w.rho) * std::pow(u, w.gamma); },
                               [u](const Crossing& w) { return crossing(w.theta, u); }},
                    spec);
}

Eigen::ArrayXd eval_weight(const WeightSpec& spec, const Eigen::ArrayXd& u) {
  validate(spec);
  if (u.size() && !((u >= 0.0) && (u < 1.0)).all()) throw DomainError("weight argument must lie in [0, 1)");
  return std::visit(
      Overloaded{[&](const Constant&) -> Eigen::ArrayXd { return Eigen::ArrayXd::Ones(u.size()); },
                 [&](const RhoGamma& w) -> Eigen::ArrayXd { return (1.0 - u).pow(w.rho) * u.pow(w.gamma); },
                 [&](const Crossing& w) -> Eigen::ArrayXd {
                   return (u <= w.theta).select((u - w.theta) / w.theta, (u - w.theta) / (1.0 - w.theta));
                 }},
      spec);
}

Eigen::ArrayXXd eval_weights(const WeightSet& set, const Eigen::ArrayXd& u) {
  Eigen::ArrayXXd out(u.size(), static_cast<Eigen::Index>(set.specs.size()));
  for (std::size_t k = 0; k < set.specs.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = eval_weight(set.specs[k], u);
  return out;
}

WeightSet builtin_set(std::string_view raw) {
  const std::string name = trim(raw);
  if (name == "logrank") return {name, {Constant{}}};
  if (name == "fh11") return {name, {RhoGamma{1, 1}}};
  if (name == "maxcombo") return {name, {Constant{}, RhoGamma{0, 1}, RhoGamma{1, 0}, RhoGamma{1, 1}}};
  if (name == "projection-crossing") return {name, {Constant{}, RhoGamma{0, 1}, Crossing{0.5}}};

  constexpr std::string_view prefix = "phi-star(";
  if (name.starts_with(prefix) && name.ends_with(")")) {
    const auto inner = std::string_view(name).substr(prefix.size(), name.size() - prefix.size() - 1);
    std::vector<double> thetas;
    for (const auto& field : split(inner, ',')) {
      const auto value = parse_double(field);
      if (!value) throw LookupError("unknown weight set: " + name);
      thetas.push_back(*value);
    }
    WeightSet set{name, {}};
    if (thetas.size() == 1) {
      set.specs = {Constant{}, RhoGamma{0, 1}, RhoGamma{1, 0}, Crossing{thetas[0]}};
    } else if (thetas.size() >= 2 && thetas.size() < kMaxWeights) {
      set.specs.push_back(Constant{});
      for (double t : thetas) set.specs.push_back(Crossing{t});
    } else {
      throw LookupError("unknown weight set: " + name);
    }
    for (const auto& spec : set.specs) validate(spec);
    return set;
  }
  throw LookupError("unknown weight set: " + name);
}

std::string to_string(const WeightSpec& spec) {
  std::ostringstream out;
  std::visit(Overloaded{[&](const Constant&) { out << "1"; },
                        [&](const RhoGamma& w) { out << "G(" << w.rho << "," << w.gamma << ")"; },
                        [&](const Crossing& w) { out << "crossing(" << w.theta << ")"; }},
             spec);
  return out.str();
}

}  // namespace maxlrt
