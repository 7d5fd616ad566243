#include "hyperdp/reconcile.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "hyperdp/error.hpp"

namespace hyperdp {

namespace {

Assignment project(const Assignment& x, const std::vector<std::size_t>& pos) {
  Assignment out;
  out.reserve(pos.size());
  for (std::size_t p : pos) out.push_back(x[p]);
  return out;
}

// μ and λ split by separator value, ready for pointwise gluing.
struct Overlap {
  ProductSpace joint;
  std::map<Assignment, std::vector<std::pair<Assignment, double>>> mu_by_c;      // c -> (x_A, μ)
  std::map<Assignment, std::vector<std::pair<Assignment, double>>> lambda_by_c;  // c -> (x_B', λ)
  std::map<Assignment, double> mu_c, lambda_c;
  double mu_total = 0.0, lambda_total = 0.0;
};

Overlap split(const DiscreteMeasure& mu, const DiscreteMeasure& lambda) {
  const auto shared = shared_variables(mu.space(), lambda.space());
  std::vector<std::string> rest;
  for (const auto& v : lambda.space().variables()) {
    if (!mu.space().find(v)) rest.push_back(v);
  }
  std::vector<std::string> vars = mu.space().variables();
  std::vector<std::vector<std::string>> doms = mu.space().domains();
  for (const auto& v : rest) {
    vars.push_back(v);
    doms.push_back(lambda.space().domain(lambda.space().index_of(v)));
  }
  Overlap o{ProductSpace(std::move(vars), std::move(doms)), {}, {}, {}, {}, 0.0, 0.0};
  const auto mc = mu.space().positions(shared);
  for (const auto& [x, m] : mu.points()) {
    Assignment c = project(x, mc);
    o.mu_by_c[c].emplace_back(x, m);
    o.mu_c[c] += m;
    o.mu_total += m;
  }
  const auto lc = lambda.space().positions(shared);
  const auto lr = lambda.space().positions(rest);
  for (const auto& [x, m] : lambda.points()) {
    Assignment c = project(x, lc);
    o.lambda_by_c[c].emplace_back(project(x, lr), m);
    o.lambda_c[c] += m;
    o.lambda_total += m;
  }
  if (!(o.mu_total > 0.0) || !(o.lambda_total > 0.0)) {
    throw Error(ErrorCode::ZeroMass, "reconciliation needs measures with positive mass");
  }
  return o;
}

double lookup(const std::map<Assignment, double>& m, const Assignment& c) {
  auto it = m.find(c);
  return it == m.end() ? 0.0 : it->second;
}

// α(x_A, x_B') = f(c) μ(x_A) λ(c, x_B') for every separator value c with
// separator_weight(c) > 0, where both μ_C(c) and λ_C(c) must be positive.
template <class Factor>
DiscreteMeasure glue(const Overlap& o, const std::map<Assignment, double>& driver, const char* what, Factor&& factor) {
  DiscreteMeasure out(o.joint);
  Assignment full;
  for (const auto& [c, weight] : driver) {
    if (!(weight > 0.0)) continue;
    auto mu_it = o.mu_by_c.find(c);
    auto la_it = o.lambda_by_c.find(c);
    if (mu_it == o.mu_by_c.end() || la_it == o.lambda_by_c.end()) {
      throw Error(ErrorCode::ZeroConditional, std::string(what) + ": separator value has mass on one side only");
    }
    const double f = factor(c);
    for (const auto& [xa, m] : mu_it->second) {
      for (const auto& [xr, l] : la_it->second) {
        full = xa;
        full.insert(full.end(), xr.begin(), xr.end());
        out.add(full, f * m * l);
      }
    }
  }
  return out;
}

}  // namespace

ReconcileStrategy ReconcileStrategy::parse(std::string_view name, std::optional<double> gamma) {
  ReconcileStrategy s;
  if (name == "rescale-min") s.kind = ReconcileKind::RescaleMin;
  else if (name == "rescale-convex") s.kind = ReconcileKind::RescaleConvex;
  else if (name == "condition-a") s.kind = ReconcileKind::ConditionOnA;
  else if (name == "condition-b") s.kind = ReconcileKind::ConditionOnB;
  else if (name == "average") s.kind = ReconcileKind::WeightedAverage;
  else if (name == "kl") s.kind = ReconcileKind::KlCompromise;
  else throw Error(ErrorCode::InvalidArgument, "unknown strategy '" + std::string(name) + "'");
  s.gamma = gamma;
  s.validate();
  return s;
}

void ReconcileStrategy::validate() const {
  const bool takes_gamma = kind == ReconcileKind::RescaleConvex || kind == ReconcileKind::WeightedAverage;
  if (gamma && !takes_gamma) {
    throw Error(ErrorCode::InvalidArgument, "strategy " + std::string(strategy_name(kind)) + " takes no gamma");
  }
  if (kind == ReconcileKind::RescaleConvex && !gamma) {
    throw Error(ErrorCode::InvalidArgument, "rescale-convex requires gamma");
  }
  if (gamma && !(*gamma >= 0.0 && *gamma <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "gamma must lie in [0, 1]");
  }
}

std::string_view strategy_name(ReconcileKind kind) noexcept {
  switch (kind) {
    case ReconcileKind::RescaleMin: return "rescale-min";
    case ReconcileKind::RescaleConvex: return "rescale-convex";
    case ReconcileKind::ConditionOnA: return "condition-a";
    case ReconcileKind::ConditionOnB: return "condition-b";
    case ReconcileKind::WeightedAverage: return "average";
    case ReconcileKind::KlCompromise: return "kl";
  }
  return "unknown";
}

std::pair<DiscreteMeasure, DiscreteMeasure> rescale(const DiscreteMeasure& mu, const DiscreteMeasure& lambda,
                                                    const ReconcileStrategy& strategy) {
  strategy.validate();
  const auto report = is_consistent(mu, lambda);
  if (!report.proportional) {
    throw Error(ErrorCode::ConditionViolated,
                "overlap marginals are not proportional; apply a shape strategy first");
  }
  const double tm = mu.total();
  const double tl = lambda.total();
  double target = 0.0;
  switch (strategy.kind) {
    case ReconcileKind::RescaleMin: target = std::min(tm, tl); break;
    case ReconcileKind::RescaleConvex: target = *strategy.gamma * tm + (1.0 - *strategy.gamma) * tl; break;
    default: throw Error(ErrorCode::InvalidArgument, "not a rescaling strategy");
  }
  if (tm == tl) return {mu, lambda};
  return {scale(mu, target / tm), scale(lambda, target / tl)};
}

DiscreteMeasure complete_via(const DiscreteMeasure& mu, const DiscreteMeasure& lambda, Side side) {
  const Overlap o = split(mu, lambda);
  if (side == Side::A) {
    return glue(o, o.mu_c, "completion via A", [&](const Assignment& c) { return 1.0 / o.lambda_c.at(c); });
  }
  return glue(o, o.lambda_c, "completion via B", [&](const Assignment& c) { return 1.0 / o.mu_c.at(c); });
}

double mass_weighted_gamma(const DiscreteMeasure& mu, const DiscreteMeasure& lambda) {
  const double tm = mu.total();
  const double tl = lambda.total();
  if (!(tm + tl > 0.0)) throw Error(ErrorCode::ZeroMass, "both measures are zero");
  return tm / (tm + tl);
}

DiscreteMeasure weighted_average(const DiscreteMeasure& mu, const DiscreteMeasure& lambda, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error(ErrorCode::InvalidArgument, "gamma must lie in [0, 1]");
  const DiscreteMeasure a = complete_via(mu, lambda, Side::A);
  const DiscreteMeasure b = complete_via(mu, lambda, Side::B);
  DiscreteMeasure out(a.space());
  for (const auto& [x, m] : a.points()) out.add(x, gamma * m);
  for (const auto& [x, m] : b.points()) out.add(x, (1.0 - gamma) * m);
  return out;
}

double summed_kl(const DiscreteMeasure& p, const DiscreteMeasure& r, const DiscreteMeasure& q) {
  auto kl = [&](const DiscreteMeasure& a) {
    double s = 0.0;
    for (const auto& [x, m] : a.points()) {
      const double qx = q.at(x);
      if (qx <= 0.0) return std::numeric_limits<double>::infinity();
      s += m * std::log(m / qx);
    }
    return s;
  };
  return kl(p) + kl(r);
}

DiscreteMeasure kl_separator_compromise(const DiscreteMeasure& mu, const DiscreteMeasure& lambda) {
  const auto shared = shared_variables(mu.space(), lambda.space());
  const DiscreteMeasure mc = normalize(marginalize(mu, shared));
  const DiscreteMeasure lc = normalize(marginalize(lambda, shared));
  DiscreteMeasure out(mc.space());
  for (const auto& [c, m] : mc.points()) out.add(c, 0.5 * m);
  for (const auto& [c, m] : lc.points()) out.add(c, 0.5 * m);
  return out;
}

DiscreteMeasure kl_compromise(const DiscreteMeasure& mu, const DiscreteMeasure& lambda) {
  const Overlap o = split(mu, lambda);
  const DiscreteMeasure alpha_c = kl_separator_compromise(mu, lambda);
  std::map<Assignment, double> driver;
  for (const auto& [c, m] : alpha_c.points()) driver[c] = m;
  return glue(o, driver, "KL compromise", [&](const Assignment& c) {
    return lookup(driver, c) / (lookup(o.mu_c, c) * lookup(o.lambda_c, c));
  });
}

}  // namespace hyperdp
