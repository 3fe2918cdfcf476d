#include "kms/classify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "kms/errors.hpp"

namespace kms {

namespace {

std::string format_beta(double b) {
  std::ostringstream os;
  os.precision(12);
  os << b;
  return os.str();
}

std::vector<double> default_betas(WeightRange range, const std::optional<Beta0Result>& b0) {
  switch (range) {
    case WeightRange::all_reals:
      return {-1.0, 0.0, 1.0};
    case WeightRange::singleton:
      return {b0->value};
    case WeightRange::half_line:
      return {b0->value, b0->value + 0.1, b0->value + 1.0};
    case WeightRange::undetermined:
      if (b0) return {b0->value};
      return {};
  }
  throw std::logic_error("unknown weight range");
}

BetaSample eval_sample(const GraphFamily& family, double beta, const ClassifyOptions& options,
                       const PeriodResult& d, const DPrimeResult& d_prime,
                       const std::optional<Beta0Result>& b0) {
  BetaSample s;
  s.beta = beta;
  try {
    FamilySolveOptions so;
    so.beta = beta;
    so.depth = options.depth;
    auto sols = solve_family(family, so);
    s.ray_count = sols.size();
    for (const auto& sol : sols) s.worst_residual = std::max(s.worst_residual, verify(sol).residual);
    s.state = state_check(family, sols.front());
    if (family.kind() == GraphFamily::Kind::arms && b0 && beta > b0->value + options.tol) {
      int k = family.arm_count();
      double excess = std::exp(beta) - k * arms_floor(beta);
      s.note = "total tip mass exceeds " + std::to_string(k) + " floors by " +
               std::to_string(excess) + "; every mixture places some arm above the floor, "
               "so no solution at this beta normalizes";
    }
    if (family.kind() == GraphFamily::Kind::lattice_walk) {
      auto rs = ray_structure(family.walk(), beta);
      if (!s.note.empty()) s.note += "; ";
      s.note += rs.description;
    }
  } catch (const InfeasibleError& e) {
    s.feasible = false;
    s.note = e.what();
  } catch (const NonConvergenceError& e) {
    s.feasible = false;
    s.note = std::string("not resolved: ") + e.what();
  } catch (const std::invalid_argument& e) {
    // Solver inapplicable to this graph shape (e.g. not strongly connected):
    // keep the structural half of the report and record the failure.
    s.feasible = false;
    s.note = std::string("not solved: ") + e.what();
  }
  s.factor = factor_type(d, d_prime, beta);
  return s;
}

}  // namespace

std::string to_string(WeightRange r) {
  switch (r) {
    case WeightRange::all_reals: return "all-reals";
    case WeightRange::singleton: return "singleton";
    case WeightRange::half_line: return "half-line";
    case WeightRange::undetermined: return "undetermined";
  }
  throw std::logic_error("unknown weight range");
}

InvariantReport classify(const GraphFamily& family, const ClassifyOptions& options) {
  InvariantReport rep;
  rep.family = family.label();
  rep.structure = non_wandering(family, std::max(8, options.period_depth));

  if (family.is_explicit_finite() || family.kind() == GraphFamily::Kind::rose) {
    rep.cofinal = is_cofinal(family.truncation(1));
  } else {
    rep.cofinal = family.traits().cofinal;
  }

  PeriodOptions po;
  po.depth = options.period_depth;
  rep.d = period_d(family, po);
  DPrimeOptions dpo;
  dpo.depth = options.period_depth;
  rep.d_prime = d_prime_search(family, dpo);
  if (!rep.d_prime.notes.empty()) rep.notes.push_back(rep.d_prime.notes);

  // Critical value. For lattice walks the minimized moment generating
  // function is exact and the windowed spectral estimate is only a
  // cross-check; every other family goes through the spectral route.
  if (rep.structure.nw_class != NwClass::empty) {
    if (family.kind() == GraphFamily::Kind::lattice_walk) {
      rep.mgf = minimize_mgf(family.walk());
      Beta0Result b;
      b.value = rep.mgf->beta0;
      b.method = Beta0Method::mgf_minimum;
      b.converged = true;
      b.notes = "log of the minimized moment generating function";
      rep.beta0 = b;
      rep.truncation_crosscheck = beta0(family);
      rep.spectral_gap = std::abs(rep.truncation_crosscheck->value - b.value);
    } else {
      try {
        rep.beta0 = beta0(family);
      } catch (const EmptyNonWanderingError&) {
        // fall through: no cycles in the window either
      }
    }
  }

  // Weight range by the non-wandering trichotomy; it needs cofinality.
  if (!rep.cofinal.has_value() || !*rep.cofinal) {
    rep.weight_range = WeightRange::undetermined;
    rep.weight_range_text = "undetermined (cofinality not established)";
    rep.notes.push_back("the non-wandering trichotomy assumes a cofinal graph");
  } else {
    switch (rep.structure.nw_class) {
      case NwClass::empty:
        rep.weight_range = WeightRange::all_reals;
        rep.weight_range_text = "all real beta";
        break;
      case NwClass::nonempty_finite:
        rep.weight_range = WeightRange::singleton;
        rep.weight_range_text = "{" + format_beta(rep.beta0->value) + "}";
        break;
      case NwClass::nonempty_infinite:
        rep.weight_range = WeightRange::half_line;
        rep.weight_range_text = "[" + format_beta(rep.beta0->value) + ", inf)";
        break;
      case NwClass::undetermined:
        rep.weight_range = WeightRange::undetermined;
        rep.weight_range_text = "undetermined (non-wandering class unknown)";
        break;
    }
  }

  // Uniqueness at the critical value.
  if (rep.beta0) {
    if (family.kind() == GraphFamily::Kind::lattice_walk) {
      double drift_norm = 0.0;
      for (double x : rep.mgf->drift) drift_norm = std::max(drift_norm, std::abs(x));
      rep.uniqueness_at_beta0 = "unique-ray";
      if (drift_norm <= options.tol) {
        rep.notes.push_back(
            "zero step drift: the level set at beta0 degenerates to c_min and the walk "
            "is recurrent in dimension <= 2; the unique-ray conclusion is reported from "
            "that dichotomy, not recomputed");
      } else {
        rep.notes.push_back(
            "nonzero step drift: the walk is transient, exponentials exhaust the extreme "
            "rays, and the level set at beta0 is the single point c_min");
      }
      rep.recurrence_at_beta0 = recurrence_test(family, rep.beta0->value);
    } else {
      rep.recurrence_at_beta0 = recurrence_test(family, rep.beta0->value);
      if (rep.recurrence_at_beta0->divergent) {
        rep.uniqueness_at_beta0 = "unique-ray";
      } else {
        rep.uniqueness_at_beta0 = "undetermined";
        rep.notes.push_back("the return series still looks convergent at depth " +
                            std::to_string(rep.recurrence_at_beta0->n_max) +
                            "; uniqueness at beta0 left open");
      }
    }
  }

  // Inverse temperature samples.
  std::vector<double> betas = options.betas;
  if (betas.empty()) {
    betas = default_betas(rep.weight_range, rep.beta0);
    if (rep.weight_range == WeightRange::all_reals)
      rep.notes.push_back("default sample grid {-1, 0, 1} probes both signs of beta");
  }
  rep.samples.resize(betas.size());
  int jobs = std::max(1, options.jobs);
  if (jobs == 1 || betas.size() <= 1) {
    for (std::size_t i = 0; i < betas.size(); ++i)
      rep.samples[i] = eval_sample(family, betas[i], options, rep.d, rep.d_prime, rep.beta0);
  } else {
    std::vector<std::exception_ptr> errors(betas.size());
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = static_cast<std::size_t>(t); i < betas.size();
             i += static_cast<std::size_t>(jobs)) {
          try {
            rep.samples[i] = eval_sample(family, betas[i], options, rep.d, rep.d_prime, rep.beta0);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  // State range in closed form where the family admits one, otherwise from
  // the sampled checks.
  switch (family.kind()) {
    case GraphFamily::Kind::ladder:
      rep.state_range_text = "beta < " + format_beta(ladder_state_threshold());
      break;
    case GraphFamily::Kind::arms:
      rep.state_range_text =
          "{" + format_beta(rep.beta0->value) + "} (all arms on the geometric floor)";
      break;
    case GraphFamily::Kind::lattice_walk:
      rep.state_range_text = "none (exponential vertex masses never sum over the lattice)";
      break;
    default: {
      if (rep.weight_range == WeightRange::singleton) {
        rep.state_range_text = "{" + format_beta(rep.beta0->value) + "}";
      } else {
        std::string acc;
        for (const auto& s : rep.samples)
          if (s.feasible && s.state && s.state->is_state)
            acc += (acc.empty() ? "" : ", ") + format_beta(s.beta);
        rep.state_range_text = acc.empty() ? "none among the sampled beta" : "sampled: " + acc;
      }
      break;
    }
  }
  return rep;
}

bool GoldenReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const GoldenRow& r) { return r.pass; });
}

namespace {

void push_row(GoldenReport& rep, const std::string& example, const std::string& quantity,
              double expected, double actual, double tol) {
  GoldenRow row{example, quantity, expected, actual, tol, false};
  row.pass = std::abs(expected - actual) <= tol;
  rep.rows.push_back(row);
}

}  // namespace

GoldenReport reproduce_examples() {
  GoldenReport rep;

  {
    auto arms = GraphFamily::arms(3);
    auto b0 = beta0(arms);
    push_row(rep, "arms(3)", "minimal inverse temperature", 0.5138410019345337, b0.value, 1e-5);
    auto d = period_d(arms);
    auto dp = d_prime_search(arms);
    push_row(rep, "arms(3)", "plain length-difference generator d", 1.0,
             static_cast<double>(d.d), 0.0);
    push_row(rep, "arms(3)", "uniform length-difference generator d'", 0.0,
             static_cast<double>(dp.exact.value_or(-1)), 0.0);
  }

  {
    auto ladder = GraphFamily::ladder();
    push_row(rep, "ladder", "state threshold", 0.4812118250596034, ladder_state_threshold(),
             1e-9);
    auto d = period_d(ladder);
    auto dp = d_prime_search(ladder);
    auto f1 = factor_type(d, dp, 1.0);
    push_row(rep, "ladder", "factor scale at beta = 1", std::exp(-1.0), f1.lambda, 1e-12);
    auto f0 = factor_type(d, dp, 0.0);
    push_row(rep, "ladder", "semifinite factor at beta = 0", 1.0,
             f0.type == FactorType::type_ii_infinity ? 1.0 : 0.0, 0.0);
  }

  {
    auto walk = LatticeWalk::make(1, {{{1}, 1}, {{-1}, 1}});
    auto family = GraphFamily::lattice_walk(walk);
    auto m = minimize_mgf(walk);
    push_row(rep, "symmetric unit walk", "critical value log 2", std::log(2.0), m.beta0, 1e-10);
    auto spectral = beta0(family);
    push_row(rep, "symmetric unit walk", "windowed spectral estimate gap", 0.0,
             std::abs(spectral.value - m.beta0), 2e-3);
    auto cls = classify(family, [] {
      ClassifyOptions o;
      o.depth = 30;
      return o;
    }());
    push_row(rep, "symmetric unit walk", "unique ray at beta0", 1.0,
             cls.uniqueness_at_beta0 == "unique-ray" ? 1.0 : 0.0, 0.0);
    bool any_state = false;
    for (const auto& s : cls.samples)
      if (s.feasible && s.state && s.state->is_state) any_state = true;
    push_row(rep, "symmetric unit walk", "states among sampled beta", 0.0, any_state ? 1.0 : 0.0,
             0.0);
    push_row(rep, "symmetric unit walk", "uniform generator d' = d", 2.0,
             static_cast<double>(cls.d_prime.exact.value_or(-1)), 0.0);
    push_row(rep, "symmetric unit walk", "plain generator d", 2.0,
             static_cast<double>(cls.d.d), 0.0);
  }

  {
    auto walk = LatticeWalk::make(1, {{{1}, 2}, {{-1}, 1}});
    auto m = minimize_mgf(walk);
    push_row(rep, "biased unit walk", "minimizing exponent c_min", -0.5 * std::log(2.0),
             m.c_min.at(0), 1e-10);
    push_row(rep, "biased unit walk", "critical value 1.5 log 2", 1.5 * std::log(2.0), m.beta0,
             1e-10);
    auto family = GraphFamily::lattice_walk(walk);
    auto d = period_d(family);
    auto dp = d_prime_search(family);
    auto f = factor_type(d, dp, m.beta0);
    push_row(rep, "biased unit walk", "factor scale exp(-d beta0) = 1/8", 0.125, f.lambda, 1e-12);
  }

  {
    auto rose = GraphFamily::rose(2);
    auto b0 = beta0(rose);
    push_row(rep, "rose(2)", "critical value log 2", std::log(2.0), b0.value, 1e-10);
    auto cls = classify(rose);
    push_row(rep, "rose(2)", "weight range is the singleton {beta0}", 1.0,
             cls.weight_range == WeightRange::singleton ? 1.0 : 0.0, 0.0);

    auto recoded = recode(rose.truncation(1), 2);
    push_row(rep, "rose(2) recoded, blocks of 2", "vertex count", 4.0,
             static_cast<double>(recoded.vertex_count()), 0.0);
    push_row(rep, "rose(2) recoded, blocks of 2", "edge count", 8.0,
             static_cast<double>(recoded.edge_count()), 0.0);
    auto recoded_family = GraphFamily::explicit_graph(recoded);
    auto rb0 = beta0(recoded_family);
    push_row(rep, "rose(2) recoded, blocks of 2", "critical value log 2", std::log(2.0),
             rb0.value, 1e-10);
  }

  return rep;
}

}  // namespace kms
