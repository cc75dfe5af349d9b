#pragma once

// The jump law. The reference model is the standardized Pareto family:
// P ~ Pareto(alpha, minimum 1), xi = (P - mu_P)/sigma_P, which has exact
// zero mean, unit variance and right tail V(t) = (mu_P + sigma_P t)^(-alpha).
// Sampling is inverse-CDF only, one uniform per draw.
//
// TailSpec describes a regularly varying tail V(t) = t^(-alpha) L(t) with a
// constant or log-power slowly varying factor; tail-only models support the
// asymptotic formulas but cannot be sampled.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "cldp/errors.hpp"
#include "cldp/rng.hpp"

namespace cldp {

struct TailSpec {
    enum class Slow { Constant, LogPower };

    double alpha = 3.0;
    Slow slow = Slow::Constant;
    double c = 1.0;     // multiplicative constant of L
    double beta = 0.0;  // exponent of (ln t) for LogPower

    static TailSpec constant(double alpha, double c = 1.0) {
        check_alpha(alpha);
        if (!(c > 0.0)) throw DomainError("TailSpec: C must be > 0");
        return {alpha, Slow::Constant, c, 0.0};
    }

    static TailSpec log_power(double alpha, double c, double beta) {
        check_alpha(alpha);
        if (!(c > 0.0)) throw DomainError("TailSpec: C must be > 0");
        return {alpha, Slow::LogPower, c, beta};
    }

    // L(t); the log factor is frozen at its t = e value below t = e.
    double slow_factor(double t) const {
        if (slow == Slow::Constant) return c;
        const double lt = std::max(std::log(t), 1.0);
        return c * std::pow(lt, beta);
    }

    // V(t) = t^(-alpha) L(t), capped at 1 and extended flat for t <= 1.
    double value(double t) const {
        if (t <= 1.0) return 1.0;
        return std::min(1.0, std::pow(t, -alpha) * slow_factor(t));
    }

    static void check_alpha(double alpha) {
        if (!(alpha > 2.0)) throw DomainError("tail exponent alpha must be > 2");
    }
};

class JumpModel {
  public:
    enum class Kind { StandardizedPareto, TailOnly };

    static JumpModel standardized_pareto(double alpha) {
        TailSpec::check_alpha(alpha);
        JumpModel m;
        m.kind_ = Kind::StandardizedPareto;
        m.alpha_ = alpha;
        m.mu_ = alpha / (alpha - 1.0);
        m.sigma_ = std::sqrt(alpha / ((alpha - 1.0) * (alpha - 1.0) * (alpha - 2.0)));
        // Asymptotic tail: V(t) ~ sigma^-alpha t^-alpha.
        m.tail_ = TailSpec::constant(alpha, std::pow(m.sigma_, -alpha));
        return m;
    }

    static JumpModel tail_only(const TailSpec& tail) {
        JumpModel m;
        m.kind_ = Kind::TailOnly;
        m.alpha_ = tail.alpha;
        m.tail_ = tail;
        return m;
    }

    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    double location() const { return mu_; }
    double scale() const { return sigma_; }
    const TailSpec& tail() const { return tail_; }
    bool samplable() const { return kind_ == Kind::StandardizedPareto; }

    // Smallest value xi can take (Pareto minimum mapped through the
    // standardization). Tail-only models are unbounded below.
    double support_min() const {
        return samplable() ? (1.0 - mu_) / sigma_ : -std::numeric_limits<double>::infinity();
    }

    // P(xi > t). Exact for the Pareto family, TailSpec value otherwise.
    double tail_V(double t) const {
        if (kind_ == Kind::TailOnly) return t <= 0.0 ? 1.0 : tail_.value(t);
        const double p = mu_ + sigma_ * t;
        return p <= 1.0 ? 1.0 : std::pow(p, -alpha_);
    }

    // Inverse CDF parameterized by the upper-tail probability u in (0,1):
    // u -> quantile q with P(xi > q) = u, i.e. P = u^(-1/alpha).
    double from_uniform(double u) const {
        require_samplable();
        return (std::pow(u, -1.0 / alpha_) - mu_) / sigma_;
    }

    double sample(RngStream& rng) const { return from_uniform(rng.next_u01()); }

    void require_samplable() const {
        if (!samplable()) throw DomainError("jump model is tail-only and cannot be sampled");
    }

  private:
    Kind kind_ = Kind::TailOnly;
    double alpha_ = 3.0;
    double mu_ = 0.0;
    double sigma_ = 1.0;
    TailSpec tail_;
};

inline JumpModel make_standardized_pareto(double alpha) { return JumpModel::standardized_pareto(alpha); }

inline double tail_V(const JumpModel& m, double t) { return m.tail_V(t); }

// Exact conditional sampler for xi given xi > y or xi <= y.
class ConditionedSampler {
  public:
    enum class Side { Above, Below };

    ConditionedSampler(const JumpModel& model, double threshold, Side side)
        : model_(model), y_(threshold), side_(side) {
        model.require_samplable();
        const double py = model.location() + model.scale() * threshold;
        if (side == Side::Above) {
            // P(xi > y) > 0 always holds for the Pareto family.
            py_ = std::max(1.0, py);
        } else {
            if (py <= 1.0) throw DomainError("conditioning event {xi <= y} has probability 0");
            py_ = py;
            cdf_y_ = 1.0 - std::pow(py, -model.alpha());
        }
        neg_inv_alpha_ = -1.0 / model.alpha();
    }

    const JumpModel& model() const { return model_; }
    double threshold() const { return y_; }
    Side side() const { return side_; }

    // Probability of the conditioning event.
    double event_probability() const {
        return side_ == Side::Above ? model_.tail_V(y_) : 1.0 - model_.tail_V(y_);
    }

    double from_uniform(double u) const {
        double p;
        if (side_ == Side::Above) {
            p = py_ * std::pow(u, neg_inv_alpha_);
        } else {
            p = std::pow(1.0 - u * cdf_y_, neg_inv_alpha_);
        }
        return (p - model_.location()) / model_.scale();
    }

    double sample(RngStream& rng) const { return from_uniform(rng.next_u01()); }

  private:
    JumpModel model_;
    double y_;
    Side side_;
    double py_ = 1.0;
    double cdf_y_ = 0.0;
    double neg_inv_alpha_;
};

inline double sample_conditioned(const ConditionedSampler& cs, RngStream& rng) { return cs.sample(rng); }

// Parses "pareto:alpha=3.0".
JumpModel parse_jump_spec(const std::string& spec);

}  // namespace cldp
