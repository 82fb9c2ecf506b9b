#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "ncqo/errors.hpp"

namespace ncqo {

// Closed-form time function: an immutable expression tree over the
// primitives {constant, e^{alpha t}, (Gamma t + chi)^p, sin(f t), cos(f t)}
// closed under +, -, *, /, sqrt and integer powers. Supports exact symbolic
// differentiation, so quantities like rho_dot or d/dt(d/a) never rely on
// finite differences. Copies share the tree; all state is immutable.
class time_expr {
  enum class op {
    constant,
    exponential,   // e^{p0 t}
    linear_power,  // (p0 t + p1)^p2
    sine,          // sin(p0 t)
    cosine,        // cos(p0 t)
    add,
    sub,
    mul,
    divide,
    sqrt_of,
    int_pow  // lhs^ipow
  };

  struct node {
    op kind;
    double p0 = 0.0, p1 = 0.0, p2 = 0.0;
    int ipow = 0;
    std::shared_ptr<const node> lhs, rhs;
  };

  std::shared_ptr<const node> n_;

  explicit time_expr(std::shared_ptr<const node> n) : n_(std::move(n)) {}

  static time_expr leaf(op kind, double p0, double p1 = 0.0, double p2 = 0.0) {
    auto n = std::make_shared<node>();
    n->kind = kind;
    n->p0 = p0;
    n->p1 = p1;
    n->p2 = p2;
    return time_expr(std::move(n));
  }

  static time_expr binary(op kind, time_expr l, time_expr r) {
    auto n = std::make_shared<node>();
    n->kind = kind;
    n->lhs = std::move(l.n_);
    n->rhs = std::move(r.n_);
    return time_expr(std::move(n));
  }

  static time_expr unary(op kind, time_expr x) {
    auto n = std::make_shared<node>();
    n->kind = kind;
    n->lhs = std::move(x.n_);
    return time_expr(std::move(n));
  }

  static double eval(const node& n, double t) {
    switch (n.kind) {
      case op::constant:
        return n.p0;
      case op::exponential:
        return std::exp(n.p0 * t);
      case op::linear_power: {
        const double base = n.p0 * t + n.p1;
        if (base == 0.0 && n.p2 < 0.0)
          throw domain_error("negative power of a zero base", t);
        if (base < 0.0 && n.p2 != std::floor(n.p2))
          throw domain_error("fractional power of a negative base", t);
        return std::pow(base, n.p2);
      }
      case op::sine:
        return std::sin(n.p0 * t);
      case op::cosine:
        return std::cos(n.p0 * t);
      case op::add:
        return eval(*n.lhs, t) + eval(*n.rhs, t);
      case op::sub:
        return eval(*n.lhs, t) - eval(*n.rhs, t);
      case op::mul:
        return eval(*n.lhs, t) * eval(*n.rhs, t);
      case op::divide: {
        const double den = eval(*n.rhs, t);
        if (den == 0.0) throw domain_error("division by zero", t);
        return eval(*n.lhs, t) / den;
      }
      case op::sqrt_of: {
        const double arg = eval(*n.lhs, t);
        if (arg < 0.0) throw domain_error("sqrt of a negative value", t);
        return std::sqrt(arg);
      }
      case op::int_pow: {
        const double base = eval(*n.lhs, t);
        if (base == 0.0 && n.ipow < 0)
          throw domain_error("negative power of a zero base", t);
        double r = 1.0;
        const int e = n.ipow < 0 ? -n.ipow : n.ipow;
        for (int i = 0; i < e; ++i) r *= base;
        return n.ipow < 0 ? 1.0 / r : r;
      }
    }
    throw error("time_expr: corrupt node");
  }

  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
  }

  static std::string print(const node& n) {
    switch (n.kind) {
      case op::constant:
        return fmt(n.p0);
      case op::exponential:
        return "exp(" + fmt(n.p0) + "*t)";
      case op::linear_power:
        return "(" + fmt(n.p0) + "*t + " + fmt(n.p1) + ")^" + fmt(n.p2);
      case op::sine:
        return "sin(" + fmt(n.p0) + "*t)";
      case op::cosine:
        return "cos(" + fmt(n.p0) + "*t)";
      case op::add:
        return "(" + print(*n.lhs) + " + " + print(*n.rhs) + ")";
      case op::sub:
        return "(" + print(*n.lhs) + " - " + print(*n.rhs) + ")";
      case op::mul:
        return "(" + print(*n.lhs) + " * " + print(*n.rhs) + ")";
      case op::divide:
        return "(" + print(*n.lhs) + " / " + print(*n.rhs) + ")";
      case op::sqrt_of:
        return "sqrt(" + print(*n.lhs) + ")";
      case op::int_pow:
        return "(" + print(*n.lhs) + ")^" + std::to_string(n.ipow);
    }
    return "?";
  }

 public:
  // Default-constructed expression is the constant zero.
  time_expr() : time_expr(leaf(op::constant, 0.0)) {}

  static time_expr constant(double c) { return leaf(op::constant, c); }
  static time_expr exponential(double alpha) {
    return leaf(op::exponential, alpha);
  }
  static time_expr linear_power(double gamma, double chi, double p) {
    if (p == 0.0) return constant(1.0);
    return leaf(op::linear_power, gamma, chi, p);
  }
  static time_expr sine(double f) { return leaf(op::sine, f); }
  static time_expr cosine(double f) { return leaf(op::cosine, f); }

  double operator()(double t) const { return eval(*n_, t); }

  bool is_constant(double* value = nullptr) const {
    if (n_->kind != op::constant) return false;
    if (value) *value = n_->p0;
    return true;
  }

  std::string str() const { return print(*n_); }

  friend time_expr operator+(const time_expr& l, const time_expr& r) {
    double cl, cr;
    const bool kl = l.is_constant(&cl), kr = r.is_constant(&cr);
    if (kl && kr) return constant(cl + cr);
    if (kl && cl == 0.0) return r;
    if (kr && cr == 0.0) return l;
    return binary(op::add, l, r);
  }
  friend time_expr operator-(const time_expr& l, const time_expr& r) {
    double cl, cr;
    const bool kl = l.is_constant(&cl), kr = r.is_constant(&cr);
    if (kl && kr) return constant(cl - cr);
    if (kr && cr == 0.0) return l;
    return binary(op::sub, l, r);
  }
  friend time_expr operator*(const time_expr& l, const time_expr& r) {
    double cl, cr;
    const bool kl = l.is_constant(&cl), kr = r.is_constant(&cr);
    if (kl && kr) return constant(cl * cr);
    if ((kl && cl == 0.0) || (kr && cr == 0.0)) return constant(0.0);
    if (kl && cl == 1.0) return r;
    if (kr && cr == 1.0) return l;
    return binary(op::mul, l, r);
  }
  friend time_expr operator/(const time_expr& l, const time_expr& r) {
    double cl, cr;
    const bool kl = l.is_constant(&cl), kr = r.is_constant(&cr);
    if (kr && cr != 0.0) {
      if (kl) return constant(cl / cr);
      if (cr == 1.0) return l;
    }
    // A literal zero numerator cannot produce anything but zero; the trees
    // here are library-built, so folding does not mask a user mistake.
    if (kl && cl == 0.0) return constant(0.0);
    return binary(op::divide, l, r);
  }
  friend time_expr operator-(const time_expr& x) {
    return constant(-1.0) * x;
  }

  friend time_expr operator+(double l, const time_expr& r) {
    return constant(l) + r;
  }
  friend time_expr operator+(const time_expr& l, double r) {
    return l + constant(r);
  }
  friend time_expr operator-(double l, const time_expr& r) {
    return constant(l) - r;
  }
  friend time_expr operator-(const time_expr& l, double r) {
    return l - constant(r);
  }
  friend time_expr operator*(double l, const time_expr& r) {
    return constant(l) * r;
  }
  friend time_expr operator*(const time_expr& l, double r) {
    return l * constant(r);
  }
  friend time_expr operator/(double l, const time_expr& r) {
    return constant(l) / r;
  }
  friend time_expr operator/(const time_expr& l, double r) {
    return l / constant(r);
  }

  friend time_expr sqrt(const time_expr& x) {
    double c;
    if (x.is_constant(&c) && c >= 0.0) return constant(std::sqrt(c));
    return unary(op::sqrt_of, x);
  }

  friend time_expr powi(const time_expr& x, int e) {
    if (e == 0) return constant(1.0);
    if (e == 1) return x;
    double c;
    if (x.is_constant(&c) && !(c == 0.0 && e < 0)) {
      double r = 1.0;
      for (int i = 0; i < (e < 0 ? -e : e); ++i) r *= c;
      return constant(e < 0 ? 1.0 / r : r);
    }
    auto n = std::make_shared<node>();
    n->kind = op::int_pow;
    n->ipow = e;
    n->lhs = x.n_;
    return time_expr(std::move(n));
  }

  // Exact derivative; the result is again a closed-form expression.
  time_expr derivative() const {
    const node& n = *n_;
    switch (n.kind) {
      case op::constant:
        return constant(0.0);
      case op::exponential:
        return constant(n.p0) * time_expr(n_);
      case op::linear_power:
        return constant(n.p0 * n.p2) * linear_power(n.p0, n.p1, n.p2 - 1.0);
      case op::sine:
        return constant(n.p0) * cosine(n.p0);
      case op::cosine:
        return constant(-n.p0) * sine(n.p0);
      case op::add:
        return time_expr(n.lhs).derivative() + time_expr(n.rhs).derivative();
      case op::sub:
        return time_expr(n.lhs).derivative() - time_expr(n.rhs).derivative();
      case op::mul: {
        const time_expr u(n.lhs), v(n.rhs);
        return u.derivative() * v + u * v.derivative();
      }
      case op::divide: {
        const time_expr u(n.lhs), v(n.rhs);
        return (u.derivative() * v - u * v.derivative()) / (v * v);
      }
      case op::sqrt_of: {
        const time_expr u(n.lhs);
        return u.derivative() / (constant(2.0) * sqrt(u));
      }
      case op::int_pow: {
        const time_expr u(n.lhs);
        return constant(n.ipow) * powi(u, n.ipow - 1) * u.derivative();
      }
    }
    throw error("time_expr: corrupt node");
  }

  // Calls `fn` with every subexpression whose sign decides evaluability:
  // sqrt arguments and the linear bases of fractional powers. Used by the
  // physical-window scan.
  void visit_radicands(const std::function<void(const time_expr&)>& fn) const {
    const node& n = *n_;
    if (n.kind == op::sqrt_of) fn(time_expr(n.lhs));
    if (n.kind == op::linear_power && n.p2 != std::floor(n.p2))
      fn(linear_power(n.p0, n.p1, 1.0));
    if (n.lhs) time_expr(n.lhs).visit_radicands(fn);
    if (n.rhs) time_expr(n.rhs).visit_radicands(fn);
  }
};

}  // namespace ncqo
