#pragma once

namespace honeyhsi {

/// Regularized incomplete beta function I_x(a, b) for a, b > 0 and x in [0, 1].
///
/// Evaluated by the modified Lentz continued fraction (200 iterations, 1e-12 relative
/// convergence), switching to the symmetry relation when x > (a+1)/(a+b+2).
/// Throws DomainError outside the domain and ConvergenceError if the fraction stalls.
double regularizedIncompleteBeta(double a, double b, double x);

/// Upper-tail probability P(T > t) of Student's t distribution with df degrees of freedom.
/// Throws DomainError when df < 1 or t is NaN.
double studentTSf(double t, double df);

/// Two-sided p-value 2·P(T > |t|), capped at 1.
double studentTTwoSided(double t, double df);

}  // namespace honeyhsi
