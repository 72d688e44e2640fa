#pragma once

namespace cwsubset {

// Largest solution of tanh(beta * x) = x for beta >= 1, to 1e-12 absolute.
//
// Bracketed bisection on [1e-12, 1] followed by two guarded Newton steps.
// Returns 0 at beta == 1. For very large beta the root rounds to 1.0 in
// double precision and 1.0 is returned. Throws DomainError for beta < 1.
double solve_m(double beta);

// Derivative of solve_m, m (1 - m^2) / (1 - beta (1 - m^2)).
// Diverges as beta -> 1+; throws DomainError for beta <= 1 or when the
// denominator is not positive in floating point.
double m_prime(double beta);

// Inverse of solve_m on (0, 1): artanh(y) / y. Throws DomainError outside.
double m_inverse(double y);

}  // namespace cwsubset
