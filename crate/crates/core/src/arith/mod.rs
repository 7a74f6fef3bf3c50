//! Exact polynomial, rational-function and power-series arithmetic over the integers.

pub mod grammar;
pub mod poly;
pub mod rational;
pub mod series;

pub use grammar::{parse, parse_poly, render, render_poly};
pub use poly::{Exponents, IntPoly};
pub use rational::{monomial_ratio, FrobeniusSymbol, MonomialRatio, RationalFn, Signature};
pub use series::{exponent_vectors, series_expand, PowerSeries, QLaurent};
