// Copyright 2026 the Holoknot Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! Framed holonomic knots: diagrams, invariants and isotopy tooling for
//! knots traced by the 2-jet `(f, f', f'')` of a function on the circle.

pub mod circle_functions;
pub mod design;
pub mod diagram;
pub mod error;
pub mod invariants;
pub mod isotopy;
pub mod knot;
pub mod legendrian;
pub mod trig;
