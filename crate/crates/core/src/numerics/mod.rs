//! Quadrature and root-finding kernel.

mod laguerre;
mod quadrature;
mod roots;

pub use laguerre::gamma_rule;
pub use quadrature::{integrate_band, integrate_semi_infinite, QuadratureSpec};
pub use roots::{find_root, scan_for_sign_change, RootBracket};
