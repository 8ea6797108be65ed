pub mod error;
pub mod poly;
pub mod ring;

pub use error::{Error, Result};
pub use poly::{BiPoly, Degree, Poly, QuotPoly, TruncPoly};
pub use ring::{binomial, RingDescriptor, RingValue};
pub mod linalg;
pub mod twist;
pub mod builders;
pub mod planes;
pub mod dual;
pub mod series;
pub mod schema;
