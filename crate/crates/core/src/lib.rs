//! Wedderburn structure and Grothendieck rings of semisimple skew group rings over finite
//! fields, computed from Galois orbits on characters and checked against a brute-force algebra
//! oracle, together with the K-theory bookkeeping built on top of them.

pub mod abgroup;
pub mod ff;
pub mod ktheory;
pub mod linalg;
pub mod oracle;
pub mod skewring;
pub mod ss;
