//! Bridgeland stability on K3 and abelian surfaces of Picard rank at least one:
//! exact central charges, walls, Hall-algebra transforms and counting invariants.

pub mod arith;
pub mod charge;
pub mod cli;
pub mod enumeration;
pub mod hall;
pub mod invariants;
pub mod io;
pub mod lattice;
pub mod svg;
pub mod walls;
