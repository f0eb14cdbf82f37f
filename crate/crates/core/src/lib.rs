//! Exact generating functions, brute-force oracles and root-of-unity
//! numerics for multimodal integer sequences.

pub mod cli;
pub mod enumerate;
pub mod genfun;
pub mod rootsofunity;
pub mod series;
pub mod symbols;
pub mod verify;
