pub mod brep;
pub mod cli;
pub mod config;
pub mod contact;
pub mod error;
pub mod lift;
pub mod meshout;
pub mod motion;
pub mod solve;
pub mod surface;
