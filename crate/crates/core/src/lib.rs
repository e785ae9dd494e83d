pub mod cli;
pub mod defgen;
pub mod exactgeom;
pub mod folang;
pub mod frames;
pub mod interp;
pub mod tiling;
pub mod verify;
