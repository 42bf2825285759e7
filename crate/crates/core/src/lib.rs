pub mod action;
pub mod algebra;
pub mod fixtures;
pub mod io;
pub mod l1x;
pub mod linalg;
pub mod norms;
pub mod ogroup;
pub mod regrep;
pub mod sampling;
