pub mod category;
pub mod cli;
pub mod error;
pub mod foliation;
pub mod props;
pub mod ratlin;
pub mod reconstruct;
pub mod squares;
pub mod tensor_space;

pub use error::{Error, Result};
