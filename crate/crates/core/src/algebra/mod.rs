pub mod factor;
pub mod field;
pub mod form;
pub mod fp;
pub mod lp;
pub mod matrix;
pub mod place;
pub mod poly;
pub mod quotient;
pub mod ratfunc;
