//! Standard conic bundle models of del Pezzo surfaces of degree at most 5.

use alloc::format;
use alloc::string::String;
use core::fmt;

use super::DpError;

/// Which anticanonical height the model carries at the real place.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeightShape {
    /// `max(|s|,|t|)·max|x_i|`.
    D5,
    /// `max(|x0|, |s x1|, |t x1|, |s x2|, |t x2|)`.
    D4,
    /// `max(|x0|, |x1|, |s x2|, |t x2|)`.
    D3,
    /// `max|x_i|`.
    D2,
    /// `max(|x0/s|, |x0/t|, |x1|, |x2|)`.
    D1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Table4Model {
    pub d: u32,
    pub a: [u32; 3],
    pub e: u32,
    /// `−K_X = M + k F` as `(1, k)`.
    pub minus_k: (i64, i64),
    pub height: HeightShape,
}

pub fn table4_model(d: u32) -> Result<Table4Model, DpError> {
    let (a, e, k, height) = match d {
        5 => ([0, 0, 0], 1, 1, HeightShape::D5),
        4 => ([0, 1, 1], 0, 0, HeightShape::D4),
        3 => ([0, 0, 1], 1, 0, HeightShape::D3),
        2 => ([0, 0, 0], 2, 0, HeightShape::D2),
        1 => ([0, 1, 1], 1, -1, HeightShape::D1),
        _ => return Err(DpError::InvalidDegree(d)),
    };
    Ok(Table4Model { d, a, e, minus_k: (1, k), height })
}

impl fmt::Display for Table4Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.minus_k.1 {
            0 => String::from("M"),
            1 => String::from("M+F"),
            -1 => String::from("M-F"),
            c if c > 0 => format!("M+{c}F"),
            c => format!("M{c}F"),
        };
        write!(f, "({},{},{}) ({},2) {}", self.a[0], self.a[1], self.a[2], self.e, k)
    }
}
